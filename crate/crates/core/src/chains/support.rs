//! Supports of chains: the union of the cells' closed hulls.

use crate::scalar::Scalar;

use super::cell::Cell;

#[derive(Debug, Clone)]
pub struct Support<S = f64> {
    n: usize,
    cells: Vec<Cell<S>>,
    bbox: Option<(Vec<S>, Vec<S>)>,
}

impl<S: Scalar> Support<S> {
    pub fn new(n: usize, cells: Vec<Cell<S>>) -> Self {
        let mut bbox: Option<(Vec<S>, Vec<S>)> = None;
        for c in &cells {
            for p in c.hull_points() {
                match &mut bbox {
                    None => bbox = Some((p.clone(), p)),
                    Some((lo, hi)) => {
                        for i in 0..n {
                            lo[i] = lo[i].min(p[i]);
                            hi[i] = hi[i].max(p[i]);
                        }
                    }
                }
            }
        }
        Support { n, cells, bbox }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    /// `(lower corner, upper corner)`; `None` for the empty support.
    pub fn bounding_box(&self) -> Option<(&[S], &[S])> {
        self.bbox.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        let Some((lo, hi)) = &self.bbox else { return false };
        if p.iter().zip(lo.iter().zip(hi)).any(|(&x, (&a, &b))| x < a - tol || x > b + tol) {
            return false;
        }
        self.cells.iter().any(|c| c.contains(p, tol))
    }
}
