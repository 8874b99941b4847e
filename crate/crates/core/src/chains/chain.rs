//! Polyhedral k-chains: finite real combinations of oriented cells.

use serde::{Deserialize, Serialize};

use super::cell::{cmp_cells, Cell, Cube, Simplex};
use super::support::Support;
use crate::error::{ChainletError, Result};
use crate::exterior::{check_dim, KVector};
use crate::scalar::{compensated_sum, Scalar};

/// Cap on the number of cells a single refinement may produce.
const MAX_REFINED_CELLS: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Term<S = f64> {
    pub coeff: S,
    pub cell: Cell<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainRepr<S>", bound = "S: Scalar")]
pub struct PolyChain<S = f64> {
    n: usize,
    k: usize,
    terms: Vec<Term<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct ChainRepr<S> {
    n: usize,
    k: usize,
    terms: Vec<Term<S>>,
}

impl<S: Scalar> TryFrom<ChainRepr<S>> for PolyChain<S> {
    type Error = ChainletError;
    fn try_from(r: ChainRepr<S>) -> Result<Self> {
        PolyChain::from_terms(r.n, r.k, r.terms)
    }
}

impl<S: Scalar> PolyChain<S> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(ChainletError::GradeOverflow { grade: k, ambient: n });
        }
        Ok(PolyChain { n, k, terms: Vec::new() })
    }

    pub fn from_terms(n: usize, k: usize, terms: Vec<Term<S>>) -> Result<Self> {
        let mut c = PolyChain::zero(n, k)?;
        for t in terms {
            c.push(t.coeff, t.cell)?;
        }
        Ok(c)
    }

    pub fn from_cell(cell: impl Into<Cell<S>>) -> Self {
        let cell = cell.into();
        PolyChain { n: cell.ambient(), k: cell.dim(), terms: vec![Term { coeff: S::one(), cell }] }
    }

    pub fn simplex(vertices: Vec<Vec<S>>) -> Result<Self> {
        Ok(PolyChain::from_cell(Simplex::new(vertices)?))
    }

    /// The unit cube `[0,1]^k` spanned by the given coordinate axes.
    pub fn unit_cube(n: usize, axes: &[usize]) -> Result<Self> {
        let mut c = vec![S::zero(); n];
        for &a in axes {
            *c.get_mut(a).ok_or(ChainletError::DimensionMismatch { expected: n, found: a + 1 })? = S::lit(0.5);
        }
        Ok(PolyChain::from_cell(Cube::axis(c, axes, S::one(), 1)?))
    }

    pub fn push(&mut self, coeff: S, cell: impl Into<Cell<S>>) -> Result<()> {
        let cell = cell.into();
        if cell.ambient() != self.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: cell.ambient() });
        }
        if cell.dim() != self.k {
            return Err(ChainletError::DimensionMismatch { expected: self.k, found: cell.dim() });
        }
        if !coeff.is_finite() {
            return Err(ChainletError::Invalid("non-finite coefficient".into()));
        }
        self.terms.push(Term { coeff, cell });
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Empty after canonicalization.
    pub fn is_zero(&self) -> bool {
        self.canonicalize().is_empty()
    }

    pub fn scale(&self, s: S) -> PolyChain<S> {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff * s, cell: t.cell.clone() }).collect();
        PolyChain { n: self.n, k: self.k, terms }
    }

    /// Formal sum (no canonicalization).
    pub fn add(&self, other: &PolyChain<S>) -> Result<PolyChain<S>> {
        self.check_shape(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PolyChain { n: self.n, k: self.k, terms })
    }

    pub fn sub(&self, other: &PolyChain<S>) -> Result<PolyChain<S>> {
        self.add(&other.scale(-S::one()))
    }

    fn check_shape(&self, other: &PolyChain<S>) -> Result<()> {
        if self.n != other.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(ChainletError::DimensionMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }

    /// Merges identical cells (orientation-aware), drops zero coefficients,
    /// and sorts terms by their exact cell keys.
    pub fn canonicalize(&self) -> PolyChain<S> {
        let mut items: Vec<(S, Cell<S>)> = self
            .terms
            .iter()
            .map(|t| {
                let (s, c) = t.cell.canonical();
                (t.coeff * s, c)
            })
            .collect();
        items.sort_by(|a, b| cmp_cells(&a.1, &b.1));
        let mut terms: Vec<Term<S>> = Vec::with_capacity(items.len());
        let mut i = 0;
        while i < items.len() {
            let mut j = i + 1;
            while j < items.len() && cmp_cells(&items[i].1, &items[j].1).is_eq() {
                j += 1;
            }
            let coeff = compensated_sum(items[i..j].iter().map(|x| x.0));
            if coeff != S::zero() {
                terms.push(Term { coeff, cell: items[i].1.clone() });
            }
            i = j;
        }
        PolyChain { n: self.n, k: self.k, terms }
    }

    /// `Σ a_i ∂σ_i`, not canonicalized. The boundary of a 0-chain is empty.
    pub fn boundary(&self) -> PolyChain<S> {
        if self.k == 0 {
            return PolyChain { n: self.n, k: 0, terms: Vec::new() };
        }
        let mut terms = Vec::with_capacity(self.terms.len() * 2 * self.k);
        for t in &self.terms {
            for (s, c) in t.cell.boundary() {
                terms.push(Term { coeff: t.coeff * s, cell: c });
            }
        }
        PolyChain { n: self.n, k: self.k - 1, terms }
    }

    /// `Σ |a_i| M(σ_i)` of the canonical form.
    pub fn mass(&self) -> S {
        compensated_sum(self.canonicalize().terms.iter().map(|t| t.coeff.abs() * t.cell.mass()))
    }

    /// `Σ |a_i| M(σ_i)` of the terms as stored.
    pub fn formal_mass(&self) -> S {
        compensated_sum(self.terms.iter().map(|t| t.coeff.abs() * t.cell.mass()))
    }

    pub fn vec(&self) -> KVector<S> {
        let mut acc = KVector::zero(self.n, self.k).expect("validated shape");
        for t in &self.terms {
            acc = &acc + &t.cell.vec().scale(t.coeff);
        }
        acc
    }

    pub fn translate(&self, v: &[S]) -> PolyChain<S> {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff, cell: t.cell.translate(v) }).collect();
        PolyChain { n: self.n, k: self.k, terms }
    }

    pub fn is_dyadic(&self) -> bool {
        self.k == 0 || self.terms.iter().all(|t| t.cell.is_dyadic() || t.cell.dim() == 0)
    }

    /// Finest dyadic level among the cubes, if any.
    pub fn max_level(&self) -> Option<i32> {
        self.terms
            .iter()
            .filter_map(|t| match &t.cell {
                Cell::Cube(c) => c.dyadic().map(|d| d.level),
                Cell::Simplex(_) => None,
            })
            .max()
    }

    /// Splits every dyadic cube coarser than `level` into its subcubes at
    /// `level`. Points pass through unchanged.
    pub fn refine_to_level(&self, level: i32) -> Result<PolyChain<S>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match &t.cell {
                Cell::Cube(c) => {
                    let d = c.dyadic().ok_or(ChainletError::NonDyadic)?;
                    let kids = d.subdivide(level).ok_or_else(|| {
                        ChainletError::Invalid(format!("refinement from level {} to {level} is too deep", d.level))
                    })?;
                    if terms.len() + kids.len() > MAX_REFINED_CELLS {
                        return Err(ChainletError::Invalid("refinement exceeds the cell budget".into()));
                    }
                    for kid in kids {
                        terms.push(Term { coeff: t.coeff, cell: Cell::Cube(Cube::from_dyadic(self.n, kid, c.sign())?) });
                    }
                }
                Cell::Simplex(s) if s.dim() == 0 => terms.push(t.clone()),
                Cell::Simplex(_) => return Err(ChainletError::NonDyadic),
            }
        }
        Ok(PolyChain { n: self.n, k: self.k, terms })
    }

    /// Support of the canonical form.
    pub fn support(&self) -> Support<S> {
        Support::new(self.n, self.canonicalize().terms.into_iter().map(|t| t.cell).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chains serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ChainletError::Invalid(e.to_string()))
    }
}
