//! Diffcells and diffchains.

use serde::{Deserialize, Serialize};

use crate::chains::{Cell, PolyChain, Term};
use crate::error::{ChainletError, Result};
use crate::geom;
use crate::scalar::{compensated_sum, Scalar};

/// Largest diffcell order accepted.
pub const DEFAULT_R_MAX: usize = 4;

/// `σ^j = σ^{j−1} − T_{v_j} σ^{j−1}` built from a base cell `σ^0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffCellRepr<S>", bound = "S: Scalar")]
pub struct DiffCell<S = f64> {
    base: Cell<S>,
    vectors: Vec<Vec<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct DiffCellRepr<S> {
    base: Cell<S>,
    #[serde(default)]
    vectors: Vec<Vec<S>>,
}

impl<S: Scalar> TryFrom<DiffCellRepr<S>> for DiffCell<S> {
    type Error = ChainletError;
    fn try_from(r: DiffCellRepr<S>) -> Result<Self> {
        DiffCell::new(r.base, r.vectors)
    }
}

impl<S: Scalar> DiffCell<S> {
    pub fn new(base: impl Into<Cell<S>>, vectors: Vec<Vec<S>>) -> Result<Self> {
        let base = base.into();
        if vectors.len() > DEFAULT_R_MAX {
            return Err(ChainletError::Invalid(format!("diffcell order {} exceeds {DEFAULT_R_MAX}", vectors.len())));
        }
        let n = base.ambient();
        for v in &vectors {
            if v.len() != n {
                return Err(ChainletError::DimensionMismatch { expected: n, found: v.len() });
            }
            let len = geom::norm(v);
            if !(len > S::zero()) || !len.is_finite() {
                return Err(ChainletError::Invalid("translation vectors must be nonzero and finite".into()));
            }
        }
        Ok(DiffCell { base, vectors })
    }

    pub fn base(&self) -> &Cell<S> {
        &self.base
    }

    pub fn vectors(&self) -> &[Vec<S>] {
        &self.vectors
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    /// `‖σ^j‖_j = M(σ^0) |v_1| ⋯ |v_j|`.
    pub fn mass(&self) -> S {
        self.vectors.iter().fold(self.base.mass(), |m, v| m * geom::norm(v))
    }

    /// One more difference: `σ^j − T_v σ^j`.
    pub fn raise(&self, v: Vec<S>) -> Result<DiffCell<S>> {
        let mut vectors = self.vectors.clone();
        vectors.push(v);
        DiffCell::new(self.base.clone(), vectors)
    }

    /// The `2^j` signed translates `(−1)^{|S|} T_{Σ_{i∈S} v_i} σ^0`.
    pub fn expand(&self) -> Vec<(S, Cell<S>)> {
        let j = self.vectors.len();
        let n = self.base.ambient();
        (0..1usize << j)
            .map(|mask| {
                let mut shift = vec![S::zero(); n];
                for (i, v) in self.vectors.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        shift = geom::add(&shift, v);
                    }
                }
                let sign = if mask.count_ones() % 2 == 0 { S::one() } else { -S::one() };
                let cell = if mask == 0 { self.base.clone() } else { self.base.translate(&shift) };
                (sign, cell)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DiffTerm<S = f64> {
    pub coeff: S,
    pub cell: DiffCell<S>,
}

/// `D^j = Σ a_i σ_i^j`, homogeneous in the order `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffChainRepr<S>", bound = "S: Scalar")]
pub struct DiffChain<S = f64> {
    n: usize,
    k: usize,
    order: usize,
    terms: Vec<DiffTerm<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct DiffChainRepr<S> {
    n: usize,
    k: usize,
    order: usize,
    terms: Vec<DiffTerm<S>>,
}

impl<S: Scalar> TryFrom<DiffChainRepr<S>> for DiffChain<S> {
    type Error = ChainletError;
    fn try_from(r: DiffChainRepr<S>) -> Result<Self> {
        let mut d = DiffChain::zero(r.n, r.k, r.order)?;
        for t in r.terms {
            d.push(t.coeff, t.cell)?;
        }
        Ok(d)
    }
}

impl<S: Scalar> DiffChain<S> {
    pub fn zero(n: usize, k: usize, order: usize) -> Result<Self> {
        PolyChain::<S>::zero(n, k)?;
        if order > DEFAULT_R_MAX {
            return Err(ChainletError::Invalid(format!("diffchain order {order} exceeds {DEFAULT_R_MAX}")));
        }
        Ok(DiffChain { n, k, order, terms: Vec::new() })
    }

    /// Order-0 diffchain with the cells of `p`.
    pub fn from_chain(p: &PolyChain<S>) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|t| DiffTerm { coeff: t.coeff, cell: DiffCell { base: t.cell.clone(), vectors: Vec::new() } })
            .collect();
        DiffChain { n: p.ambient(), k: p.grade(), order: 0, terms }
    }

    pub fn push(&mut self, coeff: S, cell: DiffCell<S>) -> Result<()> {
        if cell.base.ambient() != self.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: cell.base.ambient() });
        }
        if cell.base.dim() != self.k {
            return Err(ChainletError::DimensionMismatch { expected: self.k, found: cell.base.dim() });
        }
        if cell.order() != self.order {
            return Err(ChainletError::Invalid(format!("order {} term in an order {} diffchain", cell.order(), self.order)));
        }
        if !coeff.is_finite() {
            return Err(ChainletError::Invalid("non-finite coefficient".into()));
        }
        self.terms.push(DiffTerm { coeff, cell });
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[DiffTerm<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `‖D^j‖_j = Σ |a_i| ‖σ_i^j‖_j`.
    pub fn mass(&self) -> S {
        compensated_sum(self.terms.iter().map(|t| t.coeff.abs() * t.cell.mass()))
    }

    /// Inclusion–exclusion expansion into a polyhedral chain (not
    /// canonicalized).
    pub fn expand(&self) -> PolyChain<S> {
        let mut terms = Vec::with_capacity(self.terms.len() << self.order);
        for t in &self.terms {
            for (s, cell) in t.cell.expand() {
                terms.push(Term { coeff: t.coeff * s, cell });
            }
        }
        PolyChain::from_terms(self.n, self.k, terms).expect("expansion keeps the shape")
    }
}
