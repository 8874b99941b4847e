//! Chainlets as level-indexed approximation sequences.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coboundary_at_level, laplace_at_level, star_at_level};
use crate::chains::PolyChain;
use crate::error::{ChainletError, Result};
use crate::norms::natural_upper;
use crate::scalar::Scalar;

/// Certified `|A(to) − A(from)|^♮r` upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CauchyEntry<S = f64> {
    pub from: i32,
    pub to: i32,
    pub upper: S,
}

/// A chainlet of class `N^r`, represented by its approximations `ℓ ↦ A(ℓ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ChainletSeq<S = f64> {
    r: usize,
    levels: BTreeMap<i32, PolyChain<S>>,
    #[serde(default)]
    cauchy_log: Vec<CauchyEntry<S>>,
}

impl<S: Scalar> ChainletSeq<S> {
    pub fn from_levels(r: usize, levels: impl IntoIterator<Item = (i32, PolyChain<S>)>) -> Result<Self> {
        let levels: BTreeMap<i32, PolyChain<S>> = levels.into_iter().collect();
        let mut shape = None;
        for p in levels.values() {
            let s = (p.ambient(), p.grade());
            if *shape.get_or_insert(s) != s {
                return Err(ChainletError::DimensionMismatch { expected: shape.unwrap().1, found: s.1 });
            }
        }
        Ok(ChainletSeq { r, levels, cauchy_log: Vec::new() })
    }

    /// Levels computed independently, in parallel.
    pub fn from_fn(r: usize, levels: impl IntoIterator<Item = i32>, f: impl Fn(i32) -> Result<PolyChain<S>> + Sync) -> Result<Self> {
        let ls: Vec<i32> = levels.into_iter().collect();
        let chains = ls.par_iter().map(|&l| f(l).map(|p| (l, p))).collect::<Result<Vec<_>>>()?;
        ChainletSeq::from_levels(r, chains)
    }

    /// The same chain at every level.
    pub fn constant(r: usize, p: &PolyChain<S>, levels: impl IntoIterator<Item = i32>) -> Result<Self> {
        ChainletSeq::from_levels(r, levels.into_iter().map(|l| (l, p.clone())))
    }

    pub fn class(&self) -> usize {
        self.r
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> + '_ {
        self.levels.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &PolyChain<S>)> + '_ {
        self.levels.iter().map(|(&l, p)| (l, p))
    }

    pub fn level(&self, l: i32) -> Result<&PolyChain<S>> {
        self.levels.get(&l).ok_or(ChainletError::MissingLevel(l as u32))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn cauchy_log(&self) -> &[CauchyEntry<S>] {
        &self.cauchy_log
    }

    /// Records `natural_upper(A(ℓ_{i+1}) − A(ℓ_i), r)` for consecutive levels.
    pub fn with_cauchy_log(mut self) -> Result<Self> {
        let ls: Vec<i32> = self.levels().collect();
        let r = self.r.min(crate::norms::DEFAULT_R_MAX);
        let log = ls
            .par_windows(2)
            .map(|w| {
                let diff = self.levels[&w[1]].sub(&self.levels[&w[0]])?;
                Ok(CauchyEntry { from: w[0], to: w[1], upper: natural_upper(&diff, r, None)?.value })
            })
            .collect::<Result<Vec<_>>>()?;
        self.cauchy_log = log;
        Ok(self)
    }

    /// Whether the recorded consecutive differences decay geometrically
    /// (or vanish), so that their sum is finite.
    pub fn is_summable(&self) -> bool {
        if self.cauchy_log.len() < 2 {
            return false;
        }
        let scale = self.levels.values().map(|p| p.formal_mass().as_f64()).fold(1.0, f64::max);
        if self.cauchy_log.iter().all(|e| e.upper.as_f64() <= 1e-12 * scale) {
            return true;
        }
        let pts: Vec<(i32, f64)> = self.cauchy_log.iter().map(|e| (e.to, e.upper.as_f64())).collect();
        pts.len() >= 3 && crate::harness::convergence_rate(&pts).map(|r| r.slope > 0.0 && r.r2 >= 0.9).unwrap_or(false)
    }

    fn map(&self, r: usize, f: impl Fn(&PolyChain<S>, i32) -> Result<PolyChain<S>> + Sync) -> Result<Self> {
        let out = ChainletSeq::from_fn(r, self.levels().collect::<Vec<_>>(), |l| f(&self.levels[&l], l))?;
        if self.cauchy_log.is_empty() {
            Ok(out)
        } else {
            out.with_cauchy_log()
        }
    }

    /// `ℓ ↦ ∂A(ℓ)`.
    pub fn boundary(&self) -> Result<Self> {
        self.map(self.r + 1, |p, _| Ok(p.boundary().canonicalize()))
    }

    /// `ℓ ↦ cubeize(⋆ elementize(A(ℓ), ℓ), ℓ)`.
    pub fn star(&self) -> Result<Self> {
        self.map(self.r, |p, l| star_at_level(p, l))
    }

    /// `ℓ ↦ ⋆∂⋆ A(ℓ)` with both stars taken at level `ℓ`.
    pub fn coboundary(&self) -> Result<Self> {
        self.map(self.r + 1, |p, l| coboundary_at_level(p, l))
    }

    /// `ℓ ↦ (∂◇ + ◇∂) A(ℓ)`.
    pub fn laplace(&self) -> Result<Self> {
        self.map(self.r + 2, |p, l| laplace_at_level(p, l))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let levels = self
            .levels
            .iter()
            .map(|(&l, p)| Ok((l, p.add(other.level(l)?)?)))
            .collect::<Result<Vec<_>>>()?;
        ChainletSeq::from_levels(self.r.max(other.r), levels)
    }

    pub fn scale(&self, s: S) -> Self {
        ChainletSeq {
            r: self.r,
            levels: self.levels.iter().map(|(&l, p)| (l, p.scale(s))).collect(),
            cauchy_log: self.cauchy_log.iter().map(|e| CauchyEntry { upper: e.upper * s.abs(), ..*e }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::KDirection;
    use crate::elements::qcube;

    #[test]
    fn q_sequence_is_summable() {
        let a = KDirection::<f64>::axis(2, &[0, 1]).unwrap();
        let seq = ChainletSeq::from_fn(1, 1..6, |l| qcube(&[0.0, 0.0], &a, l)).unwrap().with_cauchy_log().unwrap();
        assert_eq!(seq.cauchy_log().len(), 4);
        for e in seq.cauchy_log() {
            assert!(e.upper <= 2f64.powi(-e.from));
        }
        assert!(seq.is_summable());
    }

    #[test]
    fn star_preserves_mass_per_level() {
        let sq = PolyChain::<f64>::unit_cube(3, &[0, 1]).unwrap();
        let a = ChainletSeq::constant(1, &sq, 1..4).unwrap();
        let s = a.star().unwrap();
        for (l, p) in s.iter() {
            assert!((p.mass() - 1.0).abs() < 1e-9, "level {l}");
            assert_eq!(p.grade(), 1);
        }
    }
}
