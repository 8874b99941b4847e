//! Flat and r-natural norms of polyhedral chains as certified brackets.
//!
//! Upper bounds come from explicit decompositions `P = Σ_j D^j + ∂C`; lower
//! bounds from pairing with forms of known norm. A decomposition is accepted
//! only after the integration oracle confirms that it recomposes the chain.

mod diff;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use diff::{DiffCell, DiffChain, DiffTerm, DEFAULT_R_MAX};

use crate::chains::PolyChain;
use crate::error::{ChainletError, Result};
use crate::forms::{integrate_cell, integrate_chain, oracle_dictionary, FormField};
use crate::scalar::{compensated_sum, Scalar};

/// Relative tolerance of the recomposition check.
pub const ORACLE_TOL: f64 = 1e-9;

/// A decomposition `P = Σ_{j≤r} D^j + ∂C`. The certificate for `C` at order
/// `r − 1`, when present, bounds `|C|^♮(r−1)`; otherwise `M(C)` is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Decomposition<S = f64> {
    pub r: usize,
    pub d: Vec<DiffChain<S>>,
    #[serde(default)]
    pub c: Option<PolyChain<S>>,
    #[serde(default)]
    pub c_certificate: Option<Box<Decomposition<S>>>,
}

impl<S: Scalar> Decomposition<S> {
    /// `D^0 = P`, nothing else.
    pub fn trivial(p: &PolyChain<S>, r: usize) -> Result<Self> {
        let mut d = vec![DiffChain::from_chain(&p.canonicalize())];
        for j in 1..=r.min(DEFAULT_R_MAX) {
            d.push(DiffChain::zero(p.ambient(), p.grade(), j)?);
        }
        Ok(Decomposition { r, d, c: None, c_certificate: None })
    }

    /// `∂P = 0 + ∂P`: the certificate for `∂P` at order `r + 1` built from
    /// one for `P` at order `r`.
    pub fn boundary_of(p: &PolyChain<S>, cert: Decomposition<S>) -> Result<Self> {
        if p.grade() == 0 {
            return Err(ChainletError::Invalid("a 0-chain has no boundary certificate".into()));
        }
        let r = cert.r + 1;
        let d = (0..=r.min(DEFAULT_R_MAX)).map(|j| DiffChain::zero(p.ambient(), p.grade() - 1, j)).collect::<Result<_>>()?;
        Ok(Decomposition { r, d, c: Some(p.clone()), c_certificate: Some(Box::new(cert)) })
    }

    /// `Σ_j ‖D^j‖_j + |C|`, with `|C|` from the nested certificate or `M(C)`.
    pub fn value(&self) -> S {
        let dm = compensated_sum(self.d.iter().map(DiffChain::mass));
        let cm = match (&self.c, &self.c_certificate) {
            (_, Some(cc)) => cc.value(),
            (Some(c), None) => c.mass(),
            (None, None) => S::zero(),
        };
        dm + cm
    }

    /// `Σ_j expand(D^j) + ∂C`, not canonicalized.
    pub fn recompose(&self) -> Result<PolyChain<S>> {
        let first = self.d.first().ok_or_else(|| ChainletError::Invalid("decomposition without D^0".into()))?;
        let mut out = PolyChain::zero(first.ambient(), first.grade())?;
        for dj in &self.d {
            out = out.add(&dj.expand())?;
        }
        if let Some(c) = &self.c {
            out = out.add(&c.boundary())?;
        }
        Ok(out)
    }

    /// Largest diffcell order actually used.
    pub fn max_order(&self) -> usize {
        self.d.iter().filter(|dj| !dj.is_empty()).map(DiffChain::order).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decompositions serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ChainletError::Invalid(e.to_string()))
    }

    fn check_shape(&self, p: &PolyChain<S>, r: usize) -> Result<()> {
        if self.r > r {
            return Err(ChainletError::Invalid(format!("certificate of order {} used for r = {r}", self.r)));
        }
        for (j, dj) in self.d.iter().enumerate() {
            if dj.order() != j {
                return Err(ChainletError::Invalid(format!("D^{j} has order {}", dj.order())));
            }
            if dj.ambient() != p.ambient() || dj.grade() != p.grade() {
                return Err(ChainletError::DimensionMismatch { expected: p.grade(), found: dj.grade() });
            }
            if j > r && !dj.is_empty() {
                return Err(ChainletError::Invalid(format!("D^{j} is not allowed at r = {r}")));
            }
        }
        if let Some(c) = &self.c {
            if r == 0 {
                return Err(ChainletError::Invalid("no ∂C term at r = 0".into()));
            }
            if c.ambient() != p.ambient() || c.grade() != p.grade() + 1 {
                return Err(ChainletError::DimensionMismatch { expected: p.grade() + 1, found: c.grade() });
            }
        }
        Ok(())
    }
}

/// A certified upper bound and the decomposition realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Upper<S = f64> {
    pub value: S,
    pub certificate: Decomposition<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct NormBracket<S = f64> {
    pub r: usize,
    pub lower: S,
    pub upper: S,
    pub certificate: Decomposition<S>,
    /// Name of the form realizing the lower bound.
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    /// Oracle-check search results as well as hints.
    pub verify: bool,
    /// Largest number of cells a dyadic refinement may produce.
    pub refine_budget: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { verify: true, refine_budget: 1 << 20 }
    }
}

/// `(Σ a_i ∫_{σ_i} ω, Σ |a_i ∫_{σ_i} ω|)`.
fn signed_and_abs<S: Scalar>(form: &FormField<S>, p: &PolyChain<S>) -> Result<(S, S)> {
    let parts: Vec<S> = p
        .terms()
        .par_iter()
        .map(|t| {
            let tol = S::tol(1e-13) * t.cell.mass().max(S::min_positive_value());
            integrate_cell(form, &t.cell, tol).map(|v| t.coeff * v)
        })
        .collect::<Result<_>>()?;
    Ok((compensated_sum(parts.iter().copied()), compensated_sum(parts.iter().map(|x| x.abs()))))
}

/// Largest relative disagreement `|∫_a ω − ∫_b ω| / max(1, scale)` over the
/// fixed oracle dictionary.
pub fn oracle_discrepancy<S: Scalar>(a: &PolyChain<S>, b: &PolyChain<S>) -> Result<f64> {
    if a.ambient() != b.ambient() || a.grade() != b.grade() {
        return Err(ChainletError::DimensionMismatch { expected: a.grade(), found: b.grade() });
    }
    let mut worst = 0f64;
    for form in oracle_dictionary::<S>(a.ambient(), a.grade())? {
        let (va, sa) = signed_and_abs(&form, a)?;
        let (vb, sb) = signed_and_abs(&form, b)?;
        let scale = 1f64.max(sa.as_f64()).max(sb.as_f64());
        worst = worst.max((va - vb).abs().as_f64() / scale);
    }
    Ok(worst)
}

fn check_recomposition<S: Scalar>(p: &PolyChain<S>, recomposed: &PolyChain<S>) -> Result<()> {
    let disc = oracle_discrepancy(p, recomposed)?;
    let tol = ORACLE_TOL.max(S::epsilon().as_f64() * 1e3);
    if disc > tol {
        return Err(ChainletError::CertificateMismatch { discrepancy: disc });
    }
    Ok(())
}

/// Upper bound on `|P|^♮r`. With a hint the hint is checked and evaluated;
/// without one the built-in pairing search runs and the better of its
/// result and `M(P)` is returned.
pub fn natural_upper<S: Scalar>(p: &PolyChain<S>, r: usize, hint: Option<&Decomposition<S>>) -> Result<Upper<S>> {
    natural_upper_with(p, r, hint, NormOptions::default())
}

pub fn natural_upper_with<S: Scalar>(
    p: &PolyChain<S>,
    r: usize,
    hint: Option<&Decomposition<S>>,
    opts: NormOptions,
) -> Result<Upper<S>> {
    if r > DEFAULT_R_MAX {
        return Err(ChainletError::Invalid(format!("r = {r} exceeds {DEFAULT_R_MAX}")));
    }
    if let Some(h) = hint {
        h.check_shape(p, r)?;
        check_recomposition(p, &h.recompose()?)?;
        let mut cert = h.clone();
        if let Some(c) = &h.c {
            let inner = natural_upper_with(c, r - 1, h.c_certificate.as_deref(), opts)?;
            cert.c_certificate = Some(Box::new(inner.certificate));
        }
        return Ok(Upper { value: cert.value(), certificate: cert });
    }
    let trivial = Decomposition::trivial(p, r)?;
    if r == 0 {
        return Ok(Upper { value: trivial.value(), certificate: trivial });
    }
    let found = search::search(p, r, opts.refine_budget)?;
    let (tv, fv) = (trivial.value(), found.value());
    if fv >= tv {
        return Ok(Upper { value: tv, certificate: trivial });
    }
    if opts.verify {
        check_recomposition(p, &found.recompose()?)?;
    }
    Ok(Upper { value: fv, certificate: found })
}

/// Lower bound on `|P|^♮r` by duality: `max |∫_P ω| / |ω|_r` over the
/// dictionary, together with the constant form along `Vec(P)`. Quadrature
/// error is subtracted before dividing.
pub fn natural_lower<S: Scalar>(p: &PolyChain<S>, r: usize, dictionary: &[FormField<S>]) -> Result<(S, String)> {
    let mut best = (S::zero(), String::from("none"));
    let tol = S::tol(1e-12) * S::one().max(p.formal_mass());
    for form in dictionary {
        let norm = form.exact_norm(r).ok_or_else(|| ChainletError::MissingExactNorm(form.name().to_string()))?;
        if form.ambient() != p.ambient() || form.degree() != p.grade() {
            return Err(ChainletError::DimensionMismatch { expected: p.grade(), found: form.degree() });
        }
        if norm <= S::zero() {
            continue;
        }
        let v = integrate_chain(form, p, tol)?;
        let lower = ((v.abs() - tol) / norm).max(S::zero());
        if lower > best.0 {
            best = (lower, form.name().to_string());
        }
    }
    // ω = Vec(P)/|Vec(P)| has comass at most its Euclidean norm 1, so
    // |ω|_r ≤ 1 for every r.
    let vec = p.vec();
    let m = vec.mass();
    if m > S::zero() {
        let v = vec.dot(&vec.scale(S::one() / m));
        let slack = S::epsilon() * S::lit(64.0) * S::one().max(p.formal_mass());
        let lower = (v - slack).max(S::zero());
        if lower > best.0 {
            best = (lower, "vec".to_string());
        }
    }
    Ok(best)
}

/// `natural_lower` and `natural_upper` (search, no hint) together.
pub fn natural_bracket<S: Scalar>(p: &PolyChain<S>, r: usize, dictionary: &[FormField<S>]) -> Result<NormBracket<S>> {
    let (lower, witness) = natural_lower(p, r, dictionary)?;
    let up = natural_upper(p, r, None)?;
    Ok(NormBracket { r, lower, upper: up.value, certificate: up.certificate, witness })
}

/// Upper bound on the flat norm: `min(M(P), M(B) + M(C))` for an
/// oracle-checked hint `P = B + ∂C`.
pub fn flat_upper<S: Scalar>(p: &PolyChain<S>, hint: Option<(&PolyChain<S>, &PolyChain<S>)>) -> Result<S> {
    let trivial = p.mass();
    let Some((b, c)) = hint else { return Ok(trivial) };
    if b.ambient() != p.ambient() || b.grade() != p.grade() {
        return Err(ChainletError::DimensionMismatch { expected: p.grade(), found: b.grade() });
    }
    if c.ambient() != p.ambient() || c.grade() != p.grade() + 1 {
        return Err(ChainletError::DimensionMismatch { expected: p.grade() + 1, found: c.grade() });
    }
    check_recomposition(p, &b.add(&c.boundary())?)?;
    Ok(trivial.min(b.mass() + c.mass()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{Cube, Simplex};
    use crate::forms::exact_dictionary;

    fn qcube(center: Vec<f64>, axes: &[usize], level: i32) -> PolyChain<f64> {
        let k = axes.len() as i32;
        let mut p = PolyChain::zero(center.len(), axes.len()).unwrap();
        p.push(2f64.powi(k * level), Cube::axis(center, axes, 2f64.powi(-level), 1).unwrap()).unwrap();
        p
    }

    #[test]
    fn r_zero_is_mass() {
        let p = qcube(vec![0.1, 0.2], &[0, 1], 3);
        let u = natural_upper(&p, 0, None).unwrap();
        assert_eq!(u.value, 1.0);
    }

    #[test]
    fn q_difference_meets_the_cauchy_bound() {
        for l in 1..4 {
            let p = qcube(vec![0.0, 0.0], &[0, 1], l).sub(&qcube(vec![0.0, 0.0], &[0, 1], l + 2)).unwrap();
            let u = natural_upper(&p, 1, None).unwrap();
            assert!(u.value <= 2f64.powi(-l), "l={l}: {}", u.value);
            assert_eq!(u.certificate.max_order(), 1);
        }
    }

    #[test]
    fn translated_pair_costs_mass_times_distance() {
        let s = Simplex::<f64>::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let v = [0.0, 0.25];
        let mut p = PolyChain::from_cell(s.clone());
        p.push(-1.0, s.translate(&v)).unwrap();
        let u = natural_upper(&p, 1, None).unwrap();
        assert!((u.value - 0.25).abs() < 1e-15);
        assert_eq!(natural_upper(&p, 0, None).unwrap().value, 2.0);
    }

    #[test]
    fn bad_hint_is_rejected() {
        let p = qcube(vec![0.0, 0.0], &[0, 1], 0);
        let wrong = Decomposition::trivial(&qcube(vec![0.5, 0.0], &[0, 1], 0), 1).unwrap();
        assert!(matches!(natural_upper(&p, 1, Some(&wrong)), Err(ChainletError::CertificateMismatch { .. })));
    }

    #[test]
    fn boundary_certificate_bounds_boundary_norm() {
        let p = qcube(vec![0.0, 0.0], &[0, 1], 2).sub(&qcube(vec![0.0, 0.0], &[0, 1], 3)).unwrap();
        let up = natural_upper(&p, 1, None).unwrap();
        let cert = Decomposition::boundary_of(&p, up.certificate.clone()).unwrap();
        let ub = natural_upper(&p.boundary(), 2, Some(&cert)).unwrap();
        assert!(ub.value <= up.value + 1e-15);
        let json = cert.to_json();
        assert_eq!(Decomposition::<f64>::from_json(&json).unwrap(), cert);
    }

    #[test]
    fn lower_from_dx_on_unit_segment() {
        let p = PolyChain::<f64>::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let dict = exact_dictionary(2, 1, 2.0).unwrap();
        let (lo, _) = natural_lower(&p, 1, &dict).unwrap();
        assert!((lo - 1.0).abs() < 1e-10 && lo <= 1.0);
        let b = natural_bracket(&p, 1, &dict).unwrap();
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn flat_of_boundary_is_at_most_area() {
        let sq = PolyChain::<f64>::unit_cube(2, &[0, 1]).unwrap();
        let bd = sq.boundary();
        let empty = PolyChain::zero(2, 1).unwrap();
        assert_eq!(flat_upper(&bd, Some((&empty, &sq))).unwrap(), 1.0);
        assert_eq!(flat_upper(&bd, None).unwrap(), 4.0);
        let bad = PolyChain::<f64>::unit_cube(2, &[0, 1]).unwrap().scale(2.0);
        assert!(flat_upper(&bd, Some((&empty, &bad))).is_err());
    }
}
