//! Integration of forms over cells and polyhedral chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::FormField;
use crate::chains::{Cell, PolyChain, Simplex};
use crate::error::{ChainletError, Result};
use crate::exterior::{frame_to_kvector, Blade};
use crate::quadrature::{integrate, Domain, QuadOptions, QuadResult};
use crate::scalar::{compensated_sum, Scalar};

/// `∫_σ ω` to absolute tolerance `tol`.
pub fn integrate_cell<S: Scalar>(form: &FormField<S>, cell: &Cell<S>, tol: S) -> Result<S> {
    integrate_cell_with(form, cell, tol, QuadOptions::default()).map(|r| r.value)
}

pub fn integrate_cell_with<S: Scalar>(form: &FormField<S>, cell: &Cell<S>, tol: S, opts: QuadOptions) -> Result<QuadResult<S>> {
    if cell.ambient() != form.ambient() {
        return Err(ChainletError::DimensionMismatch { expected: form.ambient(), found: cell.ambient() });
    }
    if cell.dim() != form.degree() {
        return Err(ChainletError::DimensionMismatch { expected: form.degree(), found: cell.dim() });
    }
    // The tangent k-vector of the parametrization is constant on a cell.
    let (weights, origin, frame, domain) = match cell {
        Cell::Simplex(s) => {
            let edges = s.edges();
            let w = frame_to_kvector(s.ambient(), &edges)?;
            (w, s.vertices()[0].clone(), edges, Domain::unit_simplex(s.dim()))
        }
        Cell::Cube(c) => {
            let k = c.dim();
            let edge = c.edge();
            let frame: Vec<Vec<S>> = c.frame().iter().map(|a| a.iter().map(|&x| x * edge).collect()).collect();
            let sign = if c.sign() > 0 { S::one() } else { -S::one() };
            let w = frame_to_kvector(c.ambient(), &frame)?.scale(sign);
            let mut origin = c.center().to_vec();
            for a in &frame {
                origin.iter_mut().zip(a).for_each(|(o, &ai)| *o = *o - ai * S::lit(0.5));
            }
            if k == 0 {
                (w, origin, frame, Domain::Box { lo: Vec::new(), hi: Vec::new() })
            } else {
                (w, origin, frame, Domain::unit_box(k))
            }
        }
    };
    let terms: Vec<(S, &super::Component<S>)> =
        weights.iter().filter_map(|(b, w): (Blade, S)| form.component(b).map(|c| (w, c))).collect();
    if terms.is_empty() {
        return Ok(QuadResult { value: S::zero(), error: S::zero(), regions: 0 });
    }
    let n = cell.ambient();
    let integrand = |t: &[S]| -> S {
        let mut x = origin.clone();
        for (ti, a) in t.iter().zip(&frame) {
            for i in 0..n {
                x[i] = x[i] + *ti * a[i];
            }
        }
        terms.iter().map(|(w, c)| *w * c.eval(&x)).sum()
    };
    integrate(integrand, domain, tol, opts)
}

/// `Σ a_i ∫_{σ_i} ω`, each term to `tol/(m |a_i|)`, evaluated in parallel
/// and summed in term order.
pub fn integrate_chain<S: Scalar>(form: &FormField<S>, chain: &PolyChain<S>, tol: S) -> Result<S> {
    integrate_chain_with(form, chain, tol, QuadOptions::default())
}

pub fn integrate_chain_with<S: Scalar>(form: &FormField<S>, chain: &PolyChain<S>, tol: S, opts: QuadOptions) -> Result<S> {
    if chain.is_empty() {
        if chain.ambient() != form.ambient() {
            return Err(ChainletError::DimensionMismatch { expected: form.ambient(), found: chain.ambient() });
        }
        return Ok(S::zero());
    }
    let m = S::lit(chain.len() as f64);
    let parts: Vec<Result<S>> = chain
        .terms()
        .par_iter()
        .map(|t| {
            let tol_i = tol / (m * t.coeff.abs());
            integrate_cell_with(form, &t.cell, tol_i, opts).map(|r| t.coeff * r.value).map_err(|e| match e {
                ChainletError::NonConvergence { partial, error_estimate } => ChainletError::NonConvergence {
                    partial: partial * t.coeff.as_f64(),
                    error_estimate: error_estimate * t.coeff.abs().as_f64(),
                },
                e => e,
            })
        })
        .collect();
    let mut values = Vec::with_capacity(parts.len());
    let mut failed: Option<(f64, f64)> = None;
    for p in parts {
        match p {
            Ok(v) => values.push(v),
            Err(ChainletError::NonConvergence { partial, error_estimate }) => {
                values.push(S::lit(partial));
                let f = failed.get_or_insert((0.0, 0.0));
                f.1 += error_estimate;
            }
            Err(e) => return Err(e),
        }
    }
    let total = compensated_sum(values);
    match failed {
        Some((_, err)) => Err(ChainletError::NonConvergence { partial: total.as_f64(), error_estimate: err }),
        None => Ok(total),
    }
}

/// Stokes on three small random simplices: `∫_{∂σ} ω` against `∫_σ dω`.
pub(crate) fn stokes_self_check<S: Scalar>(form: &FormField<S>, d: &FormField<S>) -> Result<()> {
    let n = form.ambient();
    let k = form.degree() + 1;
    if k > n {
        return Err(ChainletError::GradeOverflow { grade: k, ambient: n });
    }
    let (lo, hi) = match form.support_region() {
        Some((a, b)) => (a.to_vec(), b.to_vec()),
        None => (vec![S::lit(-1.0); n], vec![S::one(); n]),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_d);
    let tol = S::tol(1e-10);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 3 && attempts < 50 {
        attempts += 1;
        let base: Vec<S> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * S::lit(rng.gen_range(0.2..0.6))).collect();
        let mut verts = vec![base.clone()];
        for _ in 0..k {
            verts.push(
                (0..n).map(|i| base[i] + (hi[i] - lo[i]) * S::lit(rng.gen_range(-0.15..0.15))).collect(),
            );
        }
        let Ok(s) = Simplex::new(verts) else { continue };
        let chain = PolyChain::from_cell(s);
        let lhs = integrate_chain(form, &chain.boundary(), tol)?;
        let rhs = integrate_chain(d, &chain, tol)?;
        let disc = (lhs - rhs).abs();
        if disc > S::tol(1e-6) * S::one().max(lhs.abs() + rhs.abs()) {
            return Err(ChainletError::InconsistentDerivative { discrepancy: disc.as_f64() });
        }
        checked += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Cube;
    use crate::forms::Poly;
    use crate::exterior::KVector;

    #[test]
    fn x_dy_over_unit_square() {
        let w = FormField::zero(2, 1).unwrap().with_poly(&[1], Poly::var(2, 0)).unwrap();
        let sq = PolyChain::<f64>::unit_cube(2, &[0, 1]).unwrap();
        let v = integrate_chain(&w, &sq.boundary(), 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let d = w.d().unwrap();
        assert!((integrate_chain(&d, &sq, 1e-12).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_form_pairs_with_vec() {
        let kv = &KVector::basis(3, &[0, 1]).unwrap() * 2.0;
        let w = FormField::constant(&(&kv + &KVector::basis(3, &[1, 2]).unwrap()));
        let s = Simplex::new(vec![vec![0.1, 0.0, 0.3], vec![1.0, 0.2, 0.0], vec![0.0, 0.7, 0.5]]).unwrap();
        let c: Cell<f64> = s.into();
        let v = integrate_cell(&w, &c, 1e-12).unwrap();
        assert!((v - w.eval(&[0.0; 3], &c.vec())).abs() < 1e-14);
    }

    #[test]
    fn orientation_reversal_negates() {
        let w = FormField::zero(2, 2).unwrap().with_fn(&[0, 1], |x: &[f64]| (x[0] * x[1]).cos()).unwrap();
        let c = Cube::axis(vec![0.3, 0.1], &[0, 1], 0.5, 1).unwrap();
        let a = integrate_cell(&w, &c.clone().into(), 1e-12).unwrap();
        let b = integrate_cell(&w, &c.with_sign(-1).into(), 1e-12).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn wrong_analytic_derivative_is_caught() {
        let w = FormField::zero(2, 1).unwrap().with_poly(&[1], Poly::var(2, 0)).unwrap();
        let bad = FormField::<f64>::basis(2, &[0, 1]).unwrap().scale(2.0);
        assert!(matches!(w.clone().with_analytic_d(bad), Err(ChainletError::InconsistentDerivative { .. })));
        let good = FormField::<f64>::basis(2, &[0, 1]).unwrap();
        assert!(w.with_analytic_d(good).is_ok());
    }
}
