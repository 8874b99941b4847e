//! Sampled lower estimates of the form norms `|ω|_r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{integrate_cell, FormField};
use crate::chains::{Cell, Simplex};
use crate::error::Result;
use crate::geom;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormBudget {
    /// Random cells per seminorm term.
    pub samples: usize,
    pub seed: u64,
}

impl Default for NormBudget {
    fn default() -> Self {
        NormBudget { samples: 48, seed: 7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormNorm<S> {
    /// Largest sampled difference quotient; never above the true norm up to
    /// quadrature error.
    pub lower_estimate: S,
    /// The attached analytic value, when the form carries one.
    pub exact: Option<S>,
}

impl<S: Scalar> FormNorm<S> {
    pub fn is_certified(&self) -> bool {
        self.exact.is_some()
    }

    /// The exact value when known, otherwise the sampled estimate.
    pub fn value(&self) -> S {
        self.exact.unwrap_or(self.lower_estimate)
    }
}

fn inside<S: Scalar>(p: &[S], lo: &[S], hi: &[S]) -> bool {
    p.iter().zip(lo.iter().zip(hi)).all(|(&x, (&a, &b))| x >= a && x <= b)
}

fn random_unit<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Vec<S> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-8 {
            return v.into_iter().map(|x| S::lit(x / len)).collect();
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// `sup |∫_{σ^j} ω| / ‖σ^j‖_j` over random order-`j` diffcells of `m`-simplices
/// inside the box.
fn sample_seminorm<S: Scalar>(form: &FormField<S>, j: usize, lo: &[S], hi: &[S], budget: NormBudget, salt: u64) -> Result<S> {
    let n = form.ambient();
    let m = form.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut best = S::zero();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < budget.samples && attempts < budget.samples * 50 {
        attempts += 1;
        let base: Vec<S> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * S::lit(rng.gen_range(0.0..1.0))).collect();
        let len = S::lit(log_uniform(&mut rng, 1e-3, 1.0));
        let mut verts = vec![base.clone()];
        for _ in 0..m {
            verts.push(geom::axpy(&base, len, &random_unit(&mut rng, n)));
        }
        let Ok(s) = Simplex::new(verts) else { continue };
        let vs: Vec<Vec<S>> =
            (0..j).map(|_| geom::scaled(&random_unit(&mut rng, n), S::lit(log_uniform(&mut rng, 1e-3, 1.0)))).collect();
        let mut copies: Vec<(S, Cell<S>)> = Vec::with_capacity(1 << j);
        let mut ok = true;
        for mask in 0..1usize << j {
            let mut shift = vec![S::zero(); n];
            for (i, v) in vs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    shift = geom::add(&shift, v);
                }
            }
            let c = s.translate(&shift);
            if !c.vertices().iter().all(|p| inside(p, lo, hi)) {
                ok = false;
                break;
            }
            let sign = if mask.count_ones() % 2 == 0 { S::one() } else { -S::one() };
            copies.push((sign, c.into()));
        }
        if !ok {
            continue;
        }
        let mass = s.mass() * vs.iter().map(|v| geom::norm(v)).fold(S::one(), |a, b| a * b);
        let tol = S::tol(1e-12) * mass;
        let mut total = S::zero();
        for (sign, c) in &copies {
            total = total + *sign * integrate_cell(form, c, tol)?;
        }
        best = best.max(total.abs() / mass);
        accepted += 1;
    }
    Ok(best)
}

/// `|ω|_r = max{‖ω‖_0, …, ‖ω‖_r, ‖dω‖_0, …, ‖dω‖_{r−1}}`: sampled from below
/// over cells and translations inside `region`, exact when the form carries
/// analytic norms.
pub fn form_norm<S: Scalar>(form: &FormField<S>, r: usize, region: (&[S], &[S]), budget: NormBudget) -> Result<FormNorm<S>> {
    let (lo, hi) = region;
    let mut best = S::zero();
    for j in 0..=r {
        best = best.max(sample_seminorm(form, j, lo, hi, budget, j as u64)?);
    }
    if r > 0 && form.degree() < form.ambient() {
        let d = form.d()?;
        for j in 0..r {
            best = best.max(sample_seminorm(&d, j, lo, hi, budget, 100 + j as u64)?);
        }
    }
    Ok(FormNorm { lower_estimate: best, exact: form.exact_norm(r) })
}
