//! Theorem-verification experiments. Each compares two integrals level by
//! level and wraps the result in an [`ExperimentReport`].

use std::time::Instant;

use rayon::prelude::*;

use super::report::{ExperimentReport, LevelRow};
use crate::chains::PolyChain;
use crate::elements::{cubeize, elementize, pushforward, star_at_level, ChainletSeq};
use crate::error::{ChainletError, Result};
use crate::forms::{FormField, SmoothMap};
use crate::scalar::Scalar;

/// Quadrature tolerance used by the chainlet-level experiments.
pub const QUAD_TOL: f64 = 1e-11;

fn qtol<S: Scalar>() -> S {
    S::tol(QUAD_TOL)
}

fn sign(e: usize) -> f64 {
    if e % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(−1)^{k(n−k)}`, the sign in `∫_{⋆A} ω = ± ∫_A ⋆ω`.
pub fn star_sign(n: usize, k: usize) -> f64 {
    sign(k * (n - k))
}

/// Sign of `∫_{⋆∂A} ω = ± ∫_A d⋆ω`, composed from Stokes and the star
/// theorem applied to the `(k−1)`-chain `∂A`: `(−1)^{(k−1)(n−k+1)}`.
pub fn gauss_sign(n: usize, k: usize) -> f64 {
    sign((k - 1) * (n - k + 1))
}

/// `(−1)^{(k−1)(n−k−1)}`, the other printed form of the Gauss sign. The
/// exponents differ by `2(k−1)`, so it always equals [`gauss_sign`].
pub fn alt_gauss_sign(n: usize, k: usize) -> f64 {
    let e = (k as i64 - 1) * (n as i64 - k as i64 - 1);
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn rows<S: Scalar>(
    a: &ChainletSeq<S>,
    f: impl Fn(i32, &PolyChain<S>) -> Result<(S, S)> + Sync,
) -> Result<Vec<LevelRow>> {
    let levels: Vec<(i32, &PolyChain<S>)> = a.iter().collect();
    levels
        .par_iter()
        .map(|&(l, p)| f(l, p).map(|(x, y)| LevelRow::new(l, x.as_f64(), y.as_f64())))
        .collect()
}

fn expect_degree<S: Scalar>(form: &FormField<S>, n: usize, k: usize) -> Result<()> {
    if form.ambient() != n {
        return Err(ChainletError::DimensionMismatch { expected: n, found: form.ambient() });
    }
    if form.degree() != k {
        return Err(ChainletError::DimensionMismatch { expected: k, found: form.degree() });
    }
    Ok(())
}

fn shape<S: Scalar>(a: &ChainletSeq<S>) -> Result<(usize, usize)> {
    let (_, p) = a.iter().next().ok_or_else(|| ChainletError::Invalid("empty chainlet sequence".into()))?;
    Ok((p.ambient(), p.grade()))
}

/// `∫_{∂P} ω` against `∫_P dω`, each integrated to `tol`.
pub fn verify_stokes<S: Scalar>(p: &PolyChain<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    if p.grade() == 0 {
        return Err(ChainletError::Invalid("Stokes needs a chain of grade at least 1".into()));
    }
    expect_degree(form, p.ambient(), p.grade() - 1)?;
    let dw = form.d()?;
    let lhs = form.integrate_chain(&p.boundary(), S::lit(tol))?;
    let rhs = dw.integrate_chain(p, S::lit(tol))?;
    let rows = vec![LevelRow::new(0, lhs.as_f64(), rhs.as_f64())];
    Ok(ExperimentReport::new(format!("stokes[{}]", form.name()), rows, 2.0 * tol, t0))
}

/// Stokes level by level on a chainlet sequence.
pub fn verify_stokes_seq<S: Scalar>(a: &ChainletSeq<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    if k == 0 {
        return Err(ChainletError::Invalid("Stokes needs a chain of grade at least 1".into()));
    }
    expect_degree(form, n, k - 1)?;
    let dw = form.d()?;
    let rows = rows(a, |_, p| Ok((form.integrate_chain(&p.boundary(), S::lit(tol))?, dw.integrate_chain(p, S::lit(tol))?)))?;
    Ok(ExperimentReport::new(format!("stokes[{}]", form.name()), rows, 2.0 * tol, t0))
}

/// `∫_{⋆A(ℓ)} ω` against `(−1)^{k(n−k)} ∫_{A(ℓ)} ⋆ω`.
pub fn verify_star<S: Scalar>(a: &ChainletSeq<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    expect_degree(form, n, n - k)?;
    let sw = form.star();
    let s = S::lit(star_sign(n, k));
    let rows = rows(a, |l, p| {
        let lhs = form.integrate_chain(&star_at_level(p, l)?, qtol())?;
        Ok((lhs, s * sw.integrate_chain(p, qtol())?))
    })?;
    Ok(ExperimentReport::new(format!("star[{}]", form.name()), rows, tol, t0)
        .with_note(format!("sign (-1)^(k(n-k)) = {:+}", star_sign(n, k))))
}

/// `∫_{⋆∂A(ℓ)} ω` against `σ ∫_{A(ℓ)} d⋆ω`, where `σ` is [`gauss_sign`].
pub fn verify_gauss<S: Scalar>(a: &ChainletSeq<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    if k == 0 {
        return Err(ChainletError::Invalid("Gauss needs a chain of grade at least 1".into()));
    }
    expect_degree(form, n, n - k + 1)?;
    let dsw = form.star().d()?;
    let sg = gauss_sign(n, k);
    let s = S::lit(sg);
    let rows = rows(a, |l, p| {
        let lhs = form.integrate_chain(&star_at_level(&p.boundary().canonicalize(), l)?, qtol())?;
        Ok((lhs, s * dsw.integrate_chain(p, qtol())?))
    })?;
    Ok(ExperimentReport::new(format!("gauss[{}]", form.name()), rows, tol, t0)
        .with_note(format!("sign from Stokes then star on the (k-1)-chain: (-1)^((k-1)(n-k+1)) = {sg:+}"))
        .with_note(format!("(-1)^((k-1)(n-k-1)) = {:+}", alt_gauss_sign(n, k))))
}

/// `∫_{∂A(ℓ)} ω` against `∫_{⋆A(ℓ)} ⋆dω`.
pub fn verify_green<S: Scalar>(a: &ChainletSeq<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    if k == 0 {
        return Err(ChainletError::Invalid("Green needs a chain of grade at least 1".into()));
    }
    expect_degree(form, n, k - 1)?;
    let sdw = form.d()?.star();
    let rows = rows(a, |l, p| {
        let lhs = form.integrate_chain(&p.boundary(), qtol())?;
        Ok((lhs, sdw.integrate_chain(&star_at_level(p, l)?, qtol())?))
    })?;
    Ok(ExperimentReport::new(format!("green[{}]", form.name()), rows, tol, t0))
}

/// `∫_{ΔA(ℓ)} ω` against `(−1)^{n−1} ∫_{A(ℓ)} □ω`. The tolerance is relative:
/// `rel_tol · max(|rhs|, 1)` at the final level.
pub fn verify_laplace<S: Scalar>(a: &ChainletSeq<S>, form: &FormField<S>, rel_tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    expect_degree(form, n, k)?;
    let lap = form.laplacian()?;
    let s = S::lit(sign(n - 1));
    let lp = a.laplace()?;
    let rows = rows(a, |l, p| Ok((form.integrate_chain(lp.level(l)?, qtol())?, s * lap.integrate_chain(p, qtol())?)))?;
    let scale = rows.last().map_or(1.0, |r| r.rhs.abs().max(1.0));
    let mut rep = ExperimentReport::new(format!("laplace[{}]", form.name()), rows, rel_tol * scale, t0)
        .with_note("trend-based: errors compound through level-wise operator composition");
    if !rep.errors_nonincreasing() {
        rep.notes.push("errors do not decrease monotonically".into());
    }
    Ok(rep)
}

/// `∫_{⋆∂A(ℓ)} f dx` against `∫_{A(ℓ)} f′ dx` for a 1-chain `A` in `R¹` and a
/// 0-form `f`.
pub fn verify_distribution<S: Scalar>(a: &ChainletSeq<S>, f: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    if n != 1 || k != 1 {
        return Err(ChainletError::Invalid("distribution derivative needs a 1-chain in R^1".into()));
    }
    expect_degree(f, 1, 0)?;
    let fdx = f.wedge(&FormField::basis(1, &[0])?)?;
    let df = f.d()?;
    let rows = rows(a, |l, p| {
        let lhs = fdx.integrate_chain(&star_at_level(&p.boundary().canonicalize(), l)?, qtol())?;
        Ok((lhs, df.integrate_chain(p, qtol())?))
    })?;
    Ok(ExperimentReport::new(format!("distribution[{}]", f.name()), rows, tol, t0))
}

/// `∫_{f_* A(ℓ)} ω` against `∫_{A(ℓ)} f^*ω`, pushing forward the level-`ℓ`
/// elements of `A(ℓ)`.
pub fn verify_pushforward<S: Scalar>(a: &ChainletSeq<S>, map: &SmoothMap<S>, form: &FormField<S>, tol: f64) -> Result<ExperimentReport> {
    let t0 = Instant::now();
    let (n, k) = shape(a)?;
    if map.n_in() != n {
        return Err(ChainletError::DimensionMismatch { expected: n, found: map.n_in() });
    }
    expect_degree(form, map.n_out(), k)?;
    let pulled = form.pullback(map)?;
    let rows = rows(a, |l, p| {
        let image = cubeize(&pushforward(map, &elementize(p, l)?)?, l)?;
        Ok((form.integrate_chain(&image, qtol())?, pulled.integrate_chain(p, qtol())?))
    })?;
    Ok(ExperimentReport::new(format!("pushforward[{}]", form.name()), rows, tol, t0))
}
