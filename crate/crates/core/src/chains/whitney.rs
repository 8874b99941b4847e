//! Exhaustion of axis-plane simplices by dyadic grid cubes.

use super::cell::{Cube, Simplex};
use super::chain::PolyChain;
use super::dyadic::{Dyadic, DyadicCube};
use crate::error::{ChainletError, Result};
use crate::exterior::Blade;
use crate::geom;
use crate::scalar::Scalar;

const MAX_CANDIDATES: f64 = 1.0e8;

/// All grid cubes of edge `2^{-level}` contained in the closed simplex,
/// oriented like it. The simplex must span a coordinate k-plane.
pub fn whitney_cubes<S: Scalar>(simplex: &Simplex<S>, level: i32) -> Result<PolyChain<S>> {
    let n = simplex.ambient();
    let k = simplex.dim();
    let p0 = &simplex.vertices()[0];
    let axes: Vec<usize> = (0..n).filter(|&j| simplex.vertices().iter().any(|p| p[j] != p0[j])).collect();
    if axes.len() != k {
        return Err(ChainletError::NonAxisPlane);
    }
    let mut out = PolyChain::zero(n, k)?;
    if k == 0 {
        out.push(S::one(), simplex.clone())?;
        return Ok(out);
    }
    let sign = if simplex.vec().coeff(Blade::from_indices(&axes)) > S::zero() { 1 } else { -1 };

    // Barycentric coordinates in the plane: λ = M^{-1}(x − p0).
    let edges: Vec<Vec<S>> = simplex.edges().iter().map(|e| axes.iter().map(|&a| e[a]).collect()).collect();
    let m: Vec<Vec<S>> = (0..k).map(|r| (0..k).map(|c| edges[c][r]).collect()).collect();
    let tol = S::tol(1e-12);
    let inside = |x: &[S]| -> bool {
        let rhs: Vec<S> = (0..k).map(|r| x[r] - p0[axes[r]]).collect();
        match geom::solve(m.clone(), rhs) {
            Some(l) => l.iter().all(|&v| v >= -tol) && l.iter().copied().sum::<S>() <= S::one() + tol,
            None => false,
        }
    };

    let h = S::pow2(-level);
    let scale = S::pow2(level);
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    let mut candidates = 1.0;
    for &a in &axes {
        let min = simplex.vertices().iter().map(|p| p[a]).fold(S::infinity(), S::min);
        let max = simplex.vertices().iter().map(|p| p[a]).fold(S::neg_infinity(), S::max);
        let i0 = (min * scale).floor().as_f64() as i64;
        let i1 = (max * scale).ceil().as_f64() as i64;
        candidates *= (i1 - i0).max(1) as f64;
        lo.push(i0);
        hi.push(i1);
    }
    if candidates > MAX_CANDIDATES {
        return Err(ChainletError::Invalid(format!("level {level} needs too many grid cells")));
    }
    let fixed: Vec<Dyadic> = p0.iter().map(|&x| Dyadic::from_scalar(x)).collect::<Option<_>>()
        .ok_or_else(|| ChainletError::Invalid("non-finite coordinate".into()))?;

    let mut idx = lo.clone();
    loop {
        let corner_ok = (0..1usize << k).all(|mask| {
            let x: Vec<S> = (0..k)
                .map(|r| S::lit((idx[r] + (mask >> r & 1) as i64) as f64) * h)
                .collect();
            inside(&x)
        });
        if corner_ok {
            let mut center = fixed.clone();
            for (r, &a) in axes.iter().enumerate() {
                center[a] = Dyadic::new(2 * idx[r] as i128 + 1, level + 1);
            }
            out.push(S::one(), Cube::from_dyadic(n, DyadicCube { axes: axes.clone(), level, center }, sign)?)?;
        }
        // Odometer increment.
        let mut r = 0;
        loop {
            if r == k {
                return Ok(out);
            }
            idx[r] += 1;
            if idx[r] < hi[r] {
                break;
            }
            idx[r] = lo[r];
            r += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_triangle_at_level_four() {
        let s = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = whitney_cubes(&s, 4).unwrap();
        // Brute-force count: cells (i, j) with i + j ≤ 14, i.e. 120 cells of area 1/256.
        assert_eq!(c.len(), 120);
        assert_eq!(c.mass(), 0.46875);
    }

    #[test]
    fn tilted_simplex_is_rejected() {
        let s = Simplex::new(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(whitney_cubes(&s, 2).unwrap_err(), ChainletError::NonAxisPlane);
    }
}
