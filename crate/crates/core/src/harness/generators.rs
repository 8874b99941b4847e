//! Fractal and classical domains as polyhedral chains.

use std::f64::consts::PI;

use crate::chains::{PolyChain, Simplex};
use crate::elements::qcube;
use crate::error::{ChainletError, Result};
use crate::exterior::KDirection;
use crate::scalar::Scalar;

pub const MAX_KOCH_LEVEL: u32 = 10;
pub const MAX_WEIERSTRASS_TERMS: u32 = 30;

fn pt<S: Scalar>(p: [f64; 2]) -> Vec<S> {
    vec![S::lit(p[0]), S::lit(p[1])]
}

/// One level of the snowflake: the closed polygon and the bump triangles
/// whose boundaries take it to the next level.
#[derive(Debug, Clone, PartialEq)]
pub struct Koch<S = f64> {
    pub level: u32,
    pub side: f64,
    /// Counter-clockwise boundary polygon, a closed 1-chain in `R²`.
    pub polygon: PolyChain<S>,
    /// 2-chain `C` with `∂C = P(level + 1) − P(level)` as chains.
    pub region: PolyChain<S>,
}

fn koch_vertices(level: u32, side: f64) -> Vec<[f64; 2]> {
    let h = side * 3f64.sqrt() / 2.0;
    let mut v = vec![[0.0, 0.0], [side, 0.0], [side / 2.0, h]];
    for _ in 0..level {
        let mut next = Vec::with_capacity(v.len() * 4);
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let [p1, peak, p2] = bump(a, b);
            next.extend([a, p1, peak, p2]);
        }
        v = next;
    }
    v
}

/// Outward bump on the edge `a → b` of a counter-clockwise polygon.
fn bump(a: [f64; 2], b: [f64; 2]) -> [[f64; 2]; 3] {
    let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
    let p1 = [a[0] + d[0], a[1] + d[1]];
    let p2 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
    // rotate d by −60°
    let (c, s) = (0.5, 3f64.sqrt() / 2.0);
    let peak = [p1[0] + c * d[0] + s * d[1], p1[1] - s * d[0] + c * d[1]];
    [p1, peak, p2]
}

/// Snowflake of side `side` at `level ≤ 10`; mass `3·side·(4/3)^level`.
pub fn gen_koch<S: Scalar>(level: u32, side: f64) -> Result<Koch<S>> {
    if level > MAX_KOCH_LEVEL {
        return Err(ChainletError::Invalid(format!("Koch level {level} exceeds {MAX_KOCH_LEVEL}")));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(ChainletError::Invalid("Koch side must be positive".into()));
    }
    let v = koch_vertices(level, side);
    let pts: Vec<Vec<S>> = v.iter().map(|&p| pt(p)).collect();
    let mut polygon = PolyChain::zero(2, 1)?;
    let mut region = PolyChain::zero(2, 2)?;
    for i in 0..v.len() {
        let j = (i + 1) % v.len();
        polygon.push(S::one(), Simplex::new(vec![pts[i].clone(), pts[j].clone()])?)?;
        let tri = bump(v[i], v[j]);
        region.push(S::one(), Simplex::new(tri.iter().map(|&p| pt(p)).collect())?)?;
    }
    Ok(Koch { level, side, polygon, region })
}

/// Truncated Weierstrass series `Σ_{m=0}^{N} a^m cos(b^m π x)`.
pub fn weierstrass(a: f64, b: f64, terms: u32, x: f64) -> f64 {
    (0..=terms).map(|m| a.powi(m as i32) * (b.powi(m as i32) * PI * x).cos()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassSubgraph<S = f64> {
    pub a: f64,
    pub b: f64,
    pub terms: u32,
    pub level: u32,
    /// Constant added so that the graph stays above the axis.
    pub shift: f64,
    /// Column heights, one per dyadic interval.
    pub heights: Vec<f64>,
    pub chain: PolyChain<S>,
}

impl<S: Scalar> WeierstrassSubgraph<S> {
    /// The shifted function whose subgraph is approximated.
    pub fn height(&self, x: f64) -> f64 {
        weierstrass(self.a, self.b, self.terms, x) + self.shift
    }
}

const SHIFT_GRID: usize = 1 << 16;
const SHIFT_MARGIN: f64 = 0.01;

/// Subgraph over `[0, 1]` of the shifted truncated series, as `2^level`
/// step-function columns. Each column is a convex polygon (with extra
/// vertices where a lower neighbour meets its side) fanned from its centre,
/// so interior sides cancel exactly in the boundary.
pub fn gen_weierstrass_subgraph<S: Scalar>(a: f64, b: f64, terms: u32, level: u32) -> Result<WeierstrassSubgraph<S>> {
    if !(a > 0.0 && a < 1.0) || a * b < 1.0 {
        return Err(ChainletError::Invalid(format!("need 0 < a < 1 and ab >= 1, got a = {a}, b = {b}")));
    }
    if terms > MAX_WEIERSTRASS_TERMS {
        return Err(ChainletError::Invalid(format!("truncation {terms} exceeds {MAX_WEIERSTRASS_TERMS}")));
    }
    if level > 20 {
        return Err(ChainletError::Invalid(format!("level {level} exceeds 20")));
    }
    let min = (0..=SHIFT_GRID)
        .map(|i| weierstrass(a, b, terms, i as f64 / SHIFT_GRID as f64))
        .fold(f64::INFINITY, f64::min);
    let shift = (-min).max(0.0) + SHIFT_MARGIN;
    let m = 1usize << level;
    let w = 1.0 / m as f64;
    let heights: Vec<f64> = (0..m).map(|j| weierstrass(a, b, terms, (j as f64 + 0.5) * w) + shift).collect();
    if let Some(h) = heights.iter().find(|&&h| h <= 0.0) {
        return Err(ChainletError::Invalid(format!("column height {h} is not positive")));
    }
    let mut chain = PolyChain::zero(2, 2)?;
    for (j, &h) in heights.iter().enumerate() {
        let (x0, x1) = (j as f64 * w, (j + 1) as f64 * w);
        let mut poly = vec![[x0, 0.0], [x1, 0.0]];
        if let Some(&r) = heights.get(j + 1) {
            if r < h {
                poly.push([x1, r]);
            }
        }
        poly.push([x1, h]);
        poly.push([x0, h]);
        if j > 0 && heights[j - 1] < h {
            poly.push([x0, heights[j - 1]]);
        }
        let c: Vec<S> = pt([(x0 + x1) / 2.0, h / 2.0]);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            chain.push(S::one(), Simplex::new(vec![c.clone(), pt(p), pt(q)])?)?;
        }
    }
    Ok(WeierstrassSubgraph { a, b, terms, level, shift, heights, chain })
}

/// `2^{2k}` times the square of edge `2^{−k}` centred at the origin of `R²`.
pub fn gen_cube_sequence<S: Scalar>(k: i32) -> Result<PolyChain<S>> {
    qcube(&[S::zero(), S::zero()], &KDirection::axis(2, &[0, 1])?, k)
}

/// Inscribed regular `3·2^level`-gon in the unit disk, fanned from the
/// origin, counter-clockwise.
pub fn gen_disk<S: Scalar>(level: u32) -> Result<PolyChain<S>> {
    if level > 24 {
        return Err(ChainletError::Invalid(format!("disk level {level} exceeds 24")));
    }
    let m = 3usize << level;
    let verts: Vec<Vec<S>> = (0..m)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / m as f64;
            pt([t.cos(), t.sin()])
        })
        .collect();
    let o: Vec<S> = pt([0.0, 0.0]);
    let mut chain = PolyChain::zero(2, 2)?;
    for i in 0..m {
        chain.push(S::one(), Simplex::new(vec![o.clone(), verts[i].clone(), verts[(i + 1) % m].clone()])?)?;
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_zero_is_the_triangle() {
        let k = gen_koch::<f64>(0, 1.0).unwrap();
        assert_eq!(k.polygon.len(), 3);
        assert!((k.polygon.mass() - 3.0).abs() < 1e-15);
        assert!(k.polygon.boundary().canonicalize().is_zero());
    }

    #[test]
    fn koch_mass_grows_by_four_thirds() {
        for l in 0..5 {
            let k = gen_koch::<f64>(l, 2.0).unwrap();
            assert!((k.polygon.mass() - 6.0 * (4.0f64 / 3.0).powi(l as i32)).abs() < 1e-11);
        }
    }

    #[test]
    fn koch_bumps_point_outward() {
        let k = gen_koch::<f64>(0, 1.0).unwrap();
        // Each bump triangle is counter-clockwise, so the region has the
        // same orientation as the enclosed area.
        assert!(k.region.vec().coeff(crate::Blade::from_indices(&[0, 1])) > 0.0);
    }

    #[test]
    fn constant_weierstrass_columns() {
        let w = gen_weierstrass_subgraph::<f64>(0.5, 3.0, 0, 3).unwrap();
        assert_eq!(w.heights.len(), 8);
        assert!(w.chain.boundary().canonicalize().mass() > 0.0);
    }

    #[test]
    fn disk_area_approaches_pi() {
        let d = gen_disk::<f64>(4).unwrap();
        let m = 48.0;
        assert!((d.mass() - m / 2.0 * (2.0 * PI / m).sin()).abs() < 1e-13);
        assert_eq!(d.boundary().canonicalize().len(), 48);
    }

    #[test]
    fn cube_sequence_has_unit_mass() {
        for k in 0..5 {
            assert!((gen_cube_sequence::<f64>(k).unwrap().mass() - 1.0).abs() < 1e-15);
        }
    }
}
