//! Oriented k-cells: simplices (orientation from vertex order) and cubes
//! (orthonormal frame, edge length and a sign).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, DyadicCube};
use crate::error::{ChainletError, Result};
use crate::exterior::{check_dim, frame_to_kvector, gram_schmidt, KDirection, KVector};
use crate::geom::{self, dot, norm};
use crate::scalar::{order_key, Scalar};

/// Oriented simplex `[p_0, …, p_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimplexRepr<S>", bound = "S: Scalar")]
pub struct Simplex<S = f64> {
    vertices: Vec<Vec<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct SimplexRepr<S> {
    vertices: Vec<Vec<S>>,
}

impl<S: Scalar> TryFrom<SimplexRepr<S>> for Simplex<S> {
    type Error = ChainletError;
    fn try_from(r: SimplexRepr<S>) -> Result<Self> {
        Simplex::new(r.vertices)
    }
}

impl<S: Scalar> Simplex<S> {
    /// Validates dimensions and affine independence.
    pub fn new(vertices: Vec<Vec<S>>) -> Result<Self> {
        let n = vertices.first().map(Vec::len).ok_or_else(|| ChainletError::DegenerateCell("no vertices".into()))?;
        check_dim(n)?;
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(ChainletError::DimensionMismatch { expected: n, found: v.len() });
        }
        let k = vertices.len() - 1;
        if k > n {
            return Err(ChainletError::GradeOverflow { grade: k, ambient: n });
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ChainletError::DegenerateCell("non-finite coordinate".into()));
        }
        let s = Simplex { vertices };
        if k > 0 && gram_schmidt(&s.edges()).is_none() {
            return Err(ChainletError::DegenerateCell("affinely dependent vertices".into()));
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(vertices: Vec<Vec<S>>) -> Self {
        Simplex { vertices }
    }

    pub fn point(p: Vec<S>) -> Result<Self> {
        Simplex::new(vec![p])
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn ambient(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `p_i − p_0` for `i = 1..k`.
    pub fn edges(&self) -> Vec<Vec<S>> {
        self.vertices[1..].iter().map(|p| geom::sub(p, &self.vertices[0])).collect()
    }

    /// `(1/k!) (p_1 − p_0) ∧ … ∧ (p_k − p_0)`; a point has Vec `1`.
    pub fn vec(&self) -> KVector<S> {
        let w = frame_to_kvector(self.ambient(), &self.edges()).expect("validated simplex");
        w.scale(S::lit(1.0 / geom::factorial(self.dim())))
    }

    pub fn mass(&self) -> S {
        if self.dim() == 0 {
            return S::one();
        }
        match gram_schmidt(&self.edges()) {
            Some((_, vol)) => vol / S::lit(geom::factorial(self.dim())),
            None => S::zero(),
        }
    }

    pub fn face(&self, i: usize) -> Simplex<S> {
        let mut v = self.vertices.clone();
        v.remove(i);
        Simplex { vertices: v }
    }

    pub fn centroid(&self) -> Vec<S> {
        let m = S::lit(self.vertices.len() as f64);
        (0..self.ambient()).map(|j| self.vertices.iter().map(|p| p[j]).sum::<S>() / m).collect()
    }

    pub fn diameter(&self) -> S {
        let mut d = S::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(geom::dist(a, b));
            }
        }
        d
    }

    /// Splits the longest edge at its midpoint; both halves keep the
    /// orientation.
    pub fn bisect(&self) -> (Simplex<S>, Simplex<S>) {
        let (mut bi, mut bj, mut best) = (0, 1, -S::one());
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let d = geom::dist(&self.vertices[i], &self.vertices[j]);
                if d > best {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        let mid: Vec<S> = self.vertices[bi].iter().zip(&self.vertices[bj]).map(|(&a, &b)| (a + b) * S::lit(0.5)).collect();
        let mut a = self.vertices.clone();
        let mut b = self.vertices.clone();
        a[bj] = mid.clone();
        b[bi] = mid;
        (Simplex { vertices: a }, Simplex { vertices: b })
    }

    pub fn translate(&self, v: &[S]) -> Simplex<S> {
        Simplex { vertices: self.vertices.iter().map(|p| geom::add(p, v)).collect() }
    }

    /// Sorted vertex order together with the parity of the sorting
    /// permutation.
    fn sorted(&self) -> (i8, Simplex<S>) {
        let keys: Vec<Vec<u64>> = self.vertices.iter().map(|p| p.iter().map(|&x| order_key(x)).collect()).collect();
        let mut idx: Vec<usize> = (0..keys.len()).collect();
        idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut sign = 1i8;
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                if idx[i] > idx[j] {
                    sign = -sign;
                }
            }
        }
        (sign, Simplex { vertices: idx.iter().map(|&i| self.vertices[i].clone()).collect() })
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        let k = self.dim();
        let d = geom::sub(p, &self.vertices[0]);
        if k == 0 {
            return norm(&d) <= tol;
        }
        let e = self.edges();
        let g: Vec<Vec<S>> = e.iter().map(|a| e.iter().map(|b| dot(a, b)).collect()).collect();
        let rhs: Vec<S> = e.iter().map(|a| dot(a, &d)).collect();
        let Some(lam) = geom::solve(g, rhs) else { return false };
        let mut resid = d.clone();
        for (l, ei) in lam.iter().zip(&e) {
            resid = geom::axpy(&resid, -*l, ei);
        }
        let rel = tol / self.diameter();
        norm(&resid) <= tol && lam.iter().all(|&l| l >= -rel) && S::one() - lam.iter().copied().sum::<S>() >= -rel
    }
}

/// Oriented k-cube `{c + Σ t_i a_i : |t_i| ≤ edge/2}` with orientation
/// `sign · a_1 ∧ … ∧ a_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CubeRepr<S>", into = "CubeRepr<S>", bound = "S: Scalar")]
pub struct Cube<S = f64> {
    center: Vec<S>,
    frame: Vec<Vec<S>>,
    edge: S,
    sign: i8,
    dyadic: Option<DyadicCube>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, bound = "S: Scalar")]
enum AxesRepr<S> {
    Indices(Vec<usize>),
    Frame(Vec<Vec<S>>),
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    level: i32,
    center: Vec<Dyadic>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct CubeRepr<S> {
    center: Vec<S>,
    /// 1-based coordinate axes, or explicit frame vectors.
    axes: AxesRepr<S>,
    edge: S,
    #[serde(default = "one_i8")]
    sign: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dyadic: Option<DyadicRepr>,
}

fn one_i8() -> i8 {
    1
}

impl<S: Scalar> From<Cube<S>> for CubeRepr<S> {
    fn from(c: Cube<S>) -> Self {
        let axes = match &c.dyadic {
            Some(d) => AxesRepr::Indices(d.axes.iter().map(|i| i + 1).collect()),
            None => AxesRepr::Frame(c.frame.clone()),
        };
        CubeRepr {
            center: c.center,
            axes,
            edge: c.edge,
            sign: c.sign,
            dyadic: c.dyadic.map(|d| DyadicRepr { level: d.level, center: d.center }),
        }
    }
}

impl<S: Scalar> TryFrom<CubeRepr<S>> for Cube<S> {
    type Error = ChainletError;
    fn try_from(r: CubeRepr<S>) -> Result<Self> {
        let n = r.center.len();
        if r.sign != 1 && r.sign != -1 {
            return Err(ChainletError::Invalid(format!("cube sign must be ±1, got {}", r.sign)));
        }
        match (r.axes, r.dyadic) {
            (AxesRepr::Indices(ax), Some(d)) => {
                let axes: Vec<usize> = ax.iter().map(|&i| i.wrapping_sub(1)).collect();
                if d.center.len() != n {
                    return Err(ChainletError::DimensionMismatch { expected: n, found: d.center.len() });
                }
                let mut sorted = axes.clone();
                sorted.sort_unstable();
                if sorted != axes || sorted.windows(2).any(|w| w[0] == w[1]) || axes.iter().any(|&i| i >= n) {
                    return Err(ChainletError::Invalid("dyadic cube axes must be increasing and in range".into()));
                }
                Cube::from_dyadic(n, DyadicCube { axes, level: d.level, center: d.center }, r.sign)
            }
            (AxesRepr::Indices(ax), None) => {
                let axes: Vec<usize> = ax.iter().map(|&i| i.wrapping_sub(1)).collect();
                Cube::axis(r.center, &axes, r.edge, r.sign)
            }
            (AxesRepr::Frame(f), None) => Cube::new(r.center, f, r.edge, r.sign),
            (AxesRepr::Frame(_), Some(_)) => Err(ChainletError::Invalid("dyadic cubes list axes by index".into())),
        }
    }
}

fn exact_level(edge: f64) -> Option<i32> {
    let d = Dyadic::from_f64(edge)?;
    (d.mantissa() == 1).then_some(d.exponent())
}

impl<S: Scalar> Cube<S> {
    /// Validates the frame; axis-aligned cubes with power-of-two edges are
    /// stored in exact dyadic form with the frame sorted and the orientation
    /// folded into `sign`.
    pub fn new(center: Vec<S>, frame: Vec<Vec<S>>, edge: S, sign: i8) -> Result<Self> {
        let n = center.len();
        let dir = KDirection::from_orthonormal_frame(n, frame)?;
        if !(edge > S::zero()) || !edge.is_finite() {
            return Err(ChainletError::DegenerateCell("cube edge must be positive".into()));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(ChainletError::DegenerateCell("non-finite coordinate".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(ChainletError::Invalid(format!("cube sign must be ±1, got {sign}")));
        }
        if let Some((axes, s)) = dir.axis_aligned() {
            if let Some(level) = exact_level(edge.as_f64()) {
                let dc = center.iter().map(|&x| Dyadic::from_scalar(x)).collect::<Option<Vec<_>>>();
                if let Some(c) = dc {
                    return Cube::from_dyadic(n, DyadicCube { axes, level, center: c }, sign * s);
                }
            }
            let frame = KDirection::<S>::axis(n, &axes)?.frame().to_vec();
            return Ok(Cube { center, frame, edge, sign: sign * s, dyadic: None });
        }
        Ok(Cube { center, frame: dir.frame().to_vec(), edge, sign, dyadic: None })
    }

    /// Cube spanned by coordinate axes (0-based, any order).
    pub fn axis(center: Vec<S>, axes: &[usize], edge: S, sign: i8) -> Result<Self> {
        let frame = KDirection::<S>::axis(center.len(), axes)?.frame().to_vec();
        Cube::new(center, frame, edge, sign)
    }

    pub fn from_dyadic(n: usize, dc: DyadicCube, sign: i8) -> Result<Self> {
        check_dim(n)?;
        if dc.center.len() != n {
            return Err(ChainletError::DimensionMismatch { expected: n, found: dc.center.len() });
        }
        let frame = KDirection::<S>::axis(n, &dc.axes)?.frame().to_vec();
        Ok(Cube {
            center: dc.center.iter().map(|d| d.to_scalar()).collect(),
            frame,
            edge: S::pow2(-dc.level),
            sign,
            dyadic: Some(dc),
        })
    }

    pub fn center(&self) -> &[S] {
        &self.center
    }

    pub fn frame(&self) -> &[Vec<S>] {
        &self.frame
    }

    pub fn edge(&self) -> S {
        self.edge
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dyadic(&self) -> Option<&DyadicCube> {
        self.dyadic.as_ref()
    }

    pub fn is_dyadic(&self) -> bool {
        self.dyadic.is_some()
    }

    pub fn ambient(&self) -> usize {
        self.center.len()
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Unit direction `sign · a_1 ∧ … ∧ a_k` as a frame (first vector
    /// flipped when the sign is negative).
    pub fn direction(&self) -> KDirection<S> {
        let mut f = self.frame.clone();
        if self.sign < 0 {
            match f.first_mut() {
                Some(v) => v.iter_mut().for_each(|x| *x = -*x),
                None => return KDirection::unit_scalar(self.ambient()),
            }
        }
        KDirection::from_orthonormal_frame(self.ambient(), f).expect("validated frame")
    }

    pub fn vec(&self) -> KVector<S> {
        let s = if self.sign > 0 { S::one() } else { -S::one() };
        frame_to_kvector(self.ambient(), &self.frame).expect("validated frame").scale(s * self.mass())
    }

    pub fn mass(&self) -> S {
        self.edge.powi(self.dim() as i32)
    }

    /// The point `c + edge · Σ t_i a_i` for `t ∈ [−1/2, 1/2]^k`.
    pub fn point_at(&self, t: &[S]) -> Vec<S> {
        let mut p = self.center.clone();
        for (ti, a) in t.iter().zip(&self.frame) {
            p = geom::axpy(&p, *ti * self.edge, a);
        }
        p
    }

    pub fn corners(&self) -> Vec<Vec<S>> {
        let k = self.dim();
        (0..1usize << k)
            .map(|m| {
                let t: Vec<S> = (0..k).map(|i| if m >> i & 1 == 1 { S::lit(0.5) } else { S::lit(-0.5) }).collect();
                self.point_at(&t)
            })
            .collect()
    }

    pub fn diameter(&self) -> S {
        self.edge * S::lit(self.dim() as f64).sqrt()
    }

    pub fn with_sign(&self, sign: i8) -> Cube<S> {
        Cube { sign, ..self.clone() }
    }

    /// `(+face, −face)` orthogonal to the `i`-th frame vector, both with
    /// positive sign.
    fn faces(&self, i: usize) -> (Cube<S>, Cube<S>) {
        let n = self.ambient();
        if let Some(d) = &self.dyadic {
            if let Some((p, m)) = d.faces(i) {
                return (
                    Cube::from_dyadic(n, p, 1).expect("valid face"),
                    Cube::from_dyadic(n, m, 1).expect("valid face"),
                );
            }
        }
        let h = self.edge * S::lit(0.5);
        let a = &self.frame[i];
        let mut frame = self.frame.clone();
        frame.remove(i);
        let plus = Cube { center: geom::axpy(&self.center, h, a), frame: frame.clone(), edge: self.edge, sign: 1, dyadic: None };
        let minus = Cube { center: geom::axpy(&self.center, -h, a), frame, edge: self.edge, sign: 1, dyadic: None };
        (plus, minus)
    }

    pub fn translate(&self, v: &[S]) -> Cube<S> {
        if let Some(d) = &self.dyadic {
            let dv = v.iter().map(|&x| Dyadic::from_scalar(x)).collect::<Option<Vec<_>>>();
            if let Some(t) = dv.and_then(|dv| d.translate(&dv)) {
                return Cube::from_dyadic(self.ambient(), t, self.sign).expect("valid translate");
            }
        }
        Cube { center: geom::add(&self.center, v), dyadic: None, ..self.clone() }
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        let d = geom::sub(p, &self.center);
        let mut resid = d.clone();
        let h = self.edge * S::lit(0.5);
        for a in &self.frame {
            let t = dot(&d, a);
            if t.abs() > h + tol {
                return false;
            }
            resid = geom::axpy(&resid, -t, a);
        }
        norm(&resid) <= tol
    }
}

/// An oriented simplex or cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "S: Scalar")]
pub enum Cell<S = f64> {
    Simplex(Simplex<S>),
    Cube(Cube<S>),
}

/// Exact ordering key of a canonical cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum CellKey {
    Simplex(Vec<u64>),
    Dyadic(DyadicCube),
    Cube { edge: u64, center: Vec<u64>, frame: Vec<u64> },
}

impl<S: Scalar> From<Simplex<S>> for Cell<S> {
    fn from(s: Simplex<S>) -> Self {
        Cell::Simplex(s)
    }
}

impl<S: Scalar> From<Cube<S>> for Cell<S> {
    fn from(c: Cube<S>) -> Self {
        Cell::Cube(c)
    }
}

impl<S: Scalar> Cell<S> {
    pub fn ambient(&self) -> usize {
        match self {
            Cell::Simplex(s) => s.ambient(),
            Cell::Cube(c) => c.ambient(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cell::Simplex(s) => s.dim(),
            Cell::Cube(c) => c.dim(),
        }
    }

    pub fn vec(&self) -> KVector<S> {
        match self {
            Cell::Simplex(s) => s.vec(),
            Cell::Cube(c) => c.vec(),
        }
    }

    pub fn mass(&self) -> S {
        match self {
            Cell::Simplex(s) => s.mass(),
            Cell::Cube(c) => c.mass(),
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Cell::Cube(c) if c.is_dyadic())
    }

    pub fn centroid(&self) -> Vec<S> {
        match self {
            Cell::Simplex(s) => s.centroid(),
            Cell::Cube(c) => c.center().to_vec(),
        }
    }

    pub fn diameter(&self) -> S {
        match self {
            Cell::Simplex(s) => s.diameter(),
            Cell::Cube(c) => c.diameter(),
        }
    }

    /// Extreme points of the cell.
    pub fn hull_points(&self) -> Vec<Vec<S>> {
        match self {
            Cell::Simplex(s) => s.vertices().to_vec(),
            Cell::Cube(c) => c.corners(),
        }
    }

    pub fn contains(&self, p: &[S], tol: S) -> bool {
        match self {
            Cell::Simplex(s) => s.contains(p, tol),
            Cell::Cube(c) => c.contains(p, tol),
        }
    }

    pub fn translate(&self, v: &[S]) -> Cell<S> {
        match self {
            Cell::Simplex(s) => Cell::Simplex(s.translate(v)),
            Cell::Cube(c) => Cell::Cube(c.translate(v)),
        }
    }

    /// Signed faces; empty for 0-cells.
    pub fn boundary(&self) -> Vec<(S, Cell<S>)> {
        match self {
            Cell::Simplex(s) if s.dim() == 0 => Vec::new(),
            Cell::Simplex(s) => (0..=s.dim())
                .map(|i| {
                    let sign = if i % 2 == 0 { S::one() } else { -S::one() };
                    (sign, Cell::Simplex(s.face(i)))
                })
                .collect(),
            Cell::Cube(c) => {
                let mut out = Vec::with_capacity(2 * c.dim());
                let base = if c.sign() > 0 { S::one() } else { -S::one() };
                for i in 0..c.dim() {
                    let s = if i % 2 == 0 { base } else { -base };
                    let (p, m) = c.faces(i);
                    out.push((s, Cell::Cube(p)));
                    out.push((-s, Cell::Cube(m)));
                }
                out
            }
        }
    }

    /// Representative with the orientation folded out: sorted simplex
    /// vertices, positive cube sign, 0-cubes turned into points.
    pub fn canonical(&self) -> (S, Cell<S>) {
        match self {
            Cell::Simplex(s) => {
                let (sign, s) = s.sorted();
                (S::lit(sign as f64), Cell::Simplex(s))
            }
            Cell::Cube(c) => {
                let sign = S::lit(c.sign() as f64);
                if c.dim() == 0 {
                    (sign, Cell::Simplex(Simplex::new_unchecked(vec![c.center().to_vec()])))
                } else {
                    (sign, Cell::Cube(c.with_sign(1)))
                }
            }
        }
    }

    pub(crate) fn key(&self) -> CellKey {
        match self {
            Cell::Simplex(s) => CellKey::Simplex(s.vertices().iter().flatten().map(|&x| order_key(x)).collect()),
            Cell::Cube(c) => match c.dyadic() {
                Some(d) => CellKey::Dyadic(d.clone()),
                None => CellKey::Cube {
                    edge: order_key(c.edge()),
                    center: c.center().iter().map(|&x| order_key(x)).collect(),
                    frame: c.frame().iter().flatten().map(|&x| order_key(x)).collect(),
                },
            },
        }
    }
}

pub(crate) fn cmp_cells<S: Scalar>(a: &Cell<S>, b: &Cell<S>) -> Ordering {
    a.key().cmp(&b.key())
}
