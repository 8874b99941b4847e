//! Differential k-elements, elementary chains and the bridge between them
//! and polyhedral chains.

mod seq;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use seq::{CauchyEntry, ChainletSeq};

use crate::chains::{Cell, Cube, PolyChain, Simplex};
use crate::error::{ChainletError, Result};
use crate::exterior::{gram_schmidt, KDirection, KVector};
use crate::forms::{FormField, SmoothMap};
use crate::scalar::{compensated_sum, order_key, Scalar};

/// Cap on the number of elements one conversion may produce.
const MAX_ELEMENTS: usize = 1 << 24;

/// `b · (α)_p` with `α = alpha_mass · direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<S = f64> {
    pub b: S,
    pub p: Vec<S>,
    pub direction: KDirection<S>,
    pub alpha_mass: S,
}

impl<S: Scalar> Element<S> {
    /// The k-vector `α`.
    pub fn alpha(&self) -> KVector<S> {
        self.direction.kvector().scale(self.alpha_mass)
    }

    fn sort_key(&self) -> (Vec<u64>, Vec<u64>) {
        (
            self.p.iter().map(|&x| order_key(x)).collect(),
            self.direction.frame().iter().flatten().map(|&x| order_key(x)).collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct ElementRepr<S> {
    b: S,
    p: Vec<S>,
    alpha_frame: Vec<Vec<S>>,
    alpha_mass: S,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct ElementaryRepr<S> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    terms: Vec<ElementRepr<S>>,
}

/// `Ṗ = Σ b_i (α_i)_{p_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementaryRepr<S>", into = "ElementaryRepr<S>", bound = "S: Scalar")]
pub struct ElementaryChain<S = f64> {
    n: usize,
    k: usize,
    terms: Vec<Element<S>>,
}

impl<S: Scalar> From<ElementaryChain<S>> for ElementaryRepr<S> {
    fn from(e: ElementaryChain<S>) -> Self {
        ElementaryRepr {
            n: Some(e.n),
            k: Some(e.k),
            terms: e
                .terms
                .into_iter()
                .map(|t| ElementRepr { b: t.b, p: t.p, alpha_frame: t.direction.frame().to_vec(), alpha_mass: t.alpha_mass })
                .collect(),
        }
    }
}

impl<S: Scalar> TryFrom<ElementaryRepr<S>> for ElementaryChain<S> {
    type Error = ChainletError;
    fn try_from(r: ElementaryRepr<S>) -> Result<Self> {
        let n = r.n.or_else(|| r.terms.first().map(|t| t.p.len())).ok_or_else(|| {
            ChainletError::Invalid("an empty elementary chain needs \"n\" and \"k\"".into())
        })?;
        let k = r.k.or_else(|| r.terms.first().map(|t| t.alpha_frame.len())).unwrap_or(0);
        let mut e = ElementaryChain::zero(n, k)?;
        for t in r.terms {
            let dir = KDirection::from_frame(n, &t.alpha_frame)?;
            e.push(t.b, t.p, dir, t.alpha_mass)?;
        }
        Ok(e)
    }
}

impl<S: Scalar> ElementaryChain<S> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        PolyChain::<S>::zero(n, k)?;
        Ok(ElementaryChain { n, k, terms: Vec::new() })
    }

    /// A single element `(α)_p` with `α` given as a frame; `α`'s mass is the
    /// frame's k-volume.
    pub fn element(p: Vec<S>, frame: &[Vec<S>]) -> Result<Self> {
        let n = p.len();
        let (q, vol) = gram_schmidt(frame).ok_or_else(|| ChainletError::DegenerateCell("dependent frame".into()))?;
        let mut e = ElementaryChain::zero(n, frame.len())?;
        e.push(S::one(), p, KDirection::from_orthonormal_frame(n, q)?, vol)?;
        Ok(e)
    }

    pub fn push(&mut self, b: S, p: Vec<S>, direction: KDirection<S>, alpha_mass: S) -> Result<()> {
        if p.len() != self.n || direction.ambient() != self.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: p.len() });
        }
        if direction.grade() != self.k {
            return Err(ChainletError::DimensionMismatch { expected: self.k, found: direction.grade() });
        }
        if !b.is_finite() || !alpha_mass.is_finite() || alpha_mass < S::zero() || p.iter().any(|x| !x.is_finite()) {
            return Err(ChainletError::Invalid("element data must be finite with nonnegative mass".into()));
        }
        self.terms.push(Element { b, p, direction, alpha_mass });
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Element<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ |b_i| M(α_i)`.
    pub fn mass(&self) -> S {
        compensated_sum(self.terms.iter().map(|t| t.b.abs() * t.alpha_mass))
    }

    /// `Σ b_i α_i`.
    pub fn vec(&self) -> KVector<S> {
        let mut acc = KVector::zero(self.n, self.k).expect("validated shape");
        for t in &self.terms {
            acc = &acc + &t.alpha().scale(t.b);
        }
        acc
    }

    pub fn scale(&self, s: S) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.b = t.b * s);
        out
    }

    /// Terms sorted by point, then direction.
    pub fn sorted(mut self) -> Self {
        self.terms.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap_or(Ordering::Equal));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("elementary chains serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ChainletError::Invalid(e.to_string()))
    }
}

/// `Q_ℓ(p, α)`: the cube centred at `p` with direction `α`, edge `2^{-ℓ}`
/// and coefficient `2^{kℓ}`. For `k = 0` this is the point `p`.
pub fn qcube<S: Scalar>(p: &[S], alpha: &KDirection<S>, level: i32) -> Result<PolyChain<S>> {
    qcube_scaled(p, alpha, level, S::one())
}

fn qcube_scaled<S: Scalar>(p: &[S], alpha: &KDirection<S>, level: i32, weight: S) -> Result<PolyChain<S>> {
    let k = alpha.grade();
    if alpha.ambient() != p.len() {
        return Err(ChainletError::DimensionMismatch { expected: alpha.ambient(), found: p.len() });
    }
    if k == 0 {
        let mut c = PolyChain::zero(p.len(), 0)?;
        c.push(weight, Simplex::point(p.to_vec())?)?;
        return Ok(c);
    }
    let cube = Cube::new(p.to_vec(), alpha.frame().to_vec(), S::pow2(-level), 1)?;
    let mut c = PolyChain::zero(p.len(), k)?;
    c.push(weight * S::pow2(k as i32 * level), cube)?;
    Ok(c)
}

fn check_total(count: usize) -> Result<()> {
    if count > MAX_ELEMENTS {
        return Err(ChainletError::Invalid(format!("conversion exceeds {MAX_ELEMENTS} elements")));
    }
    Ok(())
}

/// Midpoint elements of the cells of `p` at scale `2^{-ℓ}`. Dyadic cubes are
/// refined to level `ℓ`; other cubes are split evenly until their edge is at
/// most `2^{-ℓ}`; simplices are bisected along their longest edge until
/// their diameter is at most `2^{-ℓ}`. Every piece `σ` with coefficient `a`
/// becomes `a M(σ) · (Vec(σ)/M(σ))_{centre}`.
pub fn elementize<S: Scalar>(p: &PolyChain<S>, level: i32) -> Result<ElementaryChain<S>> {
    let n = p.ambient();
    let k = p.grade();
    let mut out = ElementaryChain::zero(n, k)?;
    let h = S::pow2(-level);
    for t in p.terms() {
        match &t.cell {
            Cell::Simplex(s) if s.dim() == 0 => {
                out.push(t.coeff, s.vertices()[0].clone(), KDirection::unit_scalar(n), S::one())?;
            }
            Cell::Cube(c) if c.dim() == 0 => {
                let sign = S::lit(c.sign() as f64);
                out.push(t.coeff * sign, c.center().to_vec(), KDirection::unit_scalar(n), S::one())?;
            }
            Cell::Cube(c) => {
                let sign = S::lit(c.sign() as f64);
                let dir = KDirection::from_orthonormal_frame(n, c.frame().to_vec())?;
                if let Some(d) = c.dyadic() {
                    let kids = d.subdivide(level.max(d.level)).ok_or_else(|| {
                        ChainletError::Invalid(format!("refinement from level {} to {level} is too deep", d.level))
                    })?;
                    check_total(out.len() + kids.len())?;
                    let m = S::pow2(-(k as i32) * level.max(d.level));
                    for kid in kids {
                        out.push(t.coeff * sign * m, kid.center.iter().map(|x| x.to_scalar()).collect(), dir.clone(), S::one())?;
                    }
                } else {
                    let mut splits = 0i32;
                    while c.edge() / S::pow2(splits) > h && splits < 24 {
                        splits += 1;
                    }
                    let per = 1usize << splits;
                    check_total(out.len() + per.pow(k as u32))?;
                    let sub = c.edge() / S::lit(per as f64);
                    let m = sub.powi(k as i32);
                    let offsets: Vec<S> =
                        (0..per).map(|j| (S::lit(j as f64) + S::lit(0.5)) * sub - c.edge() * S::lit(0.5)).collect();
                    for idx in 0..per.pow(k as u32) {
                        let mut centre = c.center().to_vec();
                        let mut rest = idx;
                        for a in c.frame() {
                            let o = offsets[rest % per];
                            rest /= per;
                            centre.iter_mut().zip(a).for_each(|(x, &ai)| *x = *x + o * ai);
                        }
                        out.push(t.coeff * sign * m, centre, dir.clone(), S::one())?;
                    }
                }
            }
            Cell::Simplex(s) => {
                let dir = KDirection::from_frame(n, &s.edges())?;
                let mut stack = vec![s.clone()];
                while let Some(piece) = stack.pop() {
                    if piece.diameter() > h {
                        let (a, b) = piece.bisect();
                        stack.push(b);
                        stack.push(a);
                        check_total(out.len() + stack.len())?;
                    } else {
                        out.push(t.coeff * piece.mass(), piece.centroid(), dir.clone(), S::one())?;
                    }
                }
            }
        }
    }
    Ok(out.sorted())
}

/// `Σ b_i M(α_i) Q_ℓ(p_i, α_i/M(α_i))`. Zero-mass terms are dropped.
pub fn cubeize<S: Scalar>(e: &ElementaryChain<S>, level: i32) -> Result<PolyChain<S>> {
    let mut out = PolyChain::zero(e.n, e.k)?;
    for t in &e.terms {
        if t.alpha_mass == S::zero() || t.b == S::zero() {
            continue;
        }
        for term in qcube_scaled(&t.p, &t.direction, level, t.b * t.alpha_mass)?.terms() {
            out.push(term.coeff, term.cell.clone())?;
        }
    }
    Ok(out)
}

/// `Σ b_i ω(p_i; α_i)`, with no quadrature.
pub fn integrate_elementary<S: Scalar>(form: &FormField<S>, e: &ElementaryChain<S>) -> Result<S> {
    if form.ambient() != e.n {
        return Err(ChainletError::DimensionMismatch { expected: form.ambient(), found: e.n });
    }
    if form.degree() != e.k {
        return Err(ChainletError::DimensionMismatch { expected: form.degree(), found: e.k });
    }
    Ok(compensated_sum(e.terms.iter().map(|t| t.b * t.alpha_mass * form.eval(&t.p, &t.direction.kvector()))))
}

/// `(b, p, α) ↦ (b, p, ⋆α)`.
pub fn star_elementary<S: Scalar>(e: &ElementaryChain<S>) -> ElementaryChain<S> {
    let mut out = ElementaryChain { n: e.n, k: e.n - e.k, terms: Vec::with_capacity(e.terms.len()) };
    for t in &e.terms {
        let (dir, sign) = t.direction.complement();
        out.terms.push(Element { b: t.b * sign, p: t.p.clone(), direction: dir, alpha_mass: t.alpha_mass });
    }
    out.sorted()
}

/// `(b, p, α) ↦ (b, f(p), Λ^k Df_p α)`. Where `Df_p` collapses `α` the term
/// keeps its old direction with mass zero.
pub fn pushforward<S: Scalar>(f: &SmoothMap<S>, e: &ElementaryChain<S>) -> Result<ElementaryChain<S>> {
    if f.n_in() != e.n {
        return Err(ChainletError::DimensionMismatch { expected: f.n_in(), found: e.n });
    }
    let m = f.n_out();
    if e.k > m {
        return Err(ChainletError::GradeOverflow { grade: e.k, ambient: m });
    }
    let mut out = ElementaryChain::zero(m, e.k)?;
    for t in &e.terms {
        let jac = f.jacobian(&t.p);
        let image: Vec<Vec<S>> = t
            .direction
            .frame()
            .iter()
            .map(|a| (0..m).map(|i| jac[i].iter().zip(a).map(|(&j, &x)| j * x).sum()).collect())
            .collect();
        let q = f.apply(&t.p);
        match gram_schmidt(&image) {
            Some((frame, vol)) => out.push(t.b, q, KDirection::from_orthonormal_frame(m, frame)?, t.alpha_mass * vol)?,
            None => {
                let dir = if m == e.n { t.direction.clone() } else { KDirection::axis(m, &(0..e.k).collect::<Vec<_>>())? };
                out.push(t.b, q, dir, S::zero())?;
            }
        }
    }
    Ok(out.sorted())
}

/// `cubeize(⋆ elementize(P, ℓ), ℓ)`: the level-`ℓ` geometric star of a
/// polyhedral chain.
pub fn star_at_level<S: Scalar>(p: &PolyChain<S>, level: i32) -> Result<PolyChain<S>> {
    cubeize(&star_elementary(&elementize(p, level)?), level)
}

/// `⋆ ∂ ⋆ P` at level `ℓ`.
pub fn coboundary_at_level<S: Scalar>(p: &PolyChain<S>, level: i32) -> Result<PolyChain<S>> {
    let s = star_at_level(p, level)?;
    if s.grade() == 0 {
        return PolyChain::zero(p.ambient(), p.grade() + 1);
    }
    star_at_level(&s.boundary().canonicalize(), level)
}

/// `(∂◇ + ◇∂) P` at level `ℓ`.
pub fn laplace_at_level<S: Scalar>(p: &PolyChain<S>, level: i32) -> Result<PolyChain<S>> {
    let n = p.ambient();
    let k = p.grade();
    let mut out = PolyChain::zero(n, k)?;
    if k < n {
        out = out.add(&coboundary_at_level(p, level)?.boundary().canonicalize())?;
    }
    if k > 0 {
        out = out.add(&coboundary_at_level(&p.boundary().canonicalize(), level)?)?;
    }
    Ok(out.canonicalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::builtin_form;

    #[test]
    fn qcube_has_unit_mass_and_direction() {
        let a = KDirection::<f64>::from_frame(3, &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        for l in 0..5 {
            let q = qcube(&[0.1, 0.2, 0.3], &a, l).unwrap();
            assert!((q.mass() - 1.0).abs() < 1e-14);
            assert!(q.vec().max_abs_diff(&a.kvector()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn unit_square_elementizes_to_4_pow_l_elements() {
        let sq = PolyChain::<f64>::unit_cube(2, &[0, 1]).unwrap();
        let e = elementize(&sq, 3).unwrap();
        assert_eq!(e.len(), 64);
        assert_eq!(e.mass(), 1.0);
        let back = cubeize(&e, 3).unwrap().canonicalize();
        assert_eq!(back, sq.refine_to_level(3).unwrap().canonicalize());
    }

    #[test]
    fn element_round_trip() {
        let a = KDirection::<f64>::axis(2, &[0]).unwrap();
        let e = elementize(&qcube(&[0.25, 0.5], &a, 4).unwrap(), 4).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.terms()[0].p, vec![0.25, 0.5]);
        assert_eq!(e.terms()[0].b * e.terms()[0].alpha_mass, 1.0);
        assert_eq!(e.terms()[0].direction, a);
    }

    #[test]
    fn star_of_e1_in_r3() {
        let e = ElementaryChain::<f64>::element(vec![1.0, 2.0, 3.0], &[vec![1.0, 0.0, 0.0]]).unwrap();
        let s = star_elementary(&e);
        assert_eq!(s.grade(), 2);
        assert_eq!(s.vec(), KVector::basis(3, &[1, 2]).unwrap());
        assert_eq!(s.mass(), e.mass());
    }

    #[test]
    fn unit_element_dxdy() {
        let e = ElementaryChain::<f64>::element(vec![0.3, 0.4], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let w = builtin_form::<f64>("area2", 2).unwrap();
        assert_eq!(integrate_elementary(&w, &e).unwrap(), 1.0);
    }

    #[test]
    fn doubling_map_pushes_e1_to_2e1() {
        let f = SmoothMap::<f64>::affine(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]);
        let e = ElementaryChain::element(vec![0.5, -1.0], &[vec![1.0, 0.0]]).unwrap();
        let pushed = pushforward(&f, &e).unwrap();
        assert_eq!(pushed.terms()[0].p, vec![1.0, -2.0]);
        assert_eq!(pushed.vec(), KVector::basis(2, &[0]).unwrap().scale(2.0));
    }

    #[test]
    fn coboundary_of_a_point_is_a_ring() {
        let mut p = PolyChain::<f64>::zero(2, 0).unwrap();
        p.push(1.0, Simplex::point(vec![0.0, 0.0]).unwrap()).unwrap();
        let ring = coboundary_at_level(&p, 3).unwrap();
        assert_eq!(ring.grade(), 1);
        assert_eq!(ring.len(), 4);
        // Four segments across the edges of the square around p, all
        // oriented towards p.
        for t in ring.terms() {
            let c = t.cell.centroid();
            let v = t.cell.vec().scale(t.coeff);
            let inward = -(v.coeff(crate::Blade::from_indices(&[0])) * c[0] + v.coeff(crate::Blade::from_indices(&[1])) * c[1]);
            assert!(inward > 0.0);
            assert!((c[0].abs() + c[1].abs() - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip() {
        let sq = PolyChain::<f64>::unit_cube(2, &[0, 1]).unwrap();
        let e = elementize(&sq, 1).unwrap();
        let back = ElementaryChain::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }
}
