//! Differential k-forms on `R^n`: evaluation, d, wedge, Hodge star,
//! codifferential, pullback and integration over chains.

mod dictionary;
mod integrate;
mod json;
mod map;
mod norm;
mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{ChainletError, Result};
use crate::exterior::{blades, check_dim, Blade, KVector};
use crate::scalar::Scalar;

pub use dictionary::{builtin_form, builtin_names, exact_dictionary, oracle_dictionary, ORACLE_SEED};
pub use integrate::{integrate_cell, integrate_cell_with, integrate_chain, integrate_chain_with};
pub use json::FormJson;
pub use map::{SmoothMap, FD_STEP};
pub use norm::{form_norm, FormNorm, NormBudget};
pub use poly::Poly;

pub type ScalarFn<S> = Arc<dyn Fn(&[S]) -> S + Send + Sync>;

/// One coefficient function `ω_I`.
#[derive(Clone)]
pub enum Component<S = f64> {
    Poly(Poly<S>),
    Func(ScalarFn<S>),
}

impl<S: Scalar> fmt::Debug for Component<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Poly(p) => write!(f, "Poly({p})"),
            Component::Func(_) => write!(f, "Func(..)"),
        }
    }
}

impl<S: Scalar> Component<S> {
    pub fn func(f: impl Fn(&[S]) -> S + Send + Sync + 'static) -> Self {
        Component::Func(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &[S]) -> S {
        match self {
            Component::Poly(p) => p.eval(x),
            Component::Func(f) => f(x),
        }
    }

    /// `∂/∂x_j`: exact for polynomials, central differences otherwise.
    pub fn partial(&self, j: usize) -> Component<S> {
        match self {
            Component::Poly(p) => Component::Poly(p.deriv(j)),
            Component::Func(f) => {
                let f = f.clone();
                let h = S::lit(FD_STEP);
                Component::func(move |x| {
                    let mut y = x.to_vec();
                    y[j] = x[j] + h;
                    let a = f(&y);
                    y[j] = x[j] - h;
                    let b = f(&y);
                    (a - b) / (h + h)
                })
            }
        }
    }

    pub fn scale(&self, s: S) -> Component<S> {
        match self {
            Component::Poly(p) => Component::Poly(p.scale(s)),
            Component::Func(f) => {
                let f = f.clone();
                Component::func(move |x| s * f(x))
            }
        }
    }

    pub fn add(&self, o: &Component<S>) -> Component<S> {
        match (self, o) {
            (Component::Poly(a), Component::Poly(b)) => Component::Poly(a.add(b)),
            _ => {
                let (a, b) = (self.clone(), o.clone());
                Component::func(move |x| a.eval(x) + b.eval(x))
            }
        }
    }

    pub fn mul(&self, o: &Component<S>) -> Component<S> {
        match (self, o) {
            (Component::Poly(a), Component::Poly(b)) => Component::Poly(a.mul(b)),
            _ => {
                let (a, b) = (self.clone(), o.clone());
                Component::func(move |x| a.eval(x) * b.eval(x))
            }
        }
    }

    fn is_zero_poly(&self) -> bool {
        matches!(self, Component::Poly(p) if p.is_zero())
    }
}

/// A differential k-form `Σ_I ω_I dx^I` on `R^n`.
#[derive(Clone)]
pub struct FormField<S = f64> {
    n: usize,
    k: usize,
    components: BTreeMap<Blade, Component<S>>,
    analytic_d: Option<Arc<FormField<S>>>,
    /// `|ω|_r` for `r = 0, 1, …`; the last entry holds for all larger `r`.
    exact_norms: Option<Vec<S>>,
    support_region: Option<(Vec<S>, Vec<S>)>,
    name: String,
}

impl<S: Scalar> fmt::Debug for FormField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("components", &self.components)
            .field("analytic_d", &self.analytic_d.is_some())
            .field("exact_norms", &self.exact_norms)
            .finish()
    }
}

impl<S: Scalar> FormField<S> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(ChainletError::GradeOverflow { grade: k, ambient: n });
        }
        Ok(FormField {
            n,
            k,
            components: BTreeMap::new(),
            analytic_d: None,
            exact_norms: None,
            support_region: None,
            name: String::new(),
        })
    }

    /// The constant form whose coefficients are those of `covector`.
    pub fn constant(covector: &KVector<S>) -> Self {
        let mut f = FormField::zero(covector.ambient(), covector.grade()).expect("valid k-vector shape");
        for (b, c) in covector.iter() {
            f.components.insert(b, Component::Poly(Poly::constant(covector.ambient(), c)));
        }
        f
    }

    /// `dx_{i_1} ∧ … ∧ dx_{i_k}` for 0-based increasing indices.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        let kv = KVector::basis(n, indices)?;
        Ok(FormField::constant(&kv))
    }

    pub fn with_component(mut self, blade: Blade, c: Component<S>) -> Result<Self> {
        if blade.grade() != self.k || !blade.fits(self.n) {
            return Err(ChainletError::Invalid(format!("component {blade} does not fit a {}-form on R^{}", self.k, self.n)));
        }
        if let Component::Poly(p) = &c {
            if p.vars() != self.n {
                return Err(ChainletError::DimensionMismatch { expected: self.n, found: p.vars() });
            }
        }
        self.analytic_d = None;
        self.exact_norms = None;
        let merged = match self.components.remove(&blade) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero_poly() {
            self.components.insert(blade, merged);
        }
        Ok(self)
    }

    pub fn with_poly(self, indices: &[usize], p: Poly<S>) -> Result<Self> {
        self.with_component(Blade::from_indices(indices), Component::Poly(p))
    }

    pub fn with_fn(self, indices: &[usize], f: impl Fn(&[S]) -> S + Send + Sync + 'static) -> Result<Self> {
        self.with_component(Blade::from_indices(indices), Component::func(f))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches an analytic exterior derivative after checking Stokes on a
    /// few small random cells.
    pub fn with_analytic_d(mut self, d: FormField<S>) -> Result<Self> {
        if d.n != self.n || d.k != self.k + 1 {
            return Err(ChainletError::DimensionMismatch { expected: self.k + 1, found: d.k });
        }
        integrate::stokes_self_check(&self, &d)?;
        self.analytic_d = Some(Arc::new(d));
        Ok(self)
    }

    /// Exact norms `|ω|_0, |ω|_1, …`; the last value holds for every larger
    /// `r`. They must be nondecreasing.
    pub fn with_exact_norms(mut self, norms: Vec<S>) -> Result<Self> {
        if norms.is_empty() || norms.windows(2).any(|w| w[1] < w[0]) || norms.iter().any(|x| *x < S::zero()) {
            return Err(ChainletError::DecreasingNorms);
        }
        self.exact_norms = Some(norms);
        Ok(self)
    }

    pub fn with_support_region(mut self, lo: Vec<S>, hi: Vec<S>) -> Self {
        self.support_region = Some((lo, hi));
        self
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> impl Iterator<Item = (Blade, &Component<S>)> + '_ {
        self.components.iter().map(|(&b, c)| (b, c))
    }

    pub fn component(&self, blade: Blade) -> Option<&Component<S>> {
        self.components.get(&blade)
    }

    pub fn support_region(&self) -> Option<(&[S], &[S])> {
        self.support_region.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn has_analytic_d(&self) -> bool {
        self.analytic_d.is_some()
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.values().all(|c| matches!(c, Component::Poly(_)))
    }

    pub fn exact_norm(&self, r: usize) -> Option<S> {
        self.exact_norms.as_ref().map(|v| v[r.min(v.len() - 1)])
    }

    /// `ω(p; α) = Σ_I ω_I(p) α_I`.
    pub fn eval(&self, p: &[S], alpha: &KVector<S>) -> S {
        debug_assert_eq!(alpha.grade(), self.k);
        alpha.iter().map(|(b, a)| self.components.get(&b).map_or(S::zero(), |c| c.eval(p) * a)).sum()
    }

    /// The covector `Σ_I ω_I(p) e_I` at a point.
    pub fn covector_at(&self, p: &[S]) -> KVector<S> {
        let mut out = KVector::zero(self.n, self.k).expect("valid shape");
        for (b, c) in &self.components {
            out.set(*b, c.eval(p));
        }
        out
    }

    /// Exterior derivative: the analytic one when attached, exact for
    /// polynomial components, central differences otherwise.
    pub fn d(&self) -> Result<FormField<S>> {
        if self.k >= self.n {
            return Err(ChainletError::GradeOverflow { grade: self.k + 1, ambient: self.n });
        }
        if let Some(d) = &self.analytic_d {
            return Ok((**d).clone());
        }
        let mut out = FormField::zero(self.n, self.k + 1)?;
        for (&b, c) in &self.components {
            for j in 0..self.n {
                if let Some((target, sign)) = Blade::from_indices(&[j]).wedge(b) {
                    let part = c.partial(j).scale(S::lit(sign as f64));
                    out = out.with_component(target, part)?;
                }
            }
        }
        Ok(out.with_name(self.derived_name("d")))
    }

    fn derived_name(&self, op: &str) -> String {
        if self.name.is_empty() {
            String::new()
        } else {
            format!("{op}({})", self.name)
        }
    }

    /// Pointwise exterior product.
    pub fn wedge(&self, other: &FormField<S>) -> Result<FormField<S>> {
        if self.n != other.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = FormField::zero(self.n, self.k + other.k)?;
        for (&a, ca) in &self.components {
            for (&b, cb) in &other.components {
                if let Some((c, sign)) = a.wedge(b) {
                    out = out.with_component(c, ca.mul(cb).scale(S::lit(sign as f64)))?;
                }
            }
        }
        Ok(out)
    }

    /// `⋆(f dx^I) = sign(I, I^c) f dx^{I^c}`, so that
    /// `⋆ω(p; ⋆α) = ω(p; α)`.
    pub fn star(&self) -> FormField<S> {
        let mut out = FormField::zero(self.n, self.n - self.k).expect("complement grade fits");
        for (&b, c) in &self.components {
            let (cb, sign) = b.star(self.n);
            out.components.insert(cb, c.scale(S::lit(sign as f64)));
        }
        out.with_name(self.derived_name("⋆"))
    }

    /// `δ = ⋆d⋆`, lowering the degree by one.
    pub fn codifferential(&self) -> Result<FormField<S>> {
        if self.k == 0 {
            return Err(ChainletError::Invalid("codifferential of a 0-form".into()));
        }
        Ok(self.star().d()?.star().with_name(self.derived_name("δ")))
    }

    /// `□ = dδ + δd`; the missing term is dropped in degrees 0 and n.
    pub fn laplacian(&self) -> Result<FormField<S>> {
        let mut out = FormField::zero(self.n, self.k)?;
        if self.k > 0 {
            out = out.add(&self.codifferential()?.d()?)?;
        }
        if self.k < self.n {
            out = out.add(&self.d()?.codifferential()?)?;
        }
        Ok(out.with_name(self.derived_name("□")))
    }

    pub fn add(&self, other: &FormField<S>) -> Result<FormField<S>> {
        if self.n != other.n || self.k != other.k {
            return Err(ChainletError::DimensionMismatch { expected: self.k, found: other.k });
        }
        let mut out = self.clone();
        out.analytic_d = None;
        out.exact_norms = None;
        for (&b, c) in &other.components {
            out = out.with_component(b, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: S) -> FormField<S> {
        let mut out = self.clone();
        out.components = self.components.iter().map(|(&b, c)| (b, c.scale(s))).collect();
        out.analytic_d = self.analytic_d.as_ref().map(|d| Arc::new(d.scale(s)));
        out.exact_norms = self.exact_norms.as_ref().map(|v| v.iter().map(|x| *x * s.abs()).collect());
        out
    }

    /// `(f*ω)(p; α) = ω(f(p); Λ^k Df_p α)`, a form on the source space.
    pub fn pullback(&self, map: &SmoothMap<S>) -> Result<FormField<S>> {
        if map.n_out() != self.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: map.n_out() });
        }
        let src = map.n_in();
        let mut out = FormField::zero(src, self.k)?;
        let comps: Arc<Vec<(Vec<usize>, Component<S>)>> =
            Arc::new(self.components.iter().map(|(b, c)| (b.indices(), c.clone())).collect());
        for target in blades(src, self.k) {
            let cols = target.indices();
            let comps = comps.clone();
            let map = map.clone();
            out = out.with_component(
                target,
                Component::func(move |x| {
                    let y = map.apply(x);
                    let jac = map.jacobian(x);
                    comps
                        .iter()
                        .map(|(rows, c)| {
                            let minor: Vec<Vec<S>> = rows.iter().map(|&r| cols.iter().map(|&cc| jac[r][cc]).collect()).collect();
                            c.eval(&y) * crate::exterior::det(minor)
                        })
                        .sum()
                }),
            )?;
        }
        // d commutes with pullback.
        if self.k < self.n && self.k < src {
            if let Ok(d) = self.d() {
                out.analytic_d = Some(Arc::new(d.pullback(map)?));
            }
        }
        Ok(out.with_name(self.derived_name("f*")))
    }

    /// Integral over a single cell to absolute tolerance `tol`.
    pub fn integrate_cell(&self, cell: &crate::chains::Cell<S>, tol: S) -> Result<S> {
        integrate_cell(self, cell, tol)
    }

    /// `Σ a_i ∫_{σ_i} ω`, each term to `tol/(m |a_i|)`.
    pub fn integrate_chain(&self, chain: &crate::chains::PolyChain<S>, tol: S) -> Result<S> {
        integrate_chain(self, chain, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_dy() -> FormField<f64> {
        FormField::zero(2, 1).unwrap().with_poly(&[1], Poly::var(2, 0)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let area = FormField::<f64>::basis(2, &[0, 1]).unwrap();
        let e12 = KVector::basis(2, &[0, 1]).unwrap();
        assert_eq!(area.eval(&[3.0, -1.0], &e12), 1.0);
        assert_eq!(x_dy().eval(&[2.0, 0.0], &KVector::basis(2, &[1]).unwrap()), 2.0);
    }

    #[test]
    fn derivative_examples() {
        let d = x_dy().d().unwrap();
        let e12 = KVector::basis(2, &[0, 1]).unwrap();
        assert_eq!(d.eval(&[0.3, 0.4], &e12), 1.0);
        let c = FormField::<f64>::basis(3, &[1]).unwrap();
        assert!(c.d().unwrap().components().next().is_none());
        let top = FormField::<f64>::basis(2, &[0, 1]).unwrap();
        assert!(matches!(top.d(), Err(ChainletError::GradeOverflow { .. })));
    }

    #[test]
    fn fd_derivative_matches_polynomial() {
        // f dx + g dy with f = x y^2, g = x^3: d = (3x^2 − 2xy) dx∧dy.
        let f = |x: &[f64]| x[0] * x[1] * x[1];
        let g = |x: &[f64]| x[0].powi(3);
        let w = FormField::zero(2, 1).unwrap().with_fn(&[0], f).unwrap().with_fn(&[1], g).unwrap();
        let d = w.d().unwrap();
        let e12 = KVector::basis(2, &[0, 1]).unwrap();
        for p in [[0.3, -0.2], [1.1, 0.7], [-0.5, 2.0]] {
            let exact = 3.0 * p[0] * p[0] - 2.0 * p[0] * p[1];
            assert!((d.eval(&p, &e12) - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn wedge_and_star_examples() {
        let dx = FormField::<f64>::basis(2, &[0]).unwrap();
        let w = x_dy().wedge(&dx).unwrap();
        let e12 = KVector::basis(2, &[0, 1]).unwrap();
        assert_eq!(w.eval(&[2.0, 5.0], &e12), -2.0);

        // ⋆(x dx + y dy) = x dy − y dx
        let r = FormField::zero(2, 1)
            .unwrap()
            .with_poly(&[0], Poly::var(2, 0))
            .unwrap()
            .with_poly(&[1], Poly::var(2, 1))
            .unwrap();
        let s = r.star();
        let p = [0.7, -0.3];
        assert_eq!(s.eval(&p, &KVector::basis(2, &[1]).unwrap()), 0.7);
        assert_eq!(s.eval(&p, &KVector::basis(2, &[0]).unwrap()), 0.3);

        let f = FormField::zero(1, 1).unwrap().with_poly(&[0], Poly::var(1, 0)).unwrap();
        assert_eq!(f.star().degree(), 0);
        assert_eq!(f.star().eval(&[4.0], &KVector::scalar(1, 1.0)), 4.0);
    }

    #[test]
    fn pullback_of_scaling() {
        let dx = FormField::<f64>::basis(1, &[0]).unwrap();
        let f = SmoothMap::affine(vec![vec![3.0]], vec![0.0]);
        let pb = dx.pullback(&f).unwrap();
        assert_eq!(pb.eval(&[0.2], &KVector::basis(1, &[0]).unwrap()), 3.0);
    }

    #[test]
    fn decreasing_norms_rejected() {
        let dx = FormField::<f64>::basis(1, &[0]).unwrap();
        assert_eq!(dx.with_exact_norms(vec![2.0, 1.0]).unwrap_err(), ChainletError::DecreasingNorms);
    }
}
