//! Smooth maps `f: R^n → R^m` with analytic or finite-difference Jacobians.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

pub type MapFn<S> = Arc<dyn Fn(&[S]) -> Vec<S> + Send + Sync>;
pub type JacFn<S> = Arc<dyn Fn(&[S]) -> Vec<Vec<S>> + Send + Sync>;

/// Central difference step for Jacobians and derivatives.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone)]
pub struct SmoothMap<S = f64> {
    n_in: usize,
    n_out: usize,
    f: MapFn<S>,
    jac: Option<JacFn<S>>,
}

impl<S: Scalar> fmt::Debug for SmoothMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("n_in", &self.n_in)
            .field("n_out", &self.n_out)
            .field("analytic_jacobian", &self.jac.is_some())
            .finish()
    }
}

impl<S: Scalar> SmoothMap<S> {
    pub fn new(n_in: usize, n_out: usize, f: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static) -> Self {
        SmoothMap { n_in, n_out, f: Arc::new(f), jac: None }
    }

    /// Attaches an analytic Jacobian (`n_out × n_in`, rows are outputs).
    pub fn with_jacobian(mut self, jac: impl Fn(&[S]) -> Vec<Vec<S>> + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    pub fn identity(n: usize) -> Self {
        let eye: Vec<Vec<S>> = (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        SmoothMap::affine(eye, vec![S::zero(); n])
    }

    /// `x ↦ A x + b`.
    pub fn affine(a: Vec<Vec<S>>, b: Vec<S>) -> Self {
        let n_out = a.len();
        let n_in = a.first().map_or(0, Vec::len);
        let a2 = a.clone();
        SmoothMap::new(n_in, n_out, move |x| {
            a2.iter().zip(&b).map(|(row, &bi)| row.iter().zip(x).map(|(&r, &xi)| r * xi).sum::<S>() + bi).collect()
        })
        .with_jacobian(move |_| a.clone())
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        (self.f)(x)
    }

    /// `Df(x)`, analytic when available, otherwise central differences.
    pub fn jacobian(&self, x: &[S]) -> Vec<Vec<S>> {
        if let Some(j) = &self.jac {
            return j(x);
        }
        let h = S::lit(FD_STEP);
        let mut out = vec![vec![S::zero(); self.n_in]; self.n_out];
        let mut xp = x.to_vec();
        for j in 0..self.n_in {
            xp[j] = x[j] + h;
            let fp = (self.f)(&xp);
            xp[j] = x[j] - h;
            let fm = (self.f)(&xp);
            xp[j] = x[j];
            for i in 0..self.n_out {
                out[i][j] = (fp[i] - fm[i]) / (h + h);
            }
        }
        out
    }
}
