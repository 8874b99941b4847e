//! Sparse multivariate polynomials with exact derivatives.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S = f64> {
    n: usize,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        Poly::monomial(n, vec![0; n], c)
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Poly::monomial(n, e, S::one())
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: S) -> Self {
        assert_eq!(exps.len(), n, "exponent vector length");
        let mut p = Poly::zero(n);
        p.accumulate(exps, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (S, Vec<u32>)>) -> Self {
        let mut p = Poly::zero(n);
        for (c, e) in terms {
            p.accumulate(e, c);
        }
        p
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: S) {
        let v = self.terms.get(&exps).copied().unwrap_or_else(S::zero) + c;
        if v == S::zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, v);
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], S)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (e, &c) in &self.terms {
            let mut t = c;
            for (xi, &ei) in x.iter().zip(e) {
                if ei > 0 {
                    t = t * xi.powi(ei as i32);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// `∂/∂x_j`.
    pub fn deriv(&self, j: usize) -> Poly<S> {
        let mut out = Poly::zero(self.n);
        for (e, &c) in &self.terms {
            if e[j] > 0 {
                let mut e2 = e.clone();
                e2[j] -= 1;
                out.accumulate(e2, c * S::lit(e[j] as f64));
            }
        }
        out
    }

    pub fn scale(&self, s: S) -> Poly<S> {
        Poly::from_terms(self.n, self.terms.iter().map(|(e, &c)| (c * s, e.clone())))
    }

    pub fn add(&self, o: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        for (e, &c) in &o.terms {
            out.accumulate(e.clone(), c);
        }
        out
    }

    pub fn mul(&self, o: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                out.accumulate(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> S {
        self.terms.values().fold(S::zero(), |m, c| m.max(c.abs()))
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                    .collect();
                if mono.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}·{}", mono.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        // p = 3x^2 y - y + 2
        let p = Poly::from_terms(2, [(3.0, vec![2, 1]), (-1.0, vec![0, 1]), (2.0, vec![0, 0])]);
        assert_eq!(p.eval(&[2.0, 1.0]), 13.0);
        assert_eq!(p.deriv(0), Poly::monomial(2, vec![1, 1], 6.0));
        assert_eq!(p.deriv(1).eval(&[1.0, 5.0]), 2.0);
        assert_eq!(p.degree(), 3);
        assert!(p.add(&p.scale(-1.0)).is_zero());
    }
}
