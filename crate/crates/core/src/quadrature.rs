//! Globally adaptive cubature on boxes and simplices.
//!
//! Boxes use tensor Gauss–Legendre rules (3 points per axis, degree 5,
//! against 2 points, degree 3). Simplices use Grundmann–Möller rules of
//! degree 5 against degree 3. The region with the largest error estimate is
//! bisected until the summed estimate meets the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{ChainletError, Result};
use crate::geom::factorial;
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub max_depth: usize,
    pub max_regions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { max_depth: 20, max_regions: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<S> {
    pub value: S,
    pub error: S,
    pub regions: usize,
}

/// A fixed rule on a reference domain: nodes and weights.
#[derive(Debug, Clone)]
struct Rule {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

const GL2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];
const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_9),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];

/// Tensor rule on `[0,1]^k`.
fn tensor_rule(k: usize, one_d: &[(f64, f64)]) -> Rule {
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0f64];
    for _ in 0..k {
        let mut nn = Vec::new();
        let mut nw = Vec::new();
        for (p, w) in nodes.iter().zip(&weights) {
            for &(x, wx) in one_d {
                let mut q = p.clone();
                q.push(0.5 * (x + 1.0));
                nn.push(q);
                nw.push(w * wx * 0.5);
            }
        }
        nodes = nn;
        weights = nw;
    }
    Rule { nodes, weights }
}

/// All `β ∈ N^{parts}` with `|β| = total`.
fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Grundmann–Möller rule of degree `2s+1` on the unit simplex
/// `{λ ≥ 0, Σλ ≤ 1} ⊂ R^k`, normalized to integrate 1 to `1/k!`.
fn grundmann_moller(k: usize, s: usize) -> Rule {
    let d = 2 * s + 1;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let denom = (d + k - 2 * i) as f64;
        let w = if i % 2 == 0 { 1.0 } else { -1.0 } * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
            / (factorial(i) * factorial(d + k - i));
        for beta in compositions(k + 1, s - i) {
            nodes.push(beta[1..].iter().map(|&b| (2 * b + 1) as f64 / denom).collect::<Vec<f64>>());
            weights.push(w);
        }
    }
    let total: f64 = weights.iter().sum();
    let target = 1.0 / factorial(k);
    Rule { nodes, weights: weights.into_iter().map(|w| w * target / total).collect() }
}

/// Integration domain in parameter space.
#[derive(Debug, Clone)]
pub enum Domain<S> {
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<S>, hi: Vec<S> },
    /// Simplex given by its `k+1` vertices in `R^k`.
    Simplex(Vec<Vec<S>>),
}

impl<S: Scalar> Domain<S> {
    pub fn unit_box(k: usize) -> Self {
        Domain::Box { lo: vec![S::zero(); k], hi: vec![S::one(); k] }
    }

    pub fn unit_simplex(k: usize) -> Self {
        let mut v = vec![vec![S::zero(); k]];
        for i in 0..k {
            let mut e = vec![S::zero(); k];
            e[i] = S::one();
            v.push(e);
        }
        Domain::Simplex(v)
    }

    fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Simplex(v) => v.len() - 1,
        }
    }

    fn split(&self) -> (Domain<S>, Domain<S>) {
        match self {
            Domain::Box { lo, hi } => {
                let axis = (0..lo.len())
                    .max_by(|&a, &b| (hi[a] - lo[a]).partial_cmp(&(hi[b] - lo[b])).unwrap_or(Ordering::Equal))
                    .expect("nonempty box");
                let mid = (lo[axis] + hi[axis]) * S::lit(0.5);
                let mut h1 = hi.clone();
                h1[axis] = mid;
                let mut l2 = lo.clone();
                l2[axis] = mid;
                (Domain::Box { lo: lo.clone(), hi: h1 }, Domain::Box { lo: l2, hi: hi.clone() })
            }
            Domain::Simplex(v) => {
                let (mut bi, mut bj, mut best) = (0, 1, -S::one());
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        let d: S = v[i].iter().zip(&v[j]).map(|(&a, &b)| (a - b) * (a - b)).sum();
                        if d > best {
                            best = d;
                            bi = i;
                            bj = j;
                        }
                    }
                }
                let mid: Vec<S> = v[bi].iter().zip(&v[bj]).map(|(&a, &b)| (a + b) * S::lit(0.5)).collect();
                let mut a = v.clone();
                let mut b = v.clone();
                a[bj] = mid.clone();
                b[bi] = mid;
                (Domain::Simplex(a), Domain::Simplex(b))
            }
        }
    }
}

struct Rules {
    high: Rule,
    low: Rule,
}

const MAX_RULE_DIM: usize = 12;
static BOX_RULES: [OnceLock<Rules>; MAX_RULE_DIM + 1] = [const { OnceLock::new() }; MAX_RULE_DIM + 1];
static SIMPLEX_RULES: [OnceLock<Rules>; MAX_RULE_DIM + 1] = [const { OnceLock::new() }; MAX_RULE_DIM + 1];

impl Rules {
    fn for_domain<S: Scalar>(d: &Domain<S>) -> &'static Rules {
        let k = d.dim();
        match d {
            Domain::Box { .. } => BOX_RULES[k].get_or_init(|| Rules { high: tensor_rule(k, &GL3), low: tensor_rule(k, &GL2) }),
            Domain::Simplex(_) => {
                SIMPLEX_RULES[k].get_or_init(|| Rules { high: grundmann_moller(k, 2), low: grundmann_moller(k, 1) })
            }
        }
    }

    /// `(high, low, Σ|w f|)` on a region.
    fn apply<S: Scalar, F: Fn(&[S]) -> S>(&self, d: &Domain<S>, f: &F) -> (S, S, S) {
        match d {
            Domain::Box { lo, hi } => {
                let vol: S = lo.iter().zip(hi).map(|(&a, &b)| b - a).fold(S::one(), |x, y| x * y);
                let map = |t: &[S]| -> Vec<S> { t.iter().enumerate().map(|(i, &ti)| lo[i] + (hi[i] - lo[i]) * ti).collect() };
                let (h, a) = eval_rule(&self.high, &map, f);
                let (l, _) = eval_rule(&self.low, &map, f);
                (h * vol, l * vol, a * vol)
            }
            Domain::Simplex(v) => {
                let k = v.len() - 1;
                let edges: Vec<Vec<S>> = v[1..].iter().map(|p| p.iter().zip(&v[0]).map(|(&a, &b)| a - b).collect()).collect();
                let jac = crate::exterior::det(crate::exterior::transpose(&edges)).abs();
                let jac = if k == 0 { S::one() } else { jac };
                let map = |t: &[S]| -> Vec<S> {
                    let mut x = v[0].clone();
                    for (ti, e) in t.iter().zip(&edges) {
                        x.iter_mut().zip(e).for_each(|(xi, &ei)| *xi = *xi + *ti * ei);
                    }
                    x
                };
                let (h, a) = eval_rule(&self.high, &map, f);
                let (l, _) = eval_rule(&self.low, &map, f);
                (h * jac, l * jac, a * jac)
            }
        }
    }
}

fn eval_rule<S: Scalar, M: Fn(&[S]) -> Vec<S>, F: Fn(&[S]) -> S>(rule: &Rule, map: &M, f: &F) -> (S, S) {
    let mut vals = Vec::with_capacity(rule.weights.len());
    let mut abs = S::zero();
    let mut t = Vec::new();
    for (x, &w) in rule.nodes.iter().zip(&rule.weights) {
        t.clear();
        t.extend(x.iter().map(|&xi| S::lit(xi)));
        let v = S::lit(w) * f(&map(&t));
        abs = abs + v.abs();
        vals.push(v);
    }
    (compensated_sum(vals), abs)
}

struct Region<S> {
    domain: Domain<S>,
    value: S,
    error: S,
    depth: usize,
}

impl<S: Scalar> PartialEq for Region<S> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<S: Scalar> Eq for Region<S> {}
impl<S: Scalar> PartialOrd for Region<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> Ord for Region<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

/// Integrates `f` over `domain` to absolute tolerance `tol`.
pub fn integrate<S: Scalar, F: Fn(&[S]) -> S>(f: F, domain: Domain<S>, tol: S, opts: QuadOptions) -> Result<QuadResult<S>> {
    if domain.dim() == 0 {
        let p = match &domain {
            Domain::Box { lo, .. } => lo.clone(),
            Domain::Simplex(v) => v[0].clone(),
        };
        return Ok(QuadResult { value: f(&p), error: S::zero(), regions: 1 });
    }
    let rules = Rules::for_domain(&domain);
    let floor_factor = S::epsilon() * S::lit(64.0);
    let assess = |d: Domain<S>, depth: usize| -> Region<S> {
        let (h, l, a) = rules.apply(&d, &f);
        let err = (h - l).abs();
        // Differences at the roundoff level carry no information.
        let err = if err <= floor_factor * a { S::zero() } else { err };
        Region { domain: d, value: h, error: err, depth }
    };
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Region<S>> = Vec::new();
    heap.push(assess(domain, 0));
    let mut count = 1usize;
    let mut running = heap.peek().map_or(S::zero(), |r| r.error);
    loop {
        if running <= tol {
            running = compensated_sum(heap.iter().chain(&done).map(|r| r.error));
            if running <= tol {
                break;
            }
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= opts.max_depth || count >= opts.max_regions {
            done.push(worst);
            if count >= opts.max_regions {
                break;
            }
            continue;
        }
        running = running - worst.error;
        let (a, b) = worst.domain.split();
        let (a, b) = (assess(a, worst.depth + 1), assess(b, worst.depth + 1));
        running = running + a.error + b.error;
        heap.push(a);
        heap.push(b);
        count += 1;
    }
    let all: Vec<&Region<S>> = heap.iter().chain(&done).collect();
    let value = compensated_sum(all.iter().map(|r| r.value));
    let error = compensated_sum(all.iter().map(|r| r.error));
    if error > tol {
        return Err(ChainletError::NonConvergence { partial: value.as_f64(), error_estimate: error.as_f64() });
    }
    Ok(QuadResult { value, error, regions: count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gm_rules_integrate_monomials() {
        // ∫_T x^2 y over the unit triangle = 2!·1!/5! = 1/60.
        let r = grundmann_moller(2, 2);
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(p, w)| w * p[0] * p[0] * p[1]).sum();
        assert!((v - 1.0 / 60.0).abs() < 1e-15);
        // Degree 5 in 3D: ∫ x^3 y z^1 = 3!·1!·1!/(3+1+1+3)! = 6/40320.
        let r = grundmann_moller(3, 2);
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(3) * p[1] * p[2]).sum();
        assert!((v - 6.0 / 40320.0).abs() < 1e-16);
    }

    #[test]
    fn adaptive_box_and_simplex() {
        let r = integrate(|x: &[f64]| (x[0] * 10.0).sin(), Domain::unit_box(1), 1e-12, QuadOptions::default()).unwrap();
        assert!((r.value - (1.0 - 10f64.cos()) / 10.0).abs() < 1e-12);
        let r = integrate(|x: &[f64]| (x[0] + x[1]).exp(), Domain::unit_simplex(2), 1e-11, QuadOptions::default()).unwrap();
        // ∫_T e^{x+y} = 1 (substituting s = x+y: ∫_0^1 s e^s ds = 1).
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn singular_integrand_reports_partial() {
        let opts = QuadOptions { max_depth: 6, max_regions: 100 };
        let e = integrate(|x: &[f64]| 1.0 / x[0].abs().sqrt().max(1e-300), Domain::Box { lo: vec![-1.0], hi: vec![1.0] }, 1e-14, opts);
        assert!(matches!(e, Err(ChainletError::NonConvergence { .. })));
    }
}
