//! Exterior algebra of `R^n`: k-vectors, k-directions, wedge, mass and the
//! Hodge star on multivectors.
//!
//! A [`KVector`] stores its coordinates over the orthonormal basis `e_I`
//! sparsely, keyed by a [`Blade`] bitmask of the increasing index set `I`.
//! The star follows the convention `e_I ∧ ⋆e_I = +e_{1…n}`, so for a unit
//! simple k-vector `α` we have `α ∧ ⋆α = +e_{1…n}` and `⋆⋆ = (−1)^{k(n−k)}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ChainletError, Result};
use crate::scalar::Scalar;

/// Largest supported ambient dimension; index sets live in a `u16`.
pub const MAX_DIM: usize = 12;

/// An increasing index set `I ⊆ {0..n−1}` stored as a bitmask (bit `i` is
/// the basis vector `e_{i+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Blade(pub u16);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Builds a blade from 0-based indices. Order and duplicates are ignored.
    pub fn from_indices(indices: &[usize]) -> Blade {
        Blade(indices.iter().fold(0u16, |m, &i| m | (1 << i)))
    }

    pub fn full(n: usize) -> Blade {
        Blade(((1u32 << n) - 1) as u16)
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// The 0-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|&i| self.contains(i)).collect()
    }

    pub fn fits(self, n: usize) -> bool {
        (self.0 as u32) >> n == 0
    }

    /// `e_a ∧ e_b = sign · e_{a∪b}`; `None` when the sets intersect.
    pub fn wedge(self, other: Blade) -> Option<(Blade, i8)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Count pairs (i ∈ self, j ∈ other) with i > j.
        let mut swaps = 0u32;
        for j in other.indices() {
            swaps += (self.0 >> (j + 1)).count_ones();
        }
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        Some((Blade(self.0 | other.0), sign))
    }

    /// `⋆e_I = sign(I, I^c) e_{I^c}` in ambient dimension `n`.
    pub fn star(self, n: usize) -> (Blade, i8) {
        let complement = Blade(Blade::full(n).0 & !self.0);
        let (_, sign) = self.wedge(complement).expect("disjoint by construction");
        (complement, sign)
    }

    /// Parses `"1,2"` or `"12"` (1-based indices) into a blade; `""` is the
    /// scalar blade.
    pub fn parse(s: &str) -> Option<Blade> {
        let s = s.trim().trim_start_matches('e');
        if s.is_empty() {
            return Some(Blade::SCALAR);
        }
        let parts: Vec<&str> = if s.contains(',') {
            s.split(',').map(str::trim).collect()
        } else {
            s.split("").filter(|p| !p.is_empty()).collect()
        };
        let mut mask = 0u16;
        let mut last = 0usize;
        for p in parts {
            let i: usize = p.parse().ok()?;
            if i == 0 || i > MAX_DIM || i <= last {
                return None;
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Some(Blade(mask))
    }

    /// Comma separated 1-based indices, the JSON key format for forms.
    pub fn key(self) -> String {
        self.indices()
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        let idx = self.indices();
        let sep = if idx.iter().any(|&i| i >= 9) { "," } else { "" };
        let s: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", s.join(sep))
    }
}

/// All blades of grade `k` in dimension `n`, in lexicographic order.
pub fn blades(n: usize, k: usize) -> Vec<Blade> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Blade>) {
        if cur.len() == k {
            out.push(Blade::from_indices(cur));
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(ChainletError::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// An element of `Λ^k(R^n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct KVector<S = f64> {
    n: usize,
    grade: usize,
    coeffs: BTreeMap<Blade, S>,
}

impl<S: Scalar> KVector<S> {
    pub fn zero(n: usize, grade: usize) -> Result<Self> {
        check_dim(n)?;
        if grade > n {
            return Err(ChainletError::GradeOverflow { grade, ambient: n });
        }
        Ok(KVector { n, grade, coeffs: BTreeMap::new() })
    }

    /// The grade-0 vector `value · 1`.
    pub fn scalar(n: usize, value: S) -> Self {
        let mut v = KVector::zero(n, 0).expect("valid dimension");
        v.set(Blade::SCALAR, value);
        v
    }

    /// `e_{i_1} ∧ … ∧ e_{i_k}` for 0-based indices taken in the given order.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        let mut acc = KVector::scalar(n, S::one());
        for &i in indices {
            if i >= n {
                return Err(ChainletError::DimensionMismatch { expected: n, found: i + 1 });
            }
            let mut e = vec![S::zero(); n];
            e[i] = S::one();
            acc = acc.wedge(&KVector::from_vector(&e)?)?;
        }
        Ok(acc)
    }

    pub fn from_blade(n: usize, blade: Blade, value: S) -> Result<Self> {
        let mut v = KVector::zero(n, blade.grade())?;
        if !blade.fits(n) {
            return Err(ChainletError::DimensionMismatch { expected: n, found: 16 - blade.0.leading_zeros() as usize });
        }
        v.set(blade, value);
        Ok(v)
    }

    pub fn from_vector(v: &[S]) -> Result<Self> {
        let n = v.len();
        let mut out = KVector::zero(n, 1)?;
        for (i, &x) in v.iter().enumerate() {
            out.set(Blade(1 << i), x);
        }
        Ok(out)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeff(&self, blade: Blade) -> S {
        self.coeffs.get(&blade).copied().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Blade, S)> + '_ {
        self.coeffs.iter().map(|(&b, &c)| (b, c))
    }

    pub(crate) fn set(&mut self, blade: Blade, value: S) {
        debug_assert_eq!(blade.grade(), self.grade);
        if value == S::zero() {
            self.coeffs.remove(&blade);
        } else {
            self.coeffs.insert(blade, value);
        }
    }

    fn accumulate(&mut self, blade: Blade, value: S) {
        let v = self.coeff(blade) + value;
        self.set(blade, v);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exterior product; graded-anticommutative and associative.
    pub fn wedge(&self, other: &KVector<S>) -> Result<KVector<S>> {
        if self.n != other.n {
            return Err(ChainletError::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = KVector::zero(self.n, self.grade + other.grade)?;
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                if let Some((c, sign)) = a.wedge(b) {
                    let v = ca * cb;
                    out.accumulate(c, if sign > 0 { v } else { -v });
                }
            }
        }
        Ok(out)
    }

    /// Euclidean norm over the orthonormal basis `{e_I}`.
    pub fn mass(&self) -> S {
        self.coeffs.values().map(|&c| c * c).sum::<S>().sqrt()
    }

    pub fn dot(&self, other: &KVector<S>) -> S {
        self.iter().map(|(b, c)| c * other.coeff(b)).sum()
    }

    /// Hodge star: linear extension of `⋆e_I = sign(I, I^c) e_{I^c}`.
    pub fn star(&self) -> KVector<S> {
        let mut out = KVector::zero(self.n, self.n - self.grade).expect("complement grade fits");
        for (b, c) in self.iter() {
            let (cb, sign) = b.star(self.n);
            out.set(cb, if sign > 0 { c } else { -c });
        }
        out
    }

    pub fn scale(&self, s: S) -> KVector<S> {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c = *c * s);
        out.coeffs.retain(|_, c| *c != S::zero());
        out
    }

    /// Largest absolute coordinate difference; `None` when the grades differ.
    pub fn max_abs_diff(&self, other: &KVector<S>) -> Option<S> {
        if self.n != other.n || self.grade != other.grade {
            return None;
        }
        let mut worst = S::zero();
        for (b, _) in self.iter().chain(other.iter()) {
            worst = worst.max((self.coeff(b) - other.coeff(b)).abs());
        }
        Some(worst)
    }

    /// Image under the induced map `Λ^k L` of a linear map given as an
    /// `m × n` matrix (rows are output coordinates).
    pub fn push_linear(&self, jacobian: &[Vec<S>]) -> Result<KVector<S>> {
        let m = jacobian.len();
        let mut out = KVector::zero(m, self.grade)?;
        for (b, c) in self.iter() {
            let mut img = KVector::scalar(m, c);
            for i in b.indices() {
                let col: Vec<S> = jacobian.iter().map(|row| row[i]).collect();
                img = img.wedge(&KVector::from_vector(&col)?)?;
            }
            for (ib, ic) in img.iter() {
                out.accumulate(ib, ic);
            }
        }
        Ok(out)
    }
}

impl<S: Scalar> Add for &KVector<S> {
    type Output = KVector<S>;
    fn add(self, rhs: &KVector<S>) -> KVector<S> {
        assert!(self.n == rhs.n && self.grade == rhs.grade, "k-vector shapes differ");
        let mut out = self.clone();
        for (b, c) in rhs.iter() {
            out.accumulate(b, c);
        }
        out
    }
}

impl<S: Scalar> Sub for &KVector<S> {
    type Output = KVector<S>;
    fn sub(self, rhs: &KVector<S>) -> KVector<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &KVector<S> {
    type Output = KVector<S>;
    fn neg(self) -> KVector<S> {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Mul<S> for &KVector<S> {
    type Output = KVector<S>;
    fn mul(self, rhs: S) -> KVector<S> {
        self.scale(rhs)
    }
}

impl<S: Scalar> fmt::Display for KVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(b, c)| format!("{c}·{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The simple k-vector `v_1 ∧ … ∧ v_k`; dependent frames give zero.
pub fn frame_to_kvector<S: Scalar>(n: usize, frame: &[Vec<S>]) -> Result<KVector<S>> {
    check_dim(n)?;
    if frame.len() > n {
        return Err(ChainletError::GradeOverflow { grade: frame.len(), ambient: n });
    }
    let mut acc = KVector::scalar(n, S::one());
    for v in frame {
        if v.len() != n {
            return Err(ChainletError::DimensionMismatch { expected: n, found: v.len() });
        }
        acc = acc.wedge(&KVector::from_vector(v)?)?;
    }
    Ok(acc)
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut d = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == S::zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            d = -d;
        }
        d = d * m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[row][c] = m[row][c] - f * v;
            }
        }
    }
    d
}

/// Modified Gram–Schmidt. Returns the orthonormal frame and the k-volume of
/// the input, or `None` if the frame is (numerically) dependent.
pub(crate) fn gram_schmidt<S: Scalar>(frame: &[Vec<S>]) -> Option<(Vec<Vec<S>>, S)> {
    let scale = frame.iter().map(|v| norm(v)).fold(S::zero(), S::max);
    let mut out: Vec<Vec<S>> = Vec::with_capacity(frame.len());
    let mut volume = S::one();
    for v in frame {
        let mut w = v.clone();
        for q in &out {
            let p = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi = *wi - p * qi);
        }
        let len = norm(&w);
        if len <= S::tol(1e-12) * scale.max(S::one()) {
            return None;
        }
        volume = volume * len;
        w.iter_mut().for_each(|x| *x = *x / len);
        out.push(w);
    }
    Some((out, volume))
}

/// A unit simple k-vector carried together with an orthonormal frame
/// realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct KDirection<S = f64> {
    n: usize,
    frame: Vec<Vec<S>>,
}

impl<S: Scalar> KDirection<S> {
    /// Orthonormalizes an independent frame, keeping its orientation.
    pub fn from_frame(n: usize, frame: &[Vec<S>]) -> Result<Self> {
        check_dim(n)?;
        if frame.len() > n {
            return Err(ChainletError::GradeOverflow { grade: frame.len(), ambient: n });
        }
        if let Some(v) = frame.iter().find(|v| v.len() != n) {
            return Err(ChainletError::DimensionMismatch { expected: n, found: v.len() });
        }
        let (q, _) = gram_schmidt(frame).ok_or_else(|| ChainletError::DegenerateCell("dependent frame".into()))?;
        Ok(Self::build(n, q))
    }

    /// Accepts a frame that is already orthonormal within `1e-12`.
    pub fn from_orthonormal_frame(n: usize, frame: Vec<Vec<S>>) -> Result<Self> {
        check_dim(n)?;
        if frame.len() > n {
            return Err(ChainletError::GradeOverflow { grade: frame.len(), ambient: n });
        }
        let tol = S::tol(1e-12);
        for (i, a) in frame.iter().enumerate() {
            if a.len() != n {
                return Err(ChainletError::DimensionMismatch { expected: n, found: a.len() });
            }
            for (j, b) in frame.iter().enumerate() {
                let target = if i == j { S::one() } else { S::zero() };
                if (dot(a, b) - target).abs() > tol {
                    return Err(ChainletError::NonOrthonormalFrame);
                }
            }
        }
        Ok(Self::build(n, frame))
    }

    /// `e_{i_1} ∧ … ∧ e_{i_k}` for 0-based axes in the given order.
    pub fn axis(n: usize, axes: &[usize]) -> Result<Self> {
        let frame = axes
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(ChainletError::DimensionMismatch { expected: n, found: i + 1 });
                }
                let mut e = vec![S::zero(); n];
                e[i] = S::one();
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_orthonormal_frame(n, frame)
    }

    /// The unit 0-direction `+1`.
    pub fn unit_scalar(n: usize) -> Self {
        Self::build(n, Vec::new())
    }

    fn build(n: usize, frame: Vec<Vec<S>>) -> Self {
        KDirection { n, frame }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Vec<S>] {
        &self.frame
    }

    pub fn kvector(&self) -> KVector<S> {
        frame_to_kvector(self.n, &self.frame).expect("validated frame")
    }

    /// Geometric star: the orthogonal `(n−k)`-direction with complementary
    /// orientation. For `k = n` the result is the 0-direction and the
    /// orientation lands in the returned sign.
    pub fn complement(&self) -> (KDirection<S>, S) {
        let n = self.n;
        let k = self.grade();
        let mut basis = self.frame.clone();
        let mut extra: Vec<Vec<S>> = Vec::new();
        while basis.len() < n {
            // Pick the standard vector with the largest residual.
            let mut best: Option<(S, Vec<S>)> = None;
            for i in 0..n {
                let mut w = vec![S::zero(); n];
                w[i] = S::one();
                for q in &basis {
                    let p = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi = *wi - p * qi);
                }
                let len = norm(&w);
                if best.as_ref().map_or(true, |(b, _)| len > *b) {
                    best = Some((len, w));
                }
            }
            let (len, mut w) = best.expect("n > 0");
            w.iter_mut().for_each(|x| *x = *x / len);
            // One reorthogonalization pass for accuracy.
            for q in &basis {
                let p = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi = *wi - p * qi);
            }
            let len = norm(&w);
            w.iter_mut().for_each(|x| *x = *x / len);
            basis.push(w.clone());
            extra.push(w);
        }
        let d = det(transpose(&basis));
        if k == n {
            let sign = if d >= S::zero() { S::one() } else { -S::one() };
            return (KDirection::unit_scalar(n), sign);
        }
        if d < S::zero() {
            extra[0].iter_mut().for_each(|x| *x = -*x);
        }
        (KDirection::build(n, extra), S::one())
    }

    /// `Some((sorted axes, sign))` when every frame vector is exactly `±e_i`.
    pub fn axis_aligned(&self) -> Option<(Vec<usize>, i8)> {
        let mut axes = Vec::with_capacity(self.frame.len());
        let mut sign = 1i8;
        for v in &self.frame {
            let nz: Vec<usize> = (0..self.n).filter(|&i| v[i] != S::zero()).collect();
            if nz.len() != 1 || v[nz[0]].abs() != S::one() {
                return None;
            }
            if v[nz[0]] < S::zero() {
                sign = -sign;
            }
            axes.push(nz[0]);
        }
        // Parity of the permutation sorting the axes.
        for i in 0..axes.len() {
            for j in i + 1..axes.len() {
                if axes[i] > axes[j] {
                    sign = -sign;
                }
            }
        }
        let mut sorted = axes;
        sorted.sort_unstable();
        Some((sorted, sign))
    }
}

pub(crate) fn transpose<S: Scalar>(cols: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = cols.first().map_or(0, Vec::len);
    (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}
