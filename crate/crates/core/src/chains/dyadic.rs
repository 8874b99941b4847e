//! Exact dyadic rationals `m · 2^{-e}` and axis-aligned dyadic cubes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// `mant · 2^{-exp}`, normalized so that `mant` is odd (or the value is zero
/// with `exp == 0`). Normalization makes structural equality exact equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: i128,
    exp: i32,
}

/// Shifts beyond this are treated as overflow.
const MAX_SHIFT: i32 = 120;

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mant: 0, exp: 0 };

    pub fn new(mant: i128, exp: i32) -> Dyadic {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn int(v: i64) -> Dyadic {
        Dyadic::new(v as i128, 0)
    }

    /// `2^{-level}`.
    pub fn pow2_neg(level: i32) -> Dyadic {
        Dyadic::new(1, level)
    }

    fn normalize(&mut self) {
        if self.mant == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros() as i32;
        self.mant >>= tz;
        self.exp -= tz;
    }

    pub fn mantissa(self) -> i128 {
        self.mant
    }

    pub fn exponent(self) -> i32 {
        self.exp
    }

    /// Exact conversion of a finite float (every finite binary float is a
    /// dyadic rational). `None` for non-finite input or extreme exponents.
    pub fn from_f64(x: f64) -> Option<Dyadic> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::ZERO);
        }
        let bits = x.to_bits();
        let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1i128 << 52), biased - 1075) };
        let d = Dyadic::new(sign * m, -e);
        if d.exp.abs() > 4 * MAX_SHIFT {
            return None;
        }
        Some(d)
    }

    pub fn from_scalar<S: Scalar>(x: S) -> Option<Dyadic> {
        Dyadic::from_f64(x.as_f64())
    }

    pub fn to_f64(self) -> f64 {
        // Split the mantissa to keep the conversion correctly scaled even for
        // wide mantissas.
        (self.mant as f64) * 2f64.powi(-self.exp)
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        S::lit(self.to_f64())
    }

    fn aligned(self, other: Dyadic) -> Option<(i128, i128, i32)> {
        let exp = self.exp.max(other.exp);
        let a = shift_left(self.mant, exp - self.exp)?;
        let b = shift_left(other.mant, exp - other.exp)?;
        Some((a, b, exp))
    }

    pub fn checked_add(self, other: Dyadic) -> Option<Dyadic> {
        let (a, b, e) = self.aligned(other)?;
        Some(Dyadic::new(a.checked_add(b)?, e))
    }

    pub fn checked_sub(self, other: Dyadic) -> Option<Dyadic> {
        self.checked_add(-other)
    }

    /// Multiplication by `2^{-k}`.
    pub fn scale_pow2(self, k: i32) -> Dyadic {
        if self.mant == 0 {
            self
        } else {
            Dyadic { mant: self.mant, exp: self.exp + k }
        }
    }
}

fn shift_left(m: i128, by: i32) -> Option<i128> {
    if by == 0 || m == 0 {
        return Some(m);
    }
    if !(0..=MAX_SHIFT).contains(&by) {
        return None;
    }
    let headroom = if m >= 0 { m.leading_zeros() } else { (!m).leading_zeros() } as i32;
    if by >= headroom - 1 {
        return None;
    }
    Some(m << by)
}

impl std::ops::Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match self.aligned(*other) {
            Some((a, b, _)) => a.cmp(&b),
            None => self.to_f64().total_cmp(&other.to_f64()).then(self.exp.cmp(&other.exp)),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}/2^{}", self.mant, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once("/2^") {
            Some((m, e)) => {
                let m: i128 = m.trim().parse().map_err(|_| format!("bad dyadic mantissa in `{s}`"))?;
                let e: i32 = e.trim().parse().map_err(|_| format!("bad dyadic exponent in `{s}`"))?;
                Ok(Dyadic::new(m, e))
            }
            None => s.parse::<i128>().map(|m| Dyadic::new(m, 0)).map_err(|_| format!("bad dyadic `{s}`")),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact description of an axis-aligned cube with dyadic center and edge
/// `2^{-level}`. Orientation is positive along the increasing axes; the sign
/// lives with the owning cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub axes: Vec<usize>,
    pub level: i32,
    pub center: Vec<Dyadic>,
}

impl DyadicCube {
    pub fn edge(&self) -> Dyadic {
        Dyadic::pow2_neg(self.level)
    }

    pub fn half_edge(&self) -> Dyadic {
        Dyadic::pow2_neg(self.level + 1)
    }

    pub fn translate(&self, v: &[Dyadic]) -> Option<DyadicCube> {
        let center = self.center.iter().zip(v).map(|(a, b)| a.checked_add(*b)).collect::<Option<Vec<_>>>()?;
        Some(DyadicCube { axes: self.axes.clone(), level: self.level, center })
    }

    /// The two faces orthogonal to `axes[i]`: `(+face, −face)`.
    pub fn faces(&self, i: usize) -> Option<(DyadicCube, DyadicCube)> {
        let axis = self.axes[i];
        let h = self.half_edge();
        let mut axes = self.axes.clone();
        axes.remove(i);
        let mut plus = self.center.clone();
        let mut minus = self.center.clone();
        plus[axis] = plus[axis].checked_add(h)?;
        minus[axis] = minus[axis].checked_sub(h)?;
        Some((
            DyadicCube { axes: axes.clone(), level: self.level, center: plus },
            DyadicCube { axes, level: self.level, center: minus },
        ))
    }

    /// Subcubes at `level` (which must not be coarser), in lexicographic order.
    pub fn subdivide(&self, level: i32) -> Option<Vec<DyadicCube>> {
        if level <= self.level {
            return Some(vec![self.clone()]);
        }
        let depth = level - self.level;
        if depth > 24 || depth as usize * self.axes.len() > 26 {
            return None;
        }
        let per_axis = 1i128 << depth;
        // Offsets (2j + 1 − 2^depth) · 2^{-(level+1)} for j in 0..2^depth.
        let offsets: Vec<Dyadic> = (0..per_axis).map(|j| Dyadic::new(2 * j + 1 - per_axis, level + 1)).collect();
        let mut out = vec![self.center.clone()];
        for &axis in &self.axes {
            let mut next = Vec::with_capacity(out.len() * offsets.len());
            for c in &out {
                for off in &offsets {
                    let mut cc = c.clone();
                    cc[axis] = cc[axis].checked_add(*off)?;
                    next.push(cc);
                }
            }
            out = next;
        }
        Some(out.into_iter().map(|center| DyadicCube { axes: self.axes.clone(), level, center }).collect())
    }
}
