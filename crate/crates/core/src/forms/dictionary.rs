//! Named forms: the CLI dictionary, forms with exact norms, and the random
//! polynomial dictionary used to compare chains by integration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FormField, Poly};
use crate::error::Result;
use crate::exterior::{blades, Blade};
use crate::scalar::Scalar;

pub const ORACLE_SEED: u64 = 0x00c4_a1e7;

const NAMES: &[&str] = &[
    "dx", "dy", "dz", "x_dy", "x_dz", "x2_dz", "neg_y_dx", "area2", "vol3", "radial1", "x2_dx", "harmonic1", "one", "x2",
];

pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

fn var<S: Scalar>(n: usize, i: usize) -> Poly<S> {
    Poly::var(n, i)
}

/// A form from the built-in dictionary in ambient dimension `n`. `None` for
/// unknown names or names that need more coordinates than `n`.
pub fn builtin_form<S: Scalar>(name: &str, n: usize) -> Option<FormField<S>> {
    let need = |m: usize| if n >= m { Some(()) } else { None };
    let f = match name {
        "dx" => FormField::basis(n, &[0]).ok()?,
        "dy" => FormField::basis(n, &[need(2).map(|_| 1)?]).ok()?,
        "dz" => FormField::basis(n, &[need(3).map(|_| 2)?]).ok()?,
        "x_dy" => {
            need(2)?;
            FormField::zero(n, 1).ok()?.with_poly(&[1], var(n, 0)).ok()?
        }
        "x_dz" => {
            need(3)?;
            FormField::zero(n, 1).ok()?.with_poly(&[2], var(n, 0)).ok()?
        }
        "x2_dz" => {
            need(3)?;
            FormField::zero(n, 1).ok()?.with_poly(&[2], var(n, 0).mul(&var(n, 0))).ok()?
        }
        "neg_y_dx" => {
            need(2)?;
            FormField::zero(n, 1).ok()?.with_poly(&[0], var(n, 1).scale(-S::one())).ok()?
        }
        "area2" => {
            need(2)?;
            FormField::basis(n, &[0, 1]).ok()?
        }
        "vol3" => {
            need(3)?;
            FormField::basis(n, &[0, 1, 2]).ok()?
        }
        "radial1" => {
            let mut f = FormField::zero(n, 1).ok()?;
            for i in 0..n {
                f = f.with_poly(&[i], var(n, i)).ok()?;
            }
            f
        }
        "x2_dx" => FormField::zero(n, 1).ok()?.with_poly(&[0], var(n, 0).mul(&var(n, 0))).ok()?,
        "harmonic1" => {
            need(2)?;
            let x = var::<S>(n, 0);
            let y = var::<S>(n, 1);
            FormField::zero(n, 1)
                .ok()?
                .with_poly(&[0], x.mul(&x).add(&y.mul(&y).scale(-S::one())))
                .ok()?
                .with_poly(&[1], x.mul(&y))
                .ok()?
        }
        "one" => FormField::zero(n, 0).ok()?.with_poly(&[], Poly::constant(n, S::one())).ok()?,
        "x2" => FormField::zero(n, 0).ok()?.with_poly(&[], var(n, 0).mul(&var(n, 0))).ok()?,
        _ => return None,
    };
    Some(f.with_name(name))
}

fn blade_name(b: Blade) -> String {
    if b.grade() == 0 {
        return "1".into();
    }
    b.indices().iter().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("∧")
}

/// Forms with exact `|ω|_r` on the box `[−R, R]^n`: the constant basis
/// forms `dx^I` (`|·|_r = 1`) and `x_i dx^I` (`|·|_0 = R`,
/// `|·|_r = max(R, 1)` for `r ≥ 1`).
pub fn exact_dictionary<S: Scalar>(n: usize, k: usize, radius: S) -> Result<Vec<FormField<S>>> {
    let mut out = Vec::new();
    for b in blades(n, k) {
        out.push(
            FormField::zero(n, k)?
                .with_component(b, super::Component::Poly(Poly::constant(n, S::one())))?
                .with_name(blade_name(b))
                .with_exact_norms(vec![S::one()])?,
        );
    }
    for b in blades(n, k) {
        for i in 0..n {
            out.push(
                FormField::zero(n, k)?
                    .with_component(b, super::Component::Poly(var(n, i)))?
                    .with_name(format!("x{}·{}", i + 1, blade_name(b)))
                    .with_support_region(vec![-radius; n], vec![radius; n])
                    .with_exact_norms(vec![radius, radius.max(S::one())])?,
            );
        }
    }
    Ok(out)
}

/// Twelve random polynomial k-forms of degree at most 3, fixed by
/// [`ORACLE_SEED`].
pub fn oracle_dictionary<S: Scalar>(n: usize, k: usize) -> Result<Vec<FormField<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED ^ ((n as u64) << 8) ^ k as u64);
    let mut out = Vec::with_capacity(12);
    for idx in 0..12 {
        let mut f = FormField::zero(n, k)?;
        for b in blades(n, k) {
            let mut p = Poly::zero(n);
            for _ in 0..4 {
                let mut e = vec![0u32; n];
                let deg = rng.gen_range(0..=3u32);
                for _ in 0..deg {
                    e[rng.gen_range(0..n)] += 1;
                }
                p = p.add(&Poly::monomial(n, e, S::lit(rng.gen_range(-1.0..1.0))));
            }
            f = f.with_component(b, super::Component::Poly(p))?;
        }
        out.push(f.with_name(format!("oracle{idx}")));
    }
    Ok(out)
}
