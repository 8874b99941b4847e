#![allow(dead_code)]

use chainlet::chains::{Cube, Simplex};
use chainlet::PolyChain;
use chainlet::{FormField, Poly};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A few axis-aligned dyadic cubes of levels 0..=3 centred on their grids
/// in `[−1, 1]^n`, with small integer or half-integer weights.
pub fn random_dyadic(rng: &mut ChaCha8Rng, n: usize, k: usize) -> PolyChain {
    let mut p = PolyChain::zero(n, k).unwrap();
    for _ in 0..rng.gen_range(1..=4) {
        let level = rng.gen_range(0..=3);
        let h = 2f64.powi(-level);
        let mut axes: Vec<usize> = (0..n).collect();
        axes.shuffle(rng);
        axes.truncate(k);
        let cells = 1i64 << level;
        let center = (0..n)
            .map(|i| {
                let j = rng.gen_range(-cells..cells) as f64;
                if axes.contains(&i) {
                    (j + 0.5) * h
                } else {
                    j * h
                }
            })
            .collect();
        let coeff = rng.gen_range(-4..=4) as f64 / 2.0;
        if coeff == 0.0 {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        p.push(coeff, Cube::axis(center, &axes, h, sign).unwrap()).unwrap();
    }
    p
}

/// A few random simplices with vertices in `[−1, 1]^n`.
pub fn random_simplicial(rng: &mut ChaCha8Rng, n: usize, k: usize) -> PolyChain {
    let mut p = PolyChain::zero(n, k).unwrap();
    while p.len() < rng.gen_range(1..=3) {
        let verts: Vec<Vec<f64>> = (0..=k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let Ok(s) = Simplex::new(verts) else { continue };
        if s.mass() < 1e-3 && k > 0 {
            continue;
        }
        p.push(rng.gen_range(-2.0..2.0), s).unwrap();
    }
    p
}

/// `count` chains alternating dyadic cubical and simplicial, over all
/// `1 ≤ n ≤ 3`, `0 ≤ k ≤ n`.
pub fn corpus(seed: u64, count: usize) -> Vec<PolyChain> {
    let shapes: Vec<(usize, usize)> = (1..=3).flat_map(|n| (0..=n).map(move |k| (n, k))).collect();
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let (n, k) = shapes[(i / 2) % shapes.len()];
            if i % 2 == 0 {
                random_dyadic(&mut r, n, k)
            } else {
                random_simplicial(&mut r, n, k)
            }
        })
        .collect()
}

/// Random polynomial `k`-form in `R^n` of total degree ≤ 3.
pub fn random_poly_form(rng: &mut ChaCha8Rng, n: usize, k: usize) -> FormField {
    let mut f = FormField::zero(n, k).unwrap();
    for b in chainlet::blades(n, k) {
        let mut p = Poly::zero(n);
        for _ in 0..3 {
            let mut e = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=3) {
                e[rng.gen_range(0..n)] += 1;
            }
            p = p.add(&Poly::monomial(n, e, rng.gen_range(-1.0..1.0)));
        }
        f = f.with_poly(&b.indices(), p).unwrap();
    }
    f.with_name("random")
}

/// `Q_ℓ(0, e_I)` in `R^n` minus the same at `ℓ + j`.
pub fn q_difference(n: usize, k: usize, l: i32, j: i32) -> PolyChain {
    let dir = chainlet::KDirection::axis(n, &(0..k).collect::<Vec<_>>()).unwrap();
    let o = vec![0.0; n];
    let a = chainlet::elements::qcube(&o, &dir, l).unwrap();
    let b = chainlet::elements::qcube(&o, &dir, l + j).unwrap();
    a.sub(&b).unwrap()
}

/// Composite 8-point Gauss–Legendre on `[a, b]` with `m` panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let h = (b - a) / m as f64;
    let mut s = 0.0;
    for i in 0..m {
        let c = a + (i as f64 + 0.5) * h;
        for q in 0..4 {
            s += W[q] * (f(c - X[q] * h / 2.0) + f(c + X[q] * h / 2.0));
        }
    }
    s * h / 2.0
}
