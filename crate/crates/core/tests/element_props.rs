mod common;

use chainlet::elements::{cubeize, elementize, integrate_elementary, qcube, star_elementary};
use chainlet::forms::{exact_dictionary, oracle_dictionary};
use chainlet::norms::natural_upper;
use chainlet::{ElementaryChain, KDirection};
use common::{random_dyadic, rng};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_elementary(r: &mut ChaCha8Rng, n: usize, k: usize, len: usize) -> ElementaryChain {
    let mut ec = ElementaryChain::zero(n, k).unwrap();
    while ec.len() < len {
        let p: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let frame: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let Ok(dir) = KDirection::from_frame(n, &frame) else { continue };
        ec.push(r.gen_range(-2.0..2.0), p, dir, r.gen_range(0.5..2.0)).unwrap();
    }
    ec
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn element_star_theorem_is_exact((n, k) in shape(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_elementary(&mut r, n, k, 3);
        let s = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
        let star = star_elementary(&e);
        for w in oracle_dictionary::<f64>(n, n - k).unwrap().iter().take(4) {
            let lhs = integrate_elementary(w, &star).unwrap();
            let rhs = s * integrate_elementary(&w.star(), &e).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn cubeize_keeps_vec((n, k) in shape(), seed in any::<u64>(), level in 0i32..6) {
        let e = random_elementary(&mut rng(seed), n, k, 4);
        let c = cubeize(&e, level).unwrap();
        prop_assert!(c.vec().max_abs_diff(&e.vec()).unwrap() <= 1e-14);
    }

    /// Two shifted stacks of cubes shrinking to the same element give
    /// integrals within `O(2^{-ℓ})` of `ω(p; α)`, with the Lipschitz
    /// constant of `x_i dx^I` equal to one.
    #[test]
    fn elements_do_not_depend_on_the_stack((n, k) in (2usize..=3).prop_flat_map(|n| (Just(n), 1..=n)), seed in any::<u64>(), level in 1i32..7) {
        let mut r = rng(seed);
        let p: Vec<f64> = (0..n).map(|_| r.gen_range(-0.5..0.5)).collect();
        let axes: Vec<usize> = (0..k).collect();
        let dir = KDirection::axis(n, &axes).unwrap();
        let h = 2f64.powi(-level);
        let shifted: Vec<f64> = p.iter().map(|x| x + h / 4.0).collect();
        let a = qcube(&p, &dir, level).unwrap();
        let b = qcube(&shifted, &dir, level).unwrap();
        let alpha = dir.kvector();
        for w in exact_dictionary::<f64>(n, k, 2.0).unwrap() {
            let exact = w.eval(&p, &alpha);
            let ia = w.integrate_chain(&a, 1e-13).unwrap();
            let ib = w.integrate_chain(&b, 1e-13).unwrap();
            let reach = (k as f64).sqrt() * h / 2.0;
            prop_assert!((ia - exact).abs() <= reach + 1e-12);
            prop_assert!((ib - exact).abs() <= reach + (n as f64).sqrt() * h / 4.0 + 1e-12);
        }
    }

    #[test]
    fn elementary_density((n, k) in (1usize..=3).prop_flat_map(|n| (Just(n), 1..=n)), seed in any::<u64>(), level in 0i32..4) {
        let p = random_dyadic(&mut rng(seed), n, k);
        let q = cubeize(&elementize(&p, level).unwrap(), level).unwrap();
        let d = natural_upper(&p.sub(&q).unwrap(), 1, None).unwrap().value;
        // Overlapping cells only cancel once refined to a common level.
        let m = p.refine_to_level(p.max_level().unwrap_or(0)).unwrap().mass();
        prop_assert!(d <= 2f64.powi(1 - level) * m + 1e-12, "{} > {}", d, 2f64.powi(1 - level) * m);
    }
}
