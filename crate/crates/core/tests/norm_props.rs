mod common;

use chainlet::forms::exact_dictionary;
use chainlet::norms::{natural_bracket, natural_upper, Decomposition};
use chainlet::PolyChain;
use common::{random_dyadic, random_simplicial, rng};
use proptest::prelude::*;

fn chain(n: usize, k: usize, seed: u64, dyadic: bool) -> PolyChain {
    let mut r = rng(seed);
    if dyadic {
        random_dyadic(&mut r, n, k)
    } else {
        random_simplicial(&mut r, n, k)
    }
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lower_never_exceeds_upper((n, k) in shape(), seed in any::<u64>(), dyadic in any::<bool>(), r in 0usize..=2) {
        let p = chain(n, k, seed, dyadic);
        let dict = exact_dictionary(n, k, 2.0).unwrap();
        let b = natural_bracket(&p, r, &dict).unwrap();
        prop_assert!(b.lower <= b.upper, "{} > {}", b.lower, b.upper);
    }

    #[test]
    fn uppers_decrease_in_r((n, k) in shape(), seed in any::<u64>(), dyadic in any::<bool>(), r in 0usize..=2) {
        let p = chain(n, k, seed, dyadic);
        let a = natural_upper(&p, r, None).unwrap().value;
        let b = natural_upper(&p, r + 1, None).unwrap().value;
        prop_assert!(b <= a, "r = {}: {} then {}", r, a, b);
    }

    #[test]
    fn derived_boundary_certificate((n, k) in (1usize..=3).prop_flat_map(|n| (Just(n), 1..=n)), seed in any::<u64>(), dyadic in any::<bool>(), r in 1usize..=3) {
        let p = chain(n, k, seed, dyadic);
        let up = natural_upper(&p, r - 1, None).unwrap();
        let hint = Decomposition::boundary_of(&p, up.certificate.clone()).unwrap();
        let ub = natural_upper(&p.boundary(), r, Some(&hint)).unwrap();
        prop_assert!(ub.value <= up.value);
    }

    #[test]
    fn fundamental_inequality((n, k) in shape(), seed in any::<u64>(), dyadic in any::<bool>(), r in 0usize..=2) {
        let p = chain(n, k, seed, dyadic);
        let up = natural_upper(&p, r, None).unwrap().value;
        for w in exact_dictionary(n, k, 2.0).unwrap() {
            let v = w.integrate_chain(&p, 1e-13).unwrap().abs();
            prop_assert!(v <= up * w.exact_norm(r).unwrap() + 1e-12 * up.max(1.0), "{}: {} > {}", w.name(), v, up);
        }
    }

    #[test]
    fn certificates_recompose((n, k) in shape(), seed in any::<u64>(), r in 0usize..=2) {
        let p = chain(n, k, seed, true);
        let up = natural_upper(&p, r, None).unwrap();
        let back = up.certificate.recompose().unwrap();
        prop_assert!(chainlet::norms::oracle_discrepancy(&p, &back).unwrap() <= chainlet::norms::ORACLE_TOL);
        prop_assert!((up.certificate.value() - up.value).abs() <= 1e-12 * up.value.max(1.0));
    }
}
