mod common;

use common::{random_dyadic, random_simplicial, rng};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn boundary_of_boundary_vanishes((n, k) in shape(), seed in any::<u64>(), dyadic in any::<bool>()) {
        let mut r = rng(seed);
        let p = if dyadic { random_dyadic(&mut r, n, k) } else { random_simplicial(&mut r, n, k) };
        prop_assert!(p.boundary().boundary().canonicalize().is_zero());
    }

    #[test]
    fn vec_laws((n, k) in shape(), seed in any::<u64>(), dyadic in any::<bool>()) {
        let mut r = rng(seed);
        let p = if dyadic { random_dyadic(&mut r, n, k) } else { random_simplicial(&mut r, n, k) };
        prop_assert!(p.vec().mass() <= p.mass() + 1e-12);
        if k > 0 {
            prop_assert!(p.boundary().vec().mass() <= 1e-10);
        }
    }

    #[test]
    fn refinement_keeps_mass_and_vec((n, k) in shape(), seed in any::<u64>(), extra in 0i32..3) {
        let p = random_dyadic(&mut rng(seed), n, k);
        let level = p.max_level().unwrap_or(0) + extra;
        let q = p.refine_to_level(level).unwrap();
        // Refinement is exact cell by cell; cancellation between
        // overlapping cells can only lower the canonical mass.
        prop_assert_eq!(q.formal_mass(), p.formal_mass());
        prop_assert!(q.mass() <= p.mass());
        prop_assert_eq!(q.refine_to_level(level + 1).unwrap().mass(), q.mass());
        prop_assert!(q.vec().max_abs_diff(&p.vec()).unwrap() <= 1e-12);
    }

    #[test]
    fn boundary_commutes_with_refinement((n, k) in (1usize..=3).prop_flat_map(|n| (Just(n), 1..=n)), seed in any::<u64>(), extra in 0i32..2) {
        let p = random_dyadic(&mut rng(seed), n, k);
        let level = p.max_level().unwrap_or(0) + extra;
        let a = p.refine_to_level(level).unwrap().boundary();
        let b = p.boundary().refine_to_level(level).unwrap();
        prop_assert!(a.sub(&b).unwrap().canonicalize().is_zero());
    }
}
