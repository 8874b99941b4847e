mod common;

use chainlet::forms::builtin_form;
use chainlet::harness::*;
use chainlet::norms::natural_upper;
use chainlet::{ChainletSeq, FormField, Poly, PolyChain};
use common::gauss_legendre;
use proptest::prelude::*;

fn unit_square(n: usize) -> PolyChain {
    PolyChain::unit_cube(n, &[0, 1]).unwrap()
}

#[test]
fn stokes_on_a_closed_chain() {
    let tri = PolyChain::simplex(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.2, 0.0], vec![0.3, 1.0, 0.5]]).unwrap();
    let closed = tri.boundary();
    let f = FormField::zero(3, 0).unwrap().with_poly(&[], Poly::monomial(3, vec![1, 1, 1], 1.0)).unwrap();
    let rep = verify_stokes(&closed, &f, 1e-10).unwrap();
    assert!(rep.pass);
    assert!(rep.rows[0].lhs.abs() < 1e-15 && rep.rows[0].rhs.abs() < 1e-12);
}

#[test]
fn star_of_a_constant_form_is_exact_at_every_level() {
    let a = ChainletSeq::constant(0, &unit_square(3), 1..=4).unwrap();
    let rep = verify_star(&a, &builtin_form("dz", 3).unwrap(), 1e-12).unwrap();
    for r in &rep.rows {
        assert!(r.abs_err < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
    }
    assert_eq!(rep.rate.unwrap().verdict, Verdict::Exact);
}

#[test]
fn gauss_on_the_unit_square() {
    let a = ChainletSeq::constant(0, &unit_square(2), 2..=6).unwrap();
    let rep = verify_gauss(&a, &builtin_form("radial1", 2).unwrap(), 1e-9).unwrap();
    for r in &rep.rows {
        assert!((r.rhs + 2.0).abs() < 1e-12, "σ·RHS = {}", r.rhs);
        assert!((r.lhs + 2.0).abs() < 1e-9, "LHS = {}", r.lhs);
    }
    assert!(rep.pass);
}

#[test]
fn gauss_with_a_constant_form_vanishes() {
    let a = ChainletSeq::constant(0, &unit_square(2), 2..=4).unwrap();
    let rep = verify_gauss(&a, &builtin_form("dx", 2).unwrap(), 1e-12).unwrap();
    assert!(rep.rows.iter().all(|r| r.lhs.abs() < 1e-14 && r.rhs.abs() < 1e-14));
}

#[test]
fn green_with_an_exact_form_vanishes() {
    let a = ChainletSeq::constant(0, &unit_square(2), 2..=4).unwrap();
    let f = FormField::zero(2, 0).unwrap().with_poly(&[], Poly::monomial(2, vec![2, 1], 1.0)).unwrap();
    let rep = verify_green(&a, &f.d().unwrap(), 1e-12).unwrap();
    assert!(rep.pass);
    assert!(rep.rows.iter().all(|r| r.lhs.abs() < 1e-14 && r.rhs.abs() < 1e-14));
}

#[test]
fn laplace_report_is_linear_in_the_chain() {
    let seg = PolyChain::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let a = ChainletSeq::constant(0, &seg, 3..=5).unwrap();
    let w = builtin_form("x2_dx", 2).unwrap();
    let one = verify_laplace(&a, &w, 0.05).unwrap();
    let two = verify_laplace(&a.scale(2.0), &w, 0.05).unwrap();
    for (x, y) in one.rows.iter().zip(&two.rows) {
        assert!((2.0 * x.lhs - y.lhs).abs() < 1e-12 && (2.0 * x.rhs - y.rhs).abs() < 1e-12);
    }
}

#[test]
fn distribution_examples() {
    let a = ChainletSeq::constant(0, &PolyChain::simplex(vec![vec![0.0], vec![1.0]]).unwrap(), 1..=3).unwrap();
    let one = verify_distribution(&a, &builtin_form("one", 1).unwrap(), 1e-12).unwrap();
    assert!(one.rows.iter().all(|r| r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15));
    let sq = verify_distribution(&a, &builtin_form("x2", 1).unwrap(), 1e-12).unwrap();
    assert!(sq.rows.iter().all(|r| (r.lhs - 1.0).abs() < 1e-14));
}

#[test]
fn koch_levels_are_closed_and_grow_by_four_thirds() {
    for l in 0..=6 {
        let k = gen_koch::<f64>(l, 1.0).unwrap();
        assert!(k.polygon.boundary().canonicalize().is_zero(), "level {l}");
        assert!((k.polygon.mass() - 3.0 * (4.0f64 / 3.0).powi(l as i32)).abs() < 1e-11);
    }
}

#[test]
fn koch_regions_have_area_shrinking_by_four_ninths() {
    // Bump triangles have side s/3^{i+1}; there are 3·4^i of them.
    for i in 0..5 {
        let k = gen_koch::<f64>(i, 1.0).unwrap();
        let side = 3f64.powi(-(i as i32 + 1));
        let expected = 3.0 * 4f64.powi(i as i32) * 3f64.sqrt() / 4.0 * side * side;
        assert!((k.region.mass() - expected).abs() < 1e-13);
    }
    assert!(gen_koch::<f64>(11, 1.0).is_err());
}

#[test]
fn weierstrass_mass_matches_quadrature() {
    for level in [6, 8] {
        let w = gen_weierstrass_subgraph::<f64>(0.6, 2.5, 4, level).unwrap();
        let exact = gauss_legendre(|x| w.height(x), 0.0, 1.0, 4096);
        let err = (w.chain.mass() - exact).abs();
        let step = 2f64.powi(-(level as i32));
        // Midpoint columns: |error| ≤ (h²/24)·∫|f''|; f'' ≤ Σ a^m (b^m π)².
        let curv: f64 = (0..=4).map(|m| 0.6f64.powi(m) * (2.5f64.powi(m) * std::f64::consts::PI).powi(2)).sum();
        assert!(err <= step * step / 24.0 * curv, "level {level}: {err}");
    }
    assert!(gen_weierstrass_subgraph::<f64>(0.5, 1.5, 3, 4).is_err());
}

#[test]
fn cube_sequence_certificate_is_first_order() {
    for k in 1..=4 {
        let d = gen_cube_sequence::<f64>(k).unwrap().sub(&gen_cube_sequence(k + 1).unwrap()).unwrap();
        let up = natural_upper(&d, 1, None).unwrap();
        assert!(up.value <= 2f64.powi(-k));
        let cert = &up.certificate;
        assert!(cert.d[0].is_empty() && cert.c.is_none(), "{cert:?}");
        for t in cert.d[1].terms() {
            let v = &t.cell.vectors()[0];
            assert!(v.iter().map(|x| x * x).sum::<f64>().sqrt() <= 2f64.powi(-k));
        }
    }
}

#[test]
fn disk_rhs_converges_to_two_pi() {
    let a = ChainletSeq::from_fn(0, 2..=6, |l| gen_disk::<f64>(l as u32)).unwrap();
    let rep = verify_gauss(&a, &builtin_form("radial1", 2).unwrap(), 1e-9).unwrap();
    let errs: Vec<(i32, f64)> = rep.rows.iter().map(|r| (r.level, (r.rhs.abs() - 2.0 * std::f64::consts::PI).abs())).collect();
    let rate = convergence_rate(&errs).unwrap();
    assert!((rate.slope - 2.0).abs() < 0.05, "{rate:?}");
}

#[test]
fn report_serializations() {
    let a = ChainletSeq::constant(0, &unit_square(3), 1..=3).unwrap();
    let rep = verify_star(&a, &builtin_form("x2_dz", 3).unwrap(), 0.1).unwrap();
    let back: ExperimentReport = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
    assert_eq!(rep.to_csv().lines().count(), 4);
}

proptest! {
    #[test]
    fn rate_recovers_geometric_decay(rho in 0.3f64..4.0, c in 0.01f64..100.0) {
        let v: Vec<(i32, f64)> = (2..8).map(|l| (l, c * 2f64.powf(-rho * l as f64))).collect();
        let r = convergence_rate(&v).unwrap();
        prop_assert!((r.slope - rho).abs() < 1e-9);
        prop_assert!(r.at_least(rho - 1e-6));
    }
}
