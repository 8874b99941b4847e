use chainlet::{blades, frame_to_kvector, KVector};
use proptest::prelude::*;

fn kvector(n: usize, k: usize, coeffs: &[f64]) -> KVector {
    blades(n, k)
        .into_iter()
        .zip(coeffs.iter().cycle())
        .fold(KVector::zero(n, k).unwrap(), |acc, (b, &c)| &acc + &KVector::from_blade(n, b, c).unwrap())
}

/// Determinant by partial-pivot elimination.
fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let m = a.len();
    let mut d = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in c + 1..m {
            let f = a[i][c] / a[c][c];
            for j in c..m {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    d
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=5).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #[test]
    fn star_star_is_signed_identity((n, k) in shape(), coeffs in prop::collection::vec(-3.0f64..3.0, 1..12)) {
        let u = kvector(n, k, &coeffs);
        let s = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
        let back = u.star().star();
        prop_assert!(back.max_abs_diff(&u.scale(s)).unwrap() <= 1e-14);
    }

    #[test]
    fn star_is_an_isometry((n, k) in shape(), coeffs in prop::collection::vec(-3.0f64..3.0, 1..12)) {
        let u = kvector(n, k, &coeffs);
        prop_assert!((u.star().mass() - u.mass()).abs() <= 1e-12 * u.mass().max(1.0));
    }

    #[test]
    fn frame_mass_is_gram_volume(
        (n, k) in (1usize..=5).prop_flat_map(|n| (Just(n), 1..=n)),
        entries in prop::collection::vec(-2.0f64..2.0, 25),
    ) {
        let frame: Vec<Vec<f64>> = (0..k).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        let gram: Vec<Vec<f64>> = frame.iter().map(|a| frame.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect();
        let vol = det(gram).max(0.0).sqrt();
        let v = frame_to_kvector(n, &frame).unwrap();
        prop_assert!((v.mass() - vol).abs() <= 1e-10, "{} vs {}", v.mass(), vol);
    }
}
