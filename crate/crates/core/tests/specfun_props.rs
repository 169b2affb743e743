mod common;

use common::{recurrence_residual, wronskian_residual, wronskian_residual_scaled};
use helmcloak::specfun::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn off_cut() -> impl Strategy<Value = C64> {
    (0.1f64..30.0, -3.1f64..3.1).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wronskian_holds_near_real_axis(r in 0.1f64..30.0, t in -3.1f64..3.1, n in 0usize..=30) {
        let z = C64::from_polar(r, t);
        prop_assume!(z.im.abs() <= 8.0);
        let res = wronskian_residual(n, z);
        prop_assert!(res <= 1e-10, "n={} z={} residual {:e}", n, z, res);
    }

    #[test]
    fn wronskian_holds_to_product_scale(z in off_cut(), n in 0usize..=30) {
        let res = wronskian_residual_scaled(n, z);
        prop_assert!(res <= 1e-13, "n={} z={} residual {:e}", n, z, res);
    }

    #[test]
    fn recurrences_hold(z in off_cut(), n in 1usize..=30) {
        let j = bessel_j_range(31, z).unwrap();
        let h = hankel1_range(31, z).unwrap();
        prop_assert!(recurrence_residual(&j, n, z) <= 1e-10);
        prop_assert!(recurrence_residual(&h, n, z) <= 1e-10);
    }

    #[test]
    fn negative_order_reflection(z in off_cut(), n in 0i32..=30) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(bessel_j(-n, z).unwrap(), bessel_j(n, z).unwrap() * sign);
        prop_assert_eq!(hankel1(-n, z).unwrap(), hankel1(n, z).unwrap() * sign);
    }

    #[test]
    fn conjugate_symmetry_of_j(z in off_cut(), n in 0i32..=30) {
        let a = bessel_j(n, z.conj()).unwrap();
        let b = bessel_j(n, z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * (1.0 + b.norm()));
    }

    #[test]
    fn table_matches_direct(k_re in 0.1f64..12.0, k_im in 0.0f64..6.0, r in 0.05f64..4.0) {
        let k = C64::new(k_re, k_im);
        let table = HankelTable::new(k, 0.01, 5.0).unwrap();
        let (a0, a1) = table.h01(r).unwrap();
        let (b0, b1) = hankel1_01(k * r).unwrap();
        prop_assert!((a0 - b0).norm() <= 1e-11 * b0.norm());
        prop_assert!((a1 - b1).norm() <= 1e-11 * b1.norm());
    }
}

#[test]
fn cut_is_rejected() {
    for z in [C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(-30.0, 0.0)] {
        assert!(hankel1(0, z).is_err());
    }
    assert!(hankel1(0, C64::new(-1.0, 1e-300)).is_ok());
}

#[test]
fn lemma_rejects_sets_touching_the_cut() {
    let k1 = CompactSet::Disk { radius: 1.0 };
    let k2 = CompactSet::AnnularSector { r_min: 1.0, r_max: 2.0, max_arg: std::f64::consts::PI };
    assert!(verify_lemma_bounds(2, k1, k2, 8, 8).is_err());
}
