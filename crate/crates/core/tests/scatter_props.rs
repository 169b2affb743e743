use helmcloak::graf::green;
use helmcloak::scatter::*;
use helmcloak::{dist, Point, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

const LOG_KERNEL_EXP_COS: f64 = -8.057_116_715_874_369;

fn solve(obst: &ObstacleDiscretization, k: C64, trace: impl Fn(Point) -> C64) -> DensitySolution {
    let u: Vec<C64> = obst.q.iter().map(|&y| trace(y)).collect();
    solve_density(obst, &u, k, choose_eta(k)).unwrap()
}

fn u_s(x: Point, obst: &ObstacleDiscretization, d: &DensitySolution) -> C64 {
    scattered_field(x, obst, d).unwrap().value
}

#[test]
fn corrected_trapezoid_on_log_kernels() {
    let ln4s = |x: f64| (4.0 * (x / 2.0).sin().powi(2)).ln();
    let mut errs = Vec::new();
    for n in [64, 128, 256, 512] {
        let t = |j: usize| 2.0 * PI * j as f64 / n as f64;
        let f0: Vec<f64> = (0..n).map(|j| ln4s(t(j))).collect();
        let f1: Vec<f64> = (0..n).map(|j| ln4s(t(j)) * t(j).cos().exp()).collect();
        assert!(kapur_rokhlin_periodic(&f0, 0).abs() <= 1e-8);
        errs.push((kapur_rokhlin_periodic(&f1, 0) - LOG_KERNEL_EXP_COS).abs());
    }
    assert!(errs[1] <= errs[0] / 64.0, "{errs:?}");
    assert!(errs[2] <= 1e-8 && errs[3] <= 1e-8, "{errs:?}");
}

#[test]
fn manufactured_exterior_solution() {
    // u = G(. - z) with z inside the kite is the scattered field of -u
    let z = [4.85, 5.1];
    for k in [C64::new(10.0, 0.0), C64::new(3.0, 1.0), C64::new(0.0, 2.0)] {
        let mut errs = Vec::new();
        for n in [256, 512] {
            let obst = kite_obstacle([5.0, 5.0], 0.5, n).unwrap();
            assert!(obst.contains(z));
            let d = solve(&obst, k, |y| -green(y, z, k).unwrap());
            let mut worst: f64 = 0.0;
            for x in [[8.0, 5.5], [3.0, 2.0], [5.5, 9.0]] {
                let want = green(x, z, k).unwrap();
                worst = worst.max((u_s(x, &obst, &d) - want).norm() / want.norm());
            }
            errs.push(worst);
        }
        assert!(errs[1] <= 1e-5 && errs[1] <= errs[0] / 16.0, "k={k}: {errs:?}");
    }
}

#[test]
fn reciprocity_at_k10() {
    let obst = kite_obstacle([5.0, 5.0], 0.5, 256).unwrap();
    let k = C64::new(10.0, 0.0);
    let (p1, p2) = ([8.0, 5.0], [5.0, 8.5]);
    let d1 = solve(&obst, k, |y| green(y, p1, k).unwrap());
    let d2 = solve(&obst, k, |y| green(y, p2, k).unwrap());
    let a = u_s(p2, &obst, &d1);
    let b = u_s(p1, &obst, &d2);
    assert!((a - b).norm() <= 0.01 * a.norm(), "{a} vs {b}");
}

#[test]
fn boundary_limit_approached_linearly() {
    // u_i + u_s vanishes on the boundary, so it shrinks like the distance
    let obst = kite_obstacle([5.0, 5.0], 0.5, 1024).unwrap();
    let k = C64::new(10.0, 0.0);
    let src = [8.0, 5.0];
    let d = solve(&obst, k, |y| green(y, src, k).unwrap());
    for i in (0..1024).step_by(128) {
        let (q, nu) = (obst.q[i], obst.normals[i]);
        let e: Vec<f64> = [0.08, 0.04, 0.02, 0.01]
            .iter()
            .map(|&m| {
                let x = [q[0] + m * nu[0], q[1] + m * nu[1]];
                (u_s(x, &obst, &d) + green(x, src, k).unwrap()).norm()
            })
            .collect();
        for w in e.windows(2) {
            assert!(w[1] <= 0.6 * w[0], "node {i}: {e:?}");
        }
    }
}

#[test]
fn density_is_linear_in_data() {
    let obst = kite_obstacle([0.0, 0.0], 1.0, 128).unwrap();
    let k = C64::new(4.0, 0.5);
    let (s1, s2) = ([3.0, 0.0], [0.0, -3.0]);
    let (a, b) = (C64::new(2.0, -1.0), C64::new(-0.5, 3.0));
    let d1 = solve(&obst, k, |y| green(y, s1, k).unwrap());
    let d2 = solve(&obst, k, |y| green(y, s2, k).unwrap());
    let dc = solve(&obst, k, |y| a * green(y, s1, k).unwrap() + b * green(y, s2, k).unwrap());
    for i in 0..128 {
        let want = a * d1.psi[i] + b * d2.psi[i];
        assert!((dc.psi[i] - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }
}

#[test]
fn scattered_field_decays_in_lossy_media() {
    let obst = kite_obstacle([0.0, 0.0], 1.0, 128).unwrap();
    let k = C64::new(2.0, 1.0);
    let d = solve(&obst, k, |y| green(y, [3.0, 3.0], k).unwrap());
    let v: Vec<f64> = (0..30).map(|i| u_s([2.5 + 0.5 * i as f64, -1.0], &obst, &d).norm()).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
}

#[test]
fn perimeter_converges_spectrally() {
    let p: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| kite_obstacle([0.0, 0.0], 1.0, 2 * n).unwrap().perimeter())
        .collect();
    assert!((p[1] - p[2]).abs() <= 1e-12 * p[2]);
    assert!((p[0] - p[2]).abs() <= 1e-6 * p[2]);
}

#[test]
fn node_evaluation_is_singular() {
    let obst = kite_obstacle([0.0, 0.0], 1.0, 64).unwrap();
    let k = C64::new(1.0, 0.0);
    let d = solve(&obst, k, |y| green(y, [3.0, 0.0], k).unwrap());
    assert!(scattered_field(obst.q[5], &obst, &d).is_err());
    let near = [obst.q[5][0] + 1e-4 * obst.normals[5][0], obst.q[5][1] + 1e-4 * obst.normals[5][1]];
    assert!(scattered_field(near, &obst, &d).unwrap().accuracy_warning);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn dirichlet_condition_holds_for_lossy_wavenumbers(
        kr in 0.5f64..10.0,
        ki in 0.0f64..4.0,
        t in 0.0f64..6.28,
    ) {
        let kite = Kite { center: [0.0, 0.0], scale: 0.5 };
        let obst = kite.discretize(384).unwrap();
        let k = C64::new(kr, ki);
        let src = [3.0 * t.cos(), 3.0 * t.sin()];
        let d = solve(&obst, k, |y| green(y, src, k).unwrap());
        let res = boundary_residual(&kite, &obst, &d, &|x| green(x, src, k)).unwrap();
        let scale = obst.q.iter().map(|&y| green(y, src, k).unwrap().norm()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-4 * scale, "k={} res {:e}", k, res / scale);
        prop_assert!(dist(src, kite.center) > kite.extent());
    }
}
