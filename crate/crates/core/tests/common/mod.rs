#![allow(dead_code)]

pub mod bigfloat;

use num_complex::Complex64 as C64;

/// Deterministic, well-spread points in the annulus r_min <= |z| <= r_max
/// (an additive Kronecker sequence, area-uniform in r).
pub fn annulus_points(count: usize, r_min: f64, r_max: f64) -> Vec<C64> {
    let a1 = 0.754_877_666_246_692_7; // 1/plastic number
    let a2 = 0.569_840_290_998_053_3; // 1/plastic number^2
    (0..count)
        .map(|i| {
            let u = (0.5 + a1 * i as f64).fract();
            let v = (0.5 + a2 * i as f64).fract();
            let r = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
            let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * v;
            C64::from_polar(r, t)
        })
        .collect()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Absolute Wronskian defect |J_n Y_n' - J_n' Y_n - 2/(pi z)| together with
/// |2/(pi z)| and the product scale |J_n| |Y_n| (1 + n/|z|).
pub fn wronskian_parts(n: usize, z: C64) -> (f64, f64, f64) {
    use helmcloak::specfun::{bessel_j_prime, bessel_j_range, bessel_y_range};
    let j = bessel_j_range(n + 1, z).unwrap();
    let y = bessel_y_range(n + 1, z).unwrap();
    let yp = if n == 0 { -y[1] } else { y[n - 1] - y[n] * (n as f64) / z };
    let jp = bessel_j_prime(n as i32, z).unwrap();
    let w = 2.0 / (std::f64::consts::PI * z);
    let scale = j[n].norm() * y[n].norm() * (1.0 + n as f64 / z.norm());
    ((j[n] * yp - jp * y[n] - w).norm(), w.norm(), scale)
}

/// Defect / (1 + |2/(pi z)|).
pub fn wronskian_residual(n: usize, z: C64) -> f64 {
    let (d, w, _) = wronskian_parts(n, z);
    d / (1.0 + w)
}

/// Defect / (|2/(pi z)| + |J_n| |Y_n| (1 + n/|z|)): what double precision
/// can resolve once J_n and Y_n grow like e^|Im z|.
pub fn wronskian_residual_scaled(n: usize, z: C64) -> f64 {
    let (d, w, s) = wronskian_parts(n, z);
    d / (w + s)
}

/// Scaled three-term recurrence residual of a sequence at order n >= 1.
pub fn recurrence_residual(f: &[C64], n: usize, z: C64) -> f64 {
    let lhs = f[n - 1] + f[n + 1] - f[n] * (2.0 * n as f64) / z;
    let scale = f[n - 1].norm().max(f[n].norm()).max(f[n + 1].norm());
    lhs.norm() / (scale * (1.0 + 2.0 * n as f64 / z.norm()))
}
