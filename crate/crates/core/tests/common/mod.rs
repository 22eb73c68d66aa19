//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;

/// Number of eigenvalues of `a` (row-major, Hermitian) strictly below `sigma`,
/// from the signs of the LDL† pivots of `a − σI` (Sylvester's law of inertia).
pub fn count_below(a: &[Complex64], n: usize, sigma: f64) -> usize {
    let mut m: Vec<Complex64> = a.to_vec();
    for i in 0..n {
        m[i * n + i] -= sigma;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = m[k * n + k].re;
        if pivot == 0.0 {
            pivot = -f64::EPSILON * (1.0 + sigma.abs());
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let factor = m[i * n + k] / pivot;
            for j in k + 1..n {
                let update = factor * m[k * n + j];
                m[i * n + j] -= update;
            }
        }
    }
    negatives
}

/// All eigenvalues by bisection on [`count_below`], ascending.
pub fn bisection_eigenvalues(a: &[Complex64], n: usize) -> Vec<f64> {
    let radius = (0..n).map(|i| (0..n).map(|j| a[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, n, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Real roots of `λ³ + b λ² + c λ + d` with three real roots (trigonometric form).
pub fn cubic_real_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    if p.abs() < 1e-300 {
        let r = (-q).cbrt() + shift;
        return [r, r, r];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        *r = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Eigenvalues of a 3×3 Hermitian matrix from its characteristic polynomial.
pub fn eigenvalues_3x3(a: &[Complex64]) -> [f64; 3] {
    let e = |i: usize, j: usize| a[i * 3 + j];
    let trace = e(0, 0).re + e(1, 1).re + e(2, 2).re;
    let minors = (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)).re
        + (e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0)).re
        + (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)).re;
    let det = (e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0)))
    .re;
    cubic_real_roots(-trace, minors, -det)
}

/// `4Cv Σ_{x≥0} (x + 1)² e^{−μx}`, summed until terms drop below `1e-18`.
pub fn c1_partial_sum(cv: f64, mu: f64) -> f64 {
    let mut sum = 0.0;
    let mut x = 0.0f64;
    loop {
        let term = (x + 1.0).powi(2) * (-mu * x).exp();
        sum += term;
        if term < 1e-18 {
            break;
        }
        x += 1.0;
    }
    4.0 * cv * sum
}
