mod common;

use approx::assert_abs_diff_eq;
use gapbound::eigen::{hermitian_eigenvalues, lowest_two, residual, Decomposition, DEFAULT_DEGENERACY_TOL};
use gapbound::experiment::random::{random_hermitian_matrix, trial_rng};
use gapbound::HermitianMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn matches_inertia_bisection_on_small_matrices() {
    for t in 0..200u64 {
        let mut rng = trial_rng(2024, t);
        let n = rng.gen_range(2..=6);
        let h = random_hermitian_matrix(&mut rng, n);
        let ours = hermitian_eigenvalues(&h).unwrap();
        let reference = common::bisection_eigenvalues(h.as_slice(), n);
        for (a, b) in ours.iter().zip(&reference) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}

#[test]
fn matches_characteristic_polynomial_for_three_by_three() {
    for t in 0..50u64 {
        let mut rng = trial_rng(77, t);
        let h = random_hermitian_matrix(&mut rng, 3);
        let ours = hermitian_eigenvalues(&h).unwrap();
        let roots = common::eigenvalues_3x3(h.as_slice());
        for (a, b) in ours.iter().zip(&roots) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let mut rng = trial_rng(5, 0);
    let h = random_hermitian_matrix(&mut rng, 30);
    let d = Decomposition::compute(&h).unwrap();
    let vs: Vec<Vec<Complex64>> = (0..30).map(|k| d.eigenvector(k)).collect();
    for i in 0..30 {
        assert!(residual(&h, &vs[i], d.eigenvalues()[i]) < 1e-11);
        for j in 0..30 {
            let dot: Complex64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a.conj() * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(dot.norm(), expected, epsilon = 1e-11);
        }
    }
}

#[test]
fn large_random_matrix_residuals() {
    let mut rng = trial_rng(11, 3);
    let h = random_hermitian_matrix(&mut rng, 150);
    let r = lowest_two(&h, 1e-10, DEFAULT_DEGENERACY_TOL).unwrap();
    let scale = h.spectral_scale();
    assert!(r.residual0 <= 1e-10 * scale);
    assert!(r.residual1 <= 1e-10 * scale);
    assert_abs_diff_eq!(r.spectrum.iter().sum::<f64>(), h.trace(), epsilon = 1e-9 * scale);
}

fn hermitian_strategy() -> impl Strategy<Value = HermitianMatrix> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
            let mut data = vec![Complex64::default(); n * n];
            for i in 0..n {
                for j in 0..n {
                    let (re, im) = raw[i * n + j];
                    data[i * n + j] = match i.cmp(&j) {
                        std::cmp::Ordering::Equal => Complex64::new(re, 0.0),
                        std::cmp::Ordering::Less => Complex64::new(re, im),
                        std::cmp::Ordering::Greater => {
                            let (r2, i2) = raw[j * n + i];
                            Complex64::new(r2, -i2)
                        }
                    };
                }
            }
            HermitianMatrix::from_row_major(n, data).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn spectrum_sorted_and_sums_to_trace(h in hermitian_strategy()) {
        let ev = hermitian_eigenvalues(&h).unwrap();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((ev.iter().sum::<f64>() - h.trace()).abs() <= 1e-10 * h.spectral_scale().max(1.0) * ev.len() as f64);
    }

    #[test]
    fn shift_moves_spectrum_and_keeps_gap(h in hermitian_strategy(), c in -5.0f64..5.0) {
        let a = hermitian_eigenvalues(&h).unwrap();
        let b = hermitian_eigenvalues(&h.shifted(c)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - x - c).abs() <= 1e-10 * (1.0 + c.abs() + h.spectral_scale()));
        }
        let gap_a = a[1] - a[0];
        let gap_b = b[1] - b[0];
        prop_assert!((gap_a - gap_b).abs() <= 1e-10 * (1.0 + c.abs() + h.spectral_scale()));
    }

    #[test]
    fn accepted_results_have_small_residuals(h in hermitian_strategy()) {
        if let Ok(r) = lowest_two(&h, 1e-10, DEFAULT_DEGENERACY_TOL) {
            let limit = 1e-10 * h.spectral_scale().max(1.0);
            prop_assert!(r.residual0 <= limit && r.residual1 <= limit);
            prop_assert!(r.gap > 0.0);
            let norm: f64 = r.psi0.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
