//! Unitary reduction of a dense Hermitian matrix to real symmetric tridiagonal form.

use num_complex::Complex64;

/// Householder reflector `I - tau v v†` acting on indices `offset..n`.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    offset: usize,
    v: Vec<Complex64>,
    tau: f64,
}

impl Reflector {
    fn apply(&self, z: &mut [Complex64]) {
        let tail = &mut z[self.offset..];
        let dot: Complex64 = self.v.iter().zip(tail.iter()).map(|(v, z)| v.conj() * z).sum();
        let scale = dot * self.tau;
        for (zi, vi) in tail.iter_mut().zip(&self.v) {
            *zi -= vi * scale;
        }
    }
}

/// Result of the reduction `A = Q D T D† Q†` with `T` real symmetric tridiagonal
/// and `D` a diagonal of unit phases.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `offdiag[k]` couples `k` and `k + 1`; always nonnegative.
    pub offdiag: Vec<f64>,
    phases: Vec<Complex64>,
    reflectors: Vec<Reflector>,
}

impl Tridiagonal {
    /// Reduces the row-major Hermitian matrix `a` (consumed as scratch).
    ///
    /// Columns whose entries below the subdiagonal already vanish are skipped,
    /// so banded-by-one inputs cost O(n²).
    pub fn reduce(mut a: Vec<Complex64>, n: usize) -> Self {
        let mut reflectors = Vec::new();
        let mut p = vec![Complex64::default(); n];
        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let x0 = a[(k + 1) * n + k];
            let tail: f64 = (k + 2..n).map(|r| a[r * n + k].norm_sqr()).sum();
            if tail == 0.0 {
                continue;
            }
            let norm = (x0.norm_sqr() + tail).sqrt();
            let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
            let alpha = -phase * norm;

            let mut v: Vec<Complex64> = (k + 1..n).map(|r| a[r * n + k]).collect();
            v[0] -= alpha;
            let tau = 2.0 / (v[0].norm_sqr() + tail);

            // p = tau * A22 v
            let base = k + 1;
            for i in 0..m {
                let row = &a[(base + i) * n + base..(base + i) * n + n];
                let s: Complex64 = row.iter().zip(&v).map(|(aij, vj)| aij * vj).sum();
                p[i] = s * tau;
            }
            let vp: Complex64 = v.iter().zip(&p[..m]).map(|(vi, pi)| vi.conj() * pi).sum();
            let kappa = 0.5 * tau * vp.re;
            for i in 0..m {
                p[i] -= v[i] * kappa;
            }
            // A22 -= v w† + w v†
            for i in 0..m {
                let (vi, wi) = (v[i], p[i]);
                let row = &mut a[(base + i) * n + base..(base + i) * n + n];
                for j in 0..m {
                    row[j] -= vi * p[j].conj() + wi * v[j].conj();
                }
            }
            a[(k + 1) * n + k] = alpha;
            a[k * n + k + 1] = alpha.conj();
            for r in k + 2..n {
                a[r * n + k] = Complex64::default();
                a[k * n + r] = Complex64::default();
            }
            reflectors.push(Reflector { offset: k + 1, v, tau });
        }

        let diag: Vec<f64> = (0..n).map(|k| a[k * n + k].re).collect();
        let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
        let mut phases = Vec::with_capacity(n);
        if n > 0 {
            phases.push(Complex64::new(1.0, 0.0));
        }
        for k in 0..n.saturating_sub(1) {
            let beta = a[(k + 1) * n + k];
            let mag = beta.norm();
            let prev = phases[k];
            phases.push(if mag == 0.0 { prev } else { prev * beta / mag });
            offdiag.push(mag);
        }
        Self { diag, offdiag, phases, reflectors }
    }

    /// Maps an eigenvector of the real tridiagonal back to the original basis.
    pub fn back_transform(&self, y: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = y.iter().zip(&self.phases).map(|(&yi, ph)| ph * yi).collect();
        for reflector in self.reflectors.iter().rev() {
            reflector.apply(&mut z);
        }
        z
    }
}
