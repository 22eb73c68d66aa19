//! Implicit-shift QL iteration for real symmetric tridiagonal matrices.
//!
//! The iteration is the classic `tql2` scheme. Every Givens rotation it
//! performs is handed to a [`RotationSink`], which either accumulates the
//! dense eigenvector matrix or logs the rotations so that individual
//! eigenvectors can be rebuilt afterwards by replaying them.

use super::EigenError;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Receives the column rotation `Z <- Z G` on columns `(i, i + 1)`.
pub(crate) trait RotationSink {
    fn rotate(&mut self, i: usize, c: f64, s: f64);
}

/// Dense accumulation of the eigenvector matrix, row-major `n x n`.
pub(crate) struct DenseVectors {
    n: usize,
    z: Vec<f64>,
}

impl DenseVectors {
    pub fn identity(n: usize) -> Self {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        Self { n, z }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.z[k * self.n + j]).collect()
    }
}

impl RotationSink for DenseVectors {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let n = self.n;
        for k in 0..n {
            let row = &mut self.z[k * n..k * n + n];
            let h = row[i + 1];
            row[i + 1] = s * row[i] + c * h;
            row[i] = c * row[i] - s * h;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rotation {
    index: u32,
    c: f64,
    s: f64,
}

/// Ordered record of all rotations; column `j` of the accumulated matrix is
/// `G_1 G_2 ... G_m e_j`.
#[derive(Default)]
pub(crate) struct RotationLog {
    n: usize,
    rotations: Vec<Rotation>,
}

impl RotationLog {
    pub fn new(n: usize) -> Self {
        Self { n, rotations: Vec::new() }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        v[j] = 1.0;
        for rot in self.rotations.iter().rev() {
            let i = rot.index as usize;
            let (a, b) = (v[i], v[i + 1]);
            v[i] = rot.c * a + rot.s * b;
            v[i + 1] = -rot.s * a + rot.c * b;
        }
        v
    }
}

impl RotationSink for RotationLog {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        self.rotations.push(Rotation { index: i as u32, c, s });
    }
}

/// Diagonalizes the tridiagonal `(diag, offdiag)` in place.
///
/// On return `diag` holds the (unsorted) eigenvalues; eigenvalue `k`
/// belongs to column `k` of the accumulated rotation product.
pub(crate) fn tql2(diag: &mut [f64], offdiag: &[f64], sink: &mut impl RotationSink) -> Result<(), EigenError> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    let d = diag;
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&offdiag[..n - 1]);

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(EigenError::NoConvergence { index: l });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    sink.rotate(i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
