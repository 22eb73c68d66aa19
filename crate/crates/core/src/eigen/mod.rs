//! Dense Hermitian eigensolver for the lowest two eigenpairs.
//!
//! The matrix is reduced to real symmetric tridiagonal form by Householder
//! reflections followed by a diagonal phase rotation, the tridiagonal is
//! fully diagonalized by implicit-shift QL, and the requested eigenvectors
//! are mapped back to the original basis.

mod ql;
mod tridiagonal;

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use ql::{DenseVectors, RotationLog};
use tridiagonal::Tridiagonal;

/// Tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default residual tolerance relative to `max(1, spectral scale)`.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
/// Default degeneracy tolerance relative to the spectral scale.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Above this dimension the eigenvector matrix is accumulated densely
/// instead of logging rotations.
const ROTATION_LOG_MAX_DIM: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix dimension {0} is too small, need at least 2")]
    TooSmall(usize),
    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation:e}")]
    NonHermitian { row: usize, col: usize, deviation: f64 },
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate ground state: gap {gap:e} <= threshold {threshold:e}")]
    DegenerateGroundState { gap: f64, threshold: f64 },
    #[error("residual of eigenpair {which} is {residual:e}, above limit {limit:e}")]
    ResidualTooLarge { which: usize, residual: f64, limit: f64 },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

/// Dense Hermitian matrix in full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] and symmetrizes exactly.
    pub fn from_row_major(n: usize, mut data: Vec<Complex64>) -> Result<Self, EigenError> {
        if data.len() != n * n {
            return Err(EigenError::DimensionMismatch { expected: n * n, found: data.len() });
        }
        for r in 0..n {
            for c in r..n {
                let a = data[r * n + c];
                let b = data[c * n + r].conj();
                let deviation = (a - b).norm();
                if deviation > HERMITIAN_TOL || !a.re.is_finite() || !a.im.is_finite() {
                    return Err(EigenError::NonHermitian { row: r, col: c, deviation });
                }
                let avg = (a + b) * 0.5;
                data[r * n + c] = avg;
                data[c * n + r] = avg.conj();
            }
        }
        Ok(Self { n, data })
    }

    /// Real symmetric convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, EigenError> {
        let n = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| Complex64::new(v, 0.0))).collect();
        Self::from_row_major(n, data)
    }

    /// Builds from the lower triangle (diagonal real part only); the upper
    /// triangle is filled with conjugates, so the result is exactly Hermitian.
    pub(crate) fn from_lower(n: usize, mut data: Vec<Complex64>) -> Self {
        for r in 0..n {
            data[r * n + r].im = 0.0;
            for c in r + 1..n {
                data[r * n + c] = data[c * n + r].conj();
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data.chunks_exact(self.n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `⟨v|H|v⟩` real part.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.apply(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Maximum absolute row sum.
    pub fn spectral_scale(&self) -> f64 {
        self.data.chunks_exact(self.n).map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i].re += c;
        }
        out
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }
}

enum Vectors {
    Log(RotationLog),
    Dense(DenseVectors),
}

/// Full spectral decomposition; eigenvectors are materialized on request.
pub struct Decomposition {
    eigenvalues: Vec<f64>,
    /// `order[k]` is the tridiagonal column holding the k-th smallest eigenvalue.
    order: Vec<usize>,
    tridiagonal: Tridiagonal,
    vectors: Vectors,
}

impl Decomposition {
    pub fn compute(h: &HermitianMatrix) -> Result<Self, EigenError> {
        let n = h.dim();
        let tri = Tridiagonal::reduce(h.data.clone(), n);
        let mut values = tri.diag.clone();
        let vectors = if n <= ROTATION_LOG_MAX_DIM {
            let mut log = RotationLog::new(n);
            ql::tql2(&mut values, &tri.offdiag, &mut log)?;
            Vectors::Log(log)
        } else {
            let mut dense = DenseVectors::identity(n);
            ql::tql2(&mut values, &tri.offdiag, &mut dense)?;
            Vectors::Dense(dense)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues = order.iter().map(|&k| values[k]).collect();
        Ok(Self { eigenvalues, order, tridiagonal: tri, vectors })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Normalized eigenvector of the k-th smallest eigenvalue.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let col = self.order[k];
        let y = match &self.vectors {
            Vectors::Log(log) => log.column(col),
            Vectors::Dense(dense) => dense.column(col),
        };
        let mut z = self.tridiagonal.back_transform(&y);
        normalize(&mut z);
        z
    }
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>, EigenError> {
    Ok(Decomposition::compute(h)?.eigenvalues)
}

/// Lowest two eigenpairs with residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// Ground state; largest-magnitude coefficient is real positive.
    pub psi0: Vec<Complex64>,
    pub psi1: Vec<Complex64>,
    pub residual0: f64,
    pub residual1: f64,
    /// Full spectrum, ascending.
    pub spectrum: Vec<f64>,
    /// Max absolute row sum of the input.
    pub spectral_scale: f64,
}

/// Computes the two lowest eigenpairs of `h`.
///
/// Fails with [`EigenError::DegenerateGroundState`] when the gap is at most
/// `degeneracy_tol` times the spectral scale, and with
/// [`EigenError::ResidualTooLarge`] when a residual exceeds
/// `tol·max(1, scale)`.
pub fn lowest_two(h: &HermitianMatrix, tol: f64, degeneracy_tol: f64) -> Result<SpectrumResult, EigenError> {
    for t in [tol, degeneracy_tol] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(EigenError::InvalidTolerance(t));
        }
    }
    let n = h.dim();
    if n < 2 {
        return Err(EigenError::TooSmall(n));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(EigenError::NonHermitian { row: 0, col: 0, deviation: defect });
    }
    let scale = h.spectral_scale();
    let decomposition = Decomposition::compute(h)?;
    let spectrum = decomposition.eigenvalues().to_vec();
    let (e0, e1) = (spectrum[0], spectrum[1]);
    let gap = e1 - e0;
    let threshold = degeneracy_tol * scale;
    if gap <= threshold {
        return Err(EigenError::DegenerateGroundState { gap, threshold });
    }

    let mut psi0 = decomposition.eigenvector(0);
    let mut psi1 = decomposition.eigenvector(1);
    fix_phase(&mut psi0);
    fix_phase(&mut psi1);
    let limit = tol * scale.max(1.0);
    let residual0 = residual(h, &psi0, e0);
    let residual1 = residual(h, &psi1, e1);
    for (which, r) in [(0, residual0), (1, residual1)] {
        if !(r <= limit) {
            return Err(EigenError::ResidualTooLarge { which, residual: r, limit });
        }
    }
    Ok(SpectrumResult { e0, e1, gap, psi0, psi1, residual0, residual1, spectrum, spectral_scale: scale })
}

/// `‖H v − E v‖₂`.
pub fn residual(h: &HermitianMatrix, v: &[Complex64], e: f64) -> f64 {
    h.apply(v).iter().zip(v).map(|(hv, vi)| (hv - vi * e).norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Rotates the global phase so the largest-magnitude entry is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

/// Writes `<index> <eigenvalue>` lines.
pub fn write_spectrum<W: Write>(mut out: W, eigenvalues: &[f64]) -> io::Result<()> {
    for (i, e) in eigenvalues.iter().enumerate() {
        writeln!(out, "{i} {e:.17e}")?;
    }
    Ok(())
}
