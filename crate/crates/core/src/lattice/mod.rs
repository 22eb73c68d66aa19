//! One-particle lattice Hamiltonians built from `N0 x N0` blocks.
//!
//! A model has `L` supersites with `N0` internal states each. Every
//! off-diagonal pair `(x, x')` with `x < x'` is stored once; its conjugate
//! transpose fills the mirrored position during assembly. Onsite blocks are
//! stored once and must be Hermitian. Coordinates are 1-based.

mod model_file;

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::eigen::{hermitian_eigenvalues, HermitianMatrix};

pub use model_file::{parse_model, write_model, ParseError};

/// Hermiticity tolerance for onsite blocks.
pub const ONSITE_HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("lattice must have at least one site and internal dimension >= 1 (L={sites}, N0={internal_dim})")]
    EmptyLattice { sites: usize, internal_dim: usize },
    #[error("site {x} out of range 1..={max}")]
    SiteOutOfRange { x: usize, max: usize },
    #[error("hopping pair ({x}, {x2}) must satisfy x < x'")]
    UnorderedPair { x: usize, x2: usize },
    #[error("hopping pair ({x}, {x2}) specified more than once")]
    DuplicatePair { x: usize, x2: usize },
    #[error("onsite block at site {x} specified more than once")]
    DuplicateOnsite { x: usize },
    #[error("onsite block at site {x} is not Hermitian (deviation {deviation:e})")]
    NonHermitianOnsite { x: usize, deviation: f64 },
    #[error("block has dimension {found}, expected {expected}")]
    BlockDimension { expected: usize, found: usize },
    #[error("block contains a non-finite entry")]
    NonFinite,
    #[error("model has no off-diagonal blocks")]
    NoHopping,
    #[error("hopping beyond nearest neighbors at pairs {pairs:?}")]
    LongRangeHopping { pairs: Vec<(usize, usize)> },
    #[error("chain length {0} must be even and >= 2")]
    InvalidChainLength(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Site label `(x, i)` with `1 <= x <= L`, `1 <= i <= N0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex {
    pub x: usize,
    pub i: usize,
}

impl SiteIndex {
    /// Zero-based position in the assembled matrix.
    pub fn flat(self, internal_dim: usize) -> usize {
        (self.x - 1) * internal_dim + (self.i - 1)
    }
}

/// Dense square complex block, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    dim: usize,
    data: Vec<Complex64>,
}

impl Block {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::default(); dim * dim] }
    }

    pub fn scalar(value: Complex64) -> Self {
        Self { dim: 1, data: vec![value] }
    }

    pub fn real_scalar(value: f64) -> Self {
        Self::scalar(Complex64::new(value, 0.0))
    }

    pub fn identity(dim: usize, value: f64) -> Self {
        let mut b = Self::zeros(dim);
        for i in 0..dim {
            b.data[i * dim + i] = Complex64::new(value, 0.0);
        }
        b
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self, ModelError> {
        if data.len() != dim * dim {
            return Err(ModelError::BlockDimension { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Zero-based entry.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn symmetrized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        match self.dim {
            0 => 0.0,
            1 => self.data[0].norm(),
            n => {
                // σ_max² is the top eigenvalue of h†h.
                let gram = Block::from_fn(n, |i, j| (0..n).map(|k| self.get(k, i).conj() * self.get(k, j)).sum());
                let h = HermitianMatrix::from_lower(n, gram.data);
                let top = hermitian_eigenvalues(&h).map(|v| v[n - 1]).unwrap_or(f64::NAN);
                top.max(0.0).sqrt()
            }
        }
    }
}

/// Exponential hopping envelope `V(r) = Cv·exp(−μ r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoppingEnvelope {
    pub cv: f64,
    pub mu: f64,
}

impl HoppingEnvelope {
    pub fn new(cv: f64, mu: f64) -> Result<Self, ModelError> {
        if !(cv > 0.0 && cv.is_finite() && mu > 0.0 && mu.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "envelope needs Cv > 0 and mu > 0, got Cv={cv}, mu={mu}"
            )));
        }
        Ok(Self { cv, mu })
    }

    pub fn at(&self, distance: f64) -> f64 {
        self.cv * (-self.mu * distance).exp()
    }

    /// Whether every stored block respects the envelope (relative slack 1e-12).
    pub fn admits(&self, spec: &ModelSpec) -> bool {
        spec.hoppings().all(|(x, x2, b)| b.spectral_norm() <= self.at((x2 - x) as f64) * (1.0 + 1e-12))
    }
}

/// Nearest-neighbor hopping bound `V0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestNeighborBound {
    pub v0: f64,
}

/// Declarative one-particle lattice Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    sites: usize,
    internal_dim: usize,
    hoppings: BTreeMap<(usize, usize), Block>,
    onsite: BTreeMap<usize, Block>,
    label: String,
}

/// Collects blocks and validates them on [`ModelBuilder::build`].
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    sites: usize,
    internal_dim: usize,
    hoppings: Vec<(usize, usize, Block)>,
    onsite: Vec<(usize, Block)>,
    label: String,
    symmetrize_onsite: bool,
}

impl ModelBuilder {
    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn hopping(mut self, x: usize, x2: usize, block: Block) -> Self {
        self.hoppings.push((x, x2, block));
        self
    }

    pub fn onsite(mut self, x: usize, block: Block) -> Self {
        self.onsite.push((x, block));
        self
    }

    /// Replace accepted onsite blocks by their exact Hermitian part.
    pub fn symmetrize_onsite(mut self, yes: bool) -> Self {
        self.symmetrize_onsite = yes;
        self
    }

    pub fn build(self) -> Result<ModelSpec, ModelError> {
        let (sites, n0) = (self.sites, self.internal_dim);
        if sites == 0 || n0 == 0 {
            return Err(ModelError::EmptyLattice { sites, internal_dim: n0 });
        }
        let check_site = |x: usize| {
            if (1..=sites).contains(&x) {
                Ok(())
            } else {
                Err(ModelError::SiteOutOfRange { x, max: sites })
            }
        };
        let check_block = |b: &Block| {
            if b.dim != n0 {
                Err(ModelError::BlockDimension { expected: n0, found: b.dim })
            } else if !b.is_finite() {
                Err(ModelError::NonFinite)
            } else {
                Ok(())
            }
        };

        let mut hoppings = BTreeMap::new();
        for (x, x2, block) in self.hoppings {
            check_site(x)?;
            check_site(x2)?;
            if x >= x2 {
                return Err(ModelError::UnorderedPair { x, x2 });
            }
            check_block(&block)?;
            if hoppings.insert((x, x2), block).is_some() {
                return Err(ModelError::DuplicatePair { x, x2 });
            }
        }
        let mut onsite = BTreeMap::new();
        for (x, block) in self.onsite {
            check_site(x)?;
            check_block(&block)?;
            let deviation = block.hermiticity_defect();
            if deviation > ONSITE_HERMITIAN_TOL {
                return Err(ModelError::NonHermitianOnsite { x, deviation });
            }
            let block = if self.symmetrize_onsite { block.symmetrized() } else { block };
            if onsite.insert(x, block).is_some() {
                return Err(ModelError::DuplicateOnsite { x });
            }
        }
        Ok(ModelSpec { sites, internal_dim: n0, hoppings, onsite, label: self.label })
    }
}

impl ModelSpec {
    pub fn builder(sites: usize, internal_dim: usize) -> ModelBuilder {
        ModelBuilder {
            sites,
            internal_dim,
            hoppings: Vec::new(),
            onsite: Vec::new(),
            label: String::new(),
            symmetrize_onsite: true,
        }
    }

    /// Number of supersites `L`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Internal dimension `N0`.
    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn dim(&self) -> usize {
        self.sites * self.internal_dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Off-diagonal blocks as `(x, x', block)` with `x < x'`.
    pub fn hoppings(&self) -> impl Iterator<Item = (usize, usize, &Block)> + '_ {
        self.hoppings.iter().map(|(&(x, x2), b)| (x, x2, b))
    }

    pub fn onsite_blocks(&self) -> impl Iterator<Item = (usize, &Block)> + '_ {
        self.onsite.iter().map(|(&x, b)| (x, b))
    }

    pub fn hopping_block(&self, x: usize, x2: usize) -> Option<&Block> {
        self.hoppings.get(&(x.min(x2), x.max(x2)))
    }

    /// Same model with `c` added to every onsite diagonal entry.
    pub fn with_potential_shift(&self, c: f64) -> ModelSpec {
        let mut out = self.clone();
        for x in 1..=self.sites {
            let block = out.onsite.entry(x).or_insert_with(|| Block::zeros(self.internal_dim));
            for i in 0..self.internal_dim {
                let v = block.get(i, i) + c;
                block.set(i, i, v);
            }
        }
        out
    }

    /// One-particle-sector matrix of dimension `L·N0`.
    pub fn assemble(&self) -> HermitianMatrix {
        let (n0, n) = (self.internal_dim, self.dim());
        let mut data = vec![Complex64::default(); n * n];
        for (&x, block) in &self.onsite {
            let base = (x - 1) * n0;
            for i in 0..n0 {
                for j in 0..n0 {
                    data[(base + i) * n + base + j] = block.get(i, j);
                }
            }
        }
        for (&(x, x2), block) in &self.hoppings {
            let (r0, c0) = ((x - 1) * n0, (x2 - 1) * n0);
            for i in 0..n0 {
                for j in 0..n0 {
                    let h = block.get(i, j);
                    data[(r0 + i) * n + c0 + j] = h;
                    data[(c0 + j) * n + r0 + i] = h.conj();
                }
            }
        }
        // Onsite blocks are stored Hermitian (exactly, after symmetrization);
        // from_lower only pins the diagonal to real.
        HermitianMatrix::from_lower(n, data)
    }

    /// Spectral norm of the hopping block between `x` and `x2`; zero if absent.
    pub fn block_norm(&self, x: usize, x2: usize) -> f64 {
        self.hopping_block(x, x2).map_or(0.0, Block::spectral_norm)
    }

    /// Smallest `Cv` for which every block satisfies `norm <= Cv·exp(−μ|x−x'|)`.
    pub fn fit_envelope(&self, mu: f64) -> Result<HoppingEnvelope, ModelError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if self.hoppings.is_empty() {
            return Err(ModelError::NoHopping);
        }
        let cv = self.hoppings().map(|(x, x2, b)| b.spectral_norm() * (mu * (x2 - x) as f64).exp()).fold(0.0, f64::max);
        if cv == 0.0 {
            return Err(ModelError::NoHopping);
        }
        HoppingEnvelope::new(cv, mu)
    }

    /// `V0` = largest nearest-neighbor block norm; any stored block at
    /// distance two or more with a nonzero entry is an error.
    pub fn check_nearest_neighbor(&self) -> Result<NearestNeighborBound, ModelError> {
        let pairs: Vec<(usize, usize)> = self
            .hoppings()
            .filter(|(x, x2, b)| x2 - x >= 2 && b.data.iter().any(|z| *z != Complex64::default()))
            .map(|(x, x2, _)| (x, x2))
            .collect();
        if !pairs.is_empty() {
            return Err(ModelError::LongRangeHopping { pairs });
        }
        let v0 =
            self.hoppings().filter(|(x, x2, _)| x2 - x == 1).map(|(_, _, b)| b.spectral_norm()).fold(0.0, f64::max);
        Ok(NearestNeighborBound { v0 })
    }
}

/// Center supersite (1-based) of [`impurity_model`] with chain parameter `l`.
pub fn impurity_center(l: usize) -> usize {
    l / 2 + 1
}

/// Chain of `l + 1` sites `x = −l/2..l/2` with unit nearest-neighbor hopping
/// and a single onsite potential `h0` at the middle.
pub fn impurity_model(l: usize, h0: f64) -> Result<ModelSpec, ModelError> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(ModelError::InvalidChainLength(l));
    }
    if !h0.is_finite() {
        return Err(ModelError::NonFinite);
    }
    let sites = l + 1;
    let mut builder = ModelSpec::builder(sites, 1).label(format!("impurity L={l} h0={h0}"));
    for x in 1..sites {
        builder = builder.hopping(x, x + 1, Block::real_scalar(1.0));
    }
    if h0 != 0.0 {
        builder = builder.onsite(impurity_center(l), Block::real_scalar(h0));
    }
    builder.build()
}

/// `width x length` square-lattice strip flattened along its length: each
/// column of `width` sites becomes one supersite with `N0 = width`.
pub fn strip_model(
    width: usize,
    length: usize,
    hopping: f64,
    potential: impl Fn(usize, usize) -> f64,
) -> Result<ModelSpec, ModelError> {
    if width == 0 || length == 0 {
        return Err(ModelError::EmptyLattice { sites: length, internal_dim: width });
    }
    let mut builder = ModelSpec::builder(length, width).label(format!("strip {width}x{length}"));
    for x in 1..=length {
        let onsite = Block::from_fn(width, |i, j| {
            if i == j {
                Complex64::new(potential(x, i + 1), 0.0)
            } else if i.abs_diff(j) == 1 {
                Complex64::new(hopping, 0.0)
            } else {
                Complex64::default()
            }
        });
        builder = builder.onsite(x, onsite);
        if x < length {
            builder = builder.hopping(x, x + 1, Block::identity(width, hopping));
        }
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_site_assembly() {
        let spec = ModelSpec::builder(2, 1).hopping(1, 2, Block::real_scalar(-1.0)).build().unwrap();
        let m = spec.assemble();
        assert_eq!(m.get(0, 0), c(0.0, 0.0));
        assert_eq!(m.get(0, 1), c(-1.0, 0.0));
        assert_eq!(m.get(1, 0), c(-1.0, 0.0));
        assert_eq!(m.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn complex_hopping_is_conjugated_below_diagonal() {
        let spec = ModelSpec::builder(3, 1).hopping(1, 3, Block::scalar(c(0.3, 0.4))).build().unwrap();
        let m = spec.assemble();
        assert_eq!(m.get(0, 2), c(0.3, 0.4));
        assert_eq!(m.get(2, 0), c(0.3, -0.4));
    }

    #[test]
    fn random_onsite_block_is_hermitian_after_assembly() {
        let onsite = Block::from_row_major(2, vec![c(0.7, 0.0), c(0.1, -0.9), c(0.1, 0.9), c(-1.3, 0.0)]).unwrap();
        let hop = Block::from_row_major(2, vec![c(0.2, 0.1), c(-0.4, 0.0), c(0.0, 0.5), c(1.0, -0.3)]).unwrap();
        let spec =
            ModelSpec::builder(3, 2).onsite(2, onsite).hopping(1, 2, hop.clone()).hopping(2, 3, hop).build().unwrap();
        let m = spec.assemble();
        for r in 0..6 {
            for col in 0..6 {
                assert_eq!(m.get(r, col), m.get(col, r).conj());
            }
        }
    }

    #[test]
    fn validation_errors() {
        let b = || Block::real_scalar(1.0);
        assert!(matches!(
            ModelSpec::builder(2, 1).hopping(1, 3, b()).build(),
            Err(ModelError::SiteOutOfRange { x: 3, max: 2 })
        ));
        assert!(matches!(ModelSpec::builder(2, 1).hopping(2, 1, b()).build(), Err(ModelError::UnorderedPair { .. })));
        assert!(matches!(
            ModelSpec::builder(2, 1).hopping(1, 2, b()).hopping(1, 2, b()).build(),
            Err(ModelError::DuplicatePair { x: 1, x2: 2 })
        ));
        assert!(matches!(
            ModelSpec::builder(2, 1).onsite(1, Block::scalar(c(0.0, 1.0))).build(),
            Err(ModelError::NonHermitianOnsite { x: 1, .. })
        ));
        assert!(matches!(
            ModelSpec::builder(2, 2).onsite(1, b()).build(),
            Err(ModelError::BlockDimension { expected: 2, found: 1 })
        ));
        assert!(matches!(ModelSpec::builder(0, 1).build(), Err(ModelError::EmptyLattice { .. })));
    }

    #[test]
    fn block_norms() {
        assert_abs_diff_eq!(Block::real_scalar(-1.0).spectral_norm(), 1.0);
        assert_abs_diff_eq!(Block::scalar(c(0.3, 0.4)).spectral_norm(), 0.5, epsilon = 1e-15);
        let diag = Block::from_row_major(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(diag.spectral_norm(), 2.0, epsilon = 1e-14);
        // Rank one: [[1, 1], [1, 1]] has σ_max = 2.
        let ones = Block::from_fn(2, |_, _| c(1.0, 0.0));
        assert_abs_diff_eq!(ones.spectral_norm(), 2.0, epsilon = 1e-14);

        let spec = ModelSpec::builder(3, 2).hopping(1, 3, diag).build().unwrap();
        assert_eq!(spec.block_norm(1, 3), spec.block_norm(3, 1));
        assert_eq!(spec.block_norm(1, 2), 0.0);
    }

    #[test]
    fn envelope_fits() {
        let chain = impurity_model(10, -0.3).unwrap();
        assert_abs_diff_eq!(chain.fit_envelope(1.0).unwrap().cv, E, epsilon = 1e-14);

        let single = ModelSpec::builder(5, 1).hopping(1, 4, Block::real_scalar(1.0)).build().unwrap();
        assert_abs_diff_eq!(single.fit_envelope(1.0).unwrap().cv, E.powi(3), epsilon = 1e-12);

        let mut b = ModelSpec::builder(6, 1);
        for x in 1..=6 {
            for x2 in x + 1..=6 {
                b = b.hopping(x, x2, Block::real_scalar((-((x2 - x) as f64)).exp()));
            }
        }
        let exact = b.build().unwrap();
        assert_abs_diff_eq!(exact.fit_envelope(1.0).unwrap().cv, 1.0, epsilon = 1e-12);

        let empty = ModelSpec::builder(3, 1).build().unwrap();
        assert_eq!(empty.fit_envelope(1.0), Err(ModelError::NoHopping));
    }

    #[test]
    fn nearest_neighbor_checks() {
        assert_eq!(impurity_model(500, -0.5).unwrap().check_nearest_neighbor().unwrap().v0, 1.0);
        let far = ModelSpec::builder(4, 1)
            .hopping(1, 2, Block::real_scalar(1.0))
            .hopping(2, 4, Block::real_scalar(1e-9))
            .build()
            .unwrap();
        assert_eq!(far.check_nearest_neighbor(), Err(ModelError::LongRangeHopping { pairs: vec![(2, 4)] }));
        let empty = ModelSpec::builder(4, 1).build().unwrap();
        assert_eq!(empty.check_nearest_neighbor().unwrap().v0, 0.0);
    }

    #[test]
    fn impurity_model_layout() {
        let free = impurity_model(2, 0.0).unwrap();
        assert_eq!(free.sites(), 3);
        assert_eq!(free.hoppings().count(), 2);
        assert_eq!(free.onsite_blocks().count(), 0);

        let m = impurity_model(500, -0.5).unwrap().assemble();
        assert_eq!(m.dim(), 501);
        assert_eq!(m.get(250, 250), c(-0.5, 0.0));
        assert_eq!(m.get(249, 250), c(1.0, 0.0));
        assert_eq!(m.get(0, 0), c(0.0, 0.0));

        assert_eq!(impurity_model(3, -1.0), Err(ModelError::InvalidChainLength(3)));
        assert_eq!(impurity_model(0, -1.0), Err(ModelError::InvalidChainLength(0)));
    }

    #[test]
    fn potential_shift_touches_only_diagonal() {
        let spec = impurity_model(4, -0.5).unwrap().with_potential_shift(2.0);
        let m = spec.assemble();
        assert_eq!(m.get(2, 2), c(1.5, 0.0));
        assert_eq!(m.get(0, 0), c(2.0, 0.0));
        assert_eq!(m.get(0, 1), c(1.0, 0.0));
    }

    #[test]
    fn strip_flattening() {
        let spec = strip_model(3, 4, -1.0, |x, y| if (x, y) == (2, 2) { -0.5 } else { 0.0 }).unwrap();
        assert_eq!((spec.sites(), spec.internal_dim()), (4, 3));
        let m = spec.assemble();
        // (x=2, y=2) -> flat index 1*3 + 1
        assert_eq!(m.get(4, 4), c(-0.5, 0.0));
        // vertical bond inside a column
        assert_eq!(m.get(3, 4), c(-1.0, 0.0));
        // horizontal bond between columns 1 and 2 on row 3
        assert_eq!(m.get(2, 5), c(-1.0, 0.0));
        assert_eq!(spec.check_nearest_neighbor().unwrap().v0, 1.0);
    }
}
