//! Spectral gap and ground-state localization for one-particle lattice
//! Hamiltonians.
//!
//! The crate assembles block-structured tight-binding models
//! ([`lattice`]), finds the two lowest eigenpairs with a dense Hermitian
//! solver ([`eigen`]), turns the ground state into spatial statistics
//! ([`localization`]) and evaluates the gap-controlled localization bounds
//! ([`bounds`]). [`experiment`] drives the impurity-chain sweep, the
//! randomized invariant fuzzer and SVG output.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen;
pub mod experiment;
pub mod lattice;
pub mod localization;

pub use eigen::{lowest_two, HermitianMatrix, SpectrumResult};
pub use lattice::{impurity_model, Block, HoppingEnvelope, ModelSpec, NearestNeighborBound};
pub use localization::{density, fit_localization_length, DecayFit, DensityProfile, PositionStats};
