//! Seeded random models, matrices and weights.
//!
//! Trials use ChaCha8 streams: trial `t` of a run seeded with `seed` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `t`, so every
//! trial is reproducible on its own.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::WeightFunction;
use crate::eigen::HermitianMatrix;
use crate::lattice::{Block, HoppingEnvelope, ModelSpec};

/// Independent generator for trial `trial` of run `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Hermitian block with entries of magnitude up to `scale`.
pub fn random_hermitian_block(rng: &mut impl Rng, dim: usize, scale: f64) -> Block {
    let raw = Block::from_fn(dim, |_, _| unit_complex(rng) * scale);
    Block::from_fn(dim, |i, j| {
        if i == j {
            Complex64::new(raw.get(i, i).re, 0.0)
        } else if i < j {
            raw.get(i, j)
        } else {
            raw.get(j, i).conj()
        }
    })
}

/// Random complex block rescaled to spectral norm `norm`.
pub fn random_block_with_norm(rng: &mut impl Rng, dim: usize, norm: f64) -> Block {
    loop {
        let b = Block::from_fn(dim, |_, _| unit_complex(rng));
        let current = b.spectral_norm();
        if current > 1e-3 {
            return b.scaled(norm / current);
        }
    }
}

/// Random model with every block norm at most `hopping_scale·Cv·e^{−μd}`
/// for distances `d ≤ max_range`. With `hopping_scale ≤ 1` the model
/// respects `envelope`.
pub fn random_envelope_spec(
    rng: &mut impl Rng,
    sites: usize,
    dim: usize,
    envelope: &HoppingEnvelope,
    max_range: usize,
    hopping_scale: f64,
) -> ModelSpec {
    let mut builder = ModelSpec::builder(sites, dim).label("random envelope");
    for x in 1..=sites {
        if rng.gen_bool(0.8) {
            let scale = rng.gen_range(0.1..2.0);
            builder = builder.onsite(x, random_hermitian_block(rng, dim, scale));
        }
        for d in 1..=max_range {
            let x2 = x + d;
            if x2 > sites {
                break;
            }
            let keep = if d == 1 { 0.95 } else { 0.6 };
            if rng.gen_bool(keep) {
                let fraction: f64 = if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(0.05..1.0) };
                let norm = hopping_scale * fraction * envelope.at(d as f64);
                builder = builder.hopping(x, x2, random_block_with_norm(rng, dim, norm));
            }
        }
    }
    builder.build().expect("generated model is valid")
}

/// Random strictly nearest-neighbor model with block norms at most
/// `hopping_scale·v0`.
pub fn random_nearest_neighbor_spec(
    rng: &mut impl Rng,
    sites: usize,
    dim: usize,
    v0: f64,
    hopping_scale: f64,
) -> ModelSpec {
    let mut builder = ModelSpec::builder(sites, dim).label("random nearest-neighbor");
    for x in 1..=sites {
        if rng.gen_bool(0.8) {
            let scale = rng.gen_range(0.1..2.0);
            builder = builder.onsite(x, random_hermitian_block(rng, dim, scale));
        }
        if x < sites && rng.gen_bool(0.95) {
            let fraction: f64 = if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(0.05..1.0) };
            builder = builder.hopping(x, x + 1, random_block_with_norm(rng, dim, hopping_scale * fraction * v0));
        }
    }
    builder.build().expect("generated model is valid")
}

/// Dense random Hermitian matrix with entries in the unit square.
pub fn random_hermitian_matrix(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let block = random_hermitian_block(rng, n, 1.0);
    let data = (0..n * n).map(|k| block.get(k / n, k % n)).collect();
    HermitianMatrix::from_row_major(n, data).expect("Hermitian by construction")
}

/// Weight with independent entries in `[-amplitude, amplitude]`.
pub fn random_weight(rng: &mut impl Rng, sites: usize, amplitude: f64) -> WeightFunction {
    WeightFunction::new((0..sites).map(|_| rng.gen_range(-amplitude..=amplitude)).collect()).expect("finite")
}
