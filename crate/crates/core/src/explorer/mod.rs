//! Random instances, grid scans of normalized correlation space,
//! achievability probing and the three-spin demonstration.
//!
//! All randomness comes from ChaCha20 streams: partition `p` of a run with
//! seed `s` draws from `ChaCha20Rng::seed_from_u64(s)` switched to stream `p`.
//! Work can therefore be split across threads in any way and merged by index
//! without changing results.

mod construct;
mod probe;
mod sampling;
mod scan;
mod spin;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub use construct::{realize_correlations, unit_correlation_matrix, Instance, RealizedPoint};
pub use probe::{probe_achievability, ProbeConfig, ProbeResult, DEFAULT_PROBE_DIMS, DEFAULT_PROBE_TOL};
pub use sampling::{
    gaussian_hermitian, haar_state, random_density, random_unitary, sample_density, sample_observable,
    sample_state, Ensemble, RandomSpec,
};
pub use scan::{scan_grid, Classification, GridSpec, ScanCell, DEFAULT_SCAN_TOL};
pub use spin::{
    evaluate_spin_state, ghz_state, product_state, spin_demo, spin_observables, Pauli, SpinDemoConfig,
    SpinDemoReport, SpinRow,
};

/// Identity of the random generator, recorded in every output file.
pub const GENERATOR_ID: &str =
    "chacha20 (rand_chacha 0.9; seed_from_u64, stream = partition index; normals: rand_distr 0.5 StandardNormal)";

/// Generator for partition `partition` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, partition: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(partition);
    rng
}
