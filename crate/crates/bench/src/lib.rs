//! Shared fixtures for the benchmarks.

use paras_core::{Configuration, ProblemKind, ProblemSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Instances benchmarked for every kernel, sized like the larger desk-scale
/// runs.
pub const INSTANCES: [(ProblemKind, usize); 3] = [
    (ProblemKind::MagicSquare, 30),
    (ProblemKind::CostasArray, 16),
    (ProblemKind::AllInterval, 50),
];

/// A spec together with a reproducible random configuration of it.
pub fn fixture(kind: ProblemKind, n: usize, seed: u64) -> (ProblemSpec, Configuration) {
    let spec = ProblemSpec::new(kind, n).expect("benchmark sizes are valid");
    let config = Configuration::random(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
    (spec, config)
}
