//! Shared fixtures for the criterion benches.

use dcopt_core::random::{random_full_rank, stream_rng};
use dcopt_core::states::max_entangled;
use dcopt_core::DensityMatrix;

pub fn entangled(d: usize) -> DensityMatrix {
    max_entangled(d).expect("benchmark dimension is valid")
}

pub fn mixed(d: usize, seed: u64) -> DensityMatrix {
    random_full_rank((d, d), &mut stream_rng(seed, 0))
}
