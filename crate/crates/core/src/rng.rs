//! Counter-based random streams.
//!
//! Every independent task (trajectory, run, batch) draws from its own ChaCha
//! stream keyed by (master seed, domain) and selected by the task index, so
//! results do not depend on how tasks are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the streams used by different subsystems under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Trajectory = 1,
    VacuumConfig = 2,
    ForceSample = 3,
    Brownian = 4,
    Sweep = 5,
}

pub fn stream(master_seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
