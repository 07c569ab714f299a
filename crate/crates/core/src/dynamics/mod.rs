//! Lattice CSL: stochastic trajectories and the master equation.

pub mod energy;
pub mod ensemble;
mod fft;
pub mod geometry;
pub mod master;
pub mod trajectory;

pub use energy::{measure_energy_series, EnergySeries, EnergySource};
pub use ensemble::{run_ensemble, EnsembleResult, EnsembleSpec};
pub use geometry::{sample_noise_slice, CollapseGeometry, NoiseSlice};
pub use master::{evolve_density_matrix, evolve_series, trace_distance, DensityMatrix};
pub use trajectory::{step_projected, step_trajectory, Propagator, QuantumState};
