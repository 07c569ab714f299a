//! Collapse models with gravitationally motivated noise kernels.
//!
//! The analytic layers (units, kernels, parameter relations, semiclassical
//! bounds) are generic over the scalar type; the aliases below fix it to
//! `f64`. Lattice dynamics and the vacuum Monte Carlo work in `f64` only.

pub mod collapse;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod num;
mod pool;
pub mod quadrature;
pub mod quantity;
pub mod rng;
pub mod semiclassical;
pub mod solver;
pub mod stats;
pub mod vacuum;

pub use collapse::{CollapseParams, KernelKind, KernelModel};
pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use num::Real;
pub use quantity::{Dimension, Quantity};

pub type Constants = PhysicalConstants<f64>;
pub type Params = CollapseParams<f64>;
pub type Kernel = KernelModel<f64>;
pub type Q = Quantity<f64>;
pub type Monopole = solver::MonopoleSolution<f64>;
pub type Dipole = solver::DipoleSolution<f64>;
pub type Probe = semiclassical::ProbeScenario<f64>;
pub type Detectability = semiclassical::DetectabilityReport<f64>;
