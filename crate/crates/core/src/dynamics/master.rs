//! Deterministic evolution of the ensemble density matrix.
//!
//! dρ/dt = −i[H, ρ]/ħ − R∘ρ, where R_cc′ = ½Q(A_c − A_c′). Each step is
//! ρ ← U ρ U†, ρ ← e^{−R dt}∘ρ, ρ ← U ρ U† with U the unitary half step. The
//! Hadamard factor is the exact collapse map, so H = 0 is solved exactly at
//! any dt and positivity is preserved.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::geometry::CollapseGeometry;
use super::trajectory::{Propagator, QuantumState};
use crate::error::{ensure_positive, Error, Result};

pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(state: &QuantumState) -> Self {
        DensityMatrix { matrix: state.projector() }
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = DensityMatrix { matrix };
        let herm = (&rho.matrix - rho.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("not Hermitian ({herm:e})") });
        }
        rho.check()?;
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self) -> Result<()> {
        let trace = self.trace();
        let min_eigenvalue = self.min_eigenvalue();
        if (trace - 1.0).abs() > TRACE_TOLERANCE || min_eigenvalue < -POSITIVITY_TOLERANCE {
            return Err(Error::Positivity { min_eigenvalue, trace });
        }
        Ok(())
    }

    /// Tr[Oρ].
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> f64 {
        (op * &self.matrix).trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let diff = rho - sigma;
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * herm.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

/// Precomputed one-step map.
pub struct MasterStepper {
    decay: DMatrix<Complex64>,
    propagator: Propagator,
}

impl MasterStepper {
    pub fn new(geometry: &CollapseGeometry, propagator: Propagator) -> Self {
        let dt = propagator.dt;
        let decay = geometry.rates().map(|r| Complex64::new((-r * dt).exp(), 0.0));
        MasterStepper { decay, propagator }
    }

    pub fn dt(&self) -> f64 {
        self.propagator.dt
    }

    pub fn step(&self, rho: &mut DMatrix<Complex64>) {
        if let Some(u) = self.propagator.half_step() {
            *rho = u * &*rho * u.adjoint();
        }
        rho.component_mul_assign(&self.decay);
        if let Some(u) = self.propagator.half_step() {
            *rho = u * &*rho * u.adjoint();
        }
    }
}

/// ρ at times 0, record_every·dt, … up to `steps`·dt.
pub fn evolve_series(
    rho0: &DensityMatrix,
    geometry: &CollapseGeometry,
    propagator: Propagator,
    steps: usize,
    record_every: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    if rho0.dim() != geometry.n_configs() {
        return Err(Error::Shape(format!("rho is {}, basis has {}", rho0.dim(), geometry.n_configs())));
    }
    let record_every = record_every.max(1);
    let stepper = MasterStepper::new(geometry, propagator);
    let mut rho = rho0.matrix.clone();
    let mut out = vec![(0.0, rho0.clone())];
    for i in 1..=steps {
        stepper.step(&mut rho);
        if i % record_every == 0 || i == steps {
            let d = DensityMatrix { matrix: rho.clone() };
            d.check()?;
            out.push((i as f64 * stepper.dt(), d));
        }
    }
    Ok(out)
}

/// ρ(T) from ρ₀, with T rounded to a whole number of steps of at most `dt`.
pub fn evolve_density_matrix(
    rho0: &DensityMatrix,
    geometry: &CollapseGeometry,
    hamiltonian: &DMatrix<Complex64>,
    hbar: f64,
    total_time: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    ensure_positive("dt", dt)?;
    if total_time < 0.0 {
        return Err(Error::InvalidParameter { name: "total_time", reason: "negative".into() });
    }
    let steps = (total_time / dt).ceil() as usize;
    if steps == 0 {
        return Ok(rho0.clone());
    }
    let propagator = Propagator::new(hamiltonian, hbar, total_time / steps as f64)?;
    let series = evolve_series(rho0, geometry, propagator, steps, steps)?;
    Ok(series.into_iter().last().expect("non-empty").1)
}
