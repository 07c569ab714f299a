//! Single stochastic trajectories.
//!
//! One step is a unitary half step, the collapse factor, and another unitary
//! half step. The collapse factor multiplies ψ_c by
//! exp(−dt[Q(w − A_c) − Q(w − ⟨A⟩)]) with w = ⟨A⟩ + w₀ and ⟨A⟩ taken from the
//! state at the start of the step. Only the projections b_c = B(w₀, A_c) enter,
//! so the step can be driven either by a full [`NoiseSlice`] or by b directly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::geometry::{CollapseGeometry, NoiseSlice};
use crate::error::{ensure_positive, Error, Result};

/// Factors below this abort the trajectory.
pub const NORM_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: DVector<Complex64>,
    /// ln of the accumulated pre-normalization weight.
    pub log_weight: f64,
    pub steps: u64,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter { name: "amplitudes", reason: "zero or non-finite norm".into() });
        }
        Ok(QuantumState { amplitudes: amplitudes / Complex64::new(norm, 0.0), log_weight: 0.0, steps: 0 })
    }

    /// Real non-negative amplitudes √p_c.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(p.len(), p.iter().map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0))))
    }

    pub fn basis(n: usize, c: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[c] = Complex64::new(1.0, 0.0);
        QuantumState { amplitudes: v, log_weight: 0.0, steps: 0 }
    }

    pub fn norm_weight(&self) -> f64 {
        self.log_weight.exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn expectation(&self, op: &DMatrix<Complex64>) -> f64 {
        self.amplitudes.dotc(&(op * &self.amplitudes)).re
    }

    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Index of the most probable configuration.
    pub fn outcome(&self) -> usize {
        self.probabilities()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// exp(−iH dt/2ħ) from an eigendecomposition of H.
#[derive(Debug, Clone)]
pub struct Propagator {
    half: Option<DMatrix<Complex64>>,
    pub dt: f64,
    /// Spectral norm of H, erg.
    pub h_norm: f64,
}

impl Propagator {
    pub fn new(h: &DMatrix<Complex64>, hbar: f64, dt: f64) -> Result<Self> {
        ensure_positive("dt", dt)?;
        ensure_positive("hbar", hbar)?;
        if h.iter().all(|z| *z == Complex64::default()) {
            return Ok(Propagator { half: None, dt, h_norm: 0.0 });
        }
        let eig = h.clone().symmetric_eigen();
        let h_norm = eig.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * dt / (2.0 * hbar))));
        let half = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
        Ok(Propagator { half: Some(half), dt, h_norm })
    }

    pub fn half_step(&self) -> Option<&DMatrix<Complex64>> {
        self.half.as_ref()
    }

    pub fn apply_half(&self, v: &mut DVector<Complex64>) {
        if let Some(u) = &self.half {
            *v = u * &*v;
        }
    }
}

/// Reject steps with ‖H‖dt/ħ ≥ 0.1 or rate·dt ≥ 0.1.
pub fn check_step(geometry: &CollapseGeometry, propagator: &Propagator, hbar: f64) -> Result<()> {
    let dt = propagator.dt;
    let unitary = propagator.h_norm * dt / hbar;
    let collapse = geometry.max_rate() * dt;
    if unitary >= 0.1 || collapse >= 0.1 {
        return Err(Error::StepTooLarge(format!(
            "dt = {dt:e} s gives ||H|| dt/hbar = {unitary:.3} and max rate dt = {collapse:.3}; both must be below 0.1"
        )));
    }
    Ok(())
}

/// Apply the collapse factor for projected noise `b`.
pub fn collapse_factor(state: &mut QuantumState, geometry: &CollapseGeometry, b: &[f64], dt: f64) -> Result<()> {
    let gram = geometry.gram();
    let nc = geometry.n_configs();
    let p = state.probabilities();
    let g: Vec<f64> = (0..nc).map(|c| (0..nc).map(|d| gram[(c, d)] * p[d]).sum()).collect();
    let pgp: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
    let pb: f64 = p.iter().zip(b).map(|(a, b)| a * b).sum();
    let e: Vec<f64> = (0..nc).map(|c| -dt * (pgp - 2.0 * g[c] + gram[(c, c)] + 2.0 * (pb - b[c]))).collect();
    let e_max = e.iter().zip(&p).filter(|(_, &pc)| pc > 0.0).map(|(e, _)| *e).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for c in 0..nc {
        let f = (e[c] - e_max).exp();
        state.amplitudes[c] *= f;
        sum += p[c] * f * f;
    }
    let log_factor = 2.0 * e_max + sum.ln();
    state.steps += 1;
    if !(log_factor > NORM_FLOOR.ln()) {
        return Err(Error::NormUnderflow { norm: log_factor.exp(), step: state.steps as usize });
    }
    state.amplitudes /= Complex64::new(sum.sqrt(), 0.0);
    state.log_weight += log_factor;
    Ok(())
}

/// One Strang step driven by a sampled noise slice.
pub fn step_trajectory(
    state: &mut QuantumState,
    geometry: &CollapseGeometry,
    noise: &NoiseSlice,
    propagator: &Propagator,
) -> Result<()> {
    let b = geometry.project(noise);
    step_projected(state, geometry, &b, propagator)
}

/// One Strang step driven by b_c = B(w₀, A_c).
pub fn step_projected(
    state: &mut QuantumState,
    geometry: &CollapseGeometry,
    b: &[f64],
    propagator: &Propagator,
) -> Result<()> {
    propagator.apply_half(&mut state.amplitudes);
    collapse_factor(state, geometry, b, propagator.dt)?;
    propagator.apply_half(&mut state.amplitudes);
    Ok(())
}
