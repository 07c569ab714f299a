//! Energy production and step-size selection.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ensemble::EnsembleResult;
use super::geometry::CollapseGeometry;
use super::master::DensityMatrix;
use crate::collapse::KernelModel;
use crate::error::{ensure_positive, Error, Result};
use crate::stats::{linear_fit, quadratic_fit, LineFit, QuadraticFit};

/// ⟨E⟩(t) with a standard error per point (zero for deterministic series).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub enum EnergySource<'a> {
    Density(&'a [(f64, DensityMatrix)]),
    Ensemble(&'a EnsembleResult),
}

pub fn measure_energy_series(source: EnergySource<'_>, hamiltonian: &DMatrix<Complex64>) -> Result<EnergySeries> {
    let series = match source {
        EnergySource::Density(rhos) => EnergySeries {
            times: rhos.iter().map(|(t, _)| *t).collect(),
            mean: rhos.iter().map(|(_, r)| r.expectation(hamiltonian)).collect(),
            stderr: vec![0.0; rhos.len()],
        },
        EnergySource::Ensemble(ens) => EnergySeries {
            times: ens.times.clone(),
            mean: ens.energy.iter().map(|e| e.mean).collect(),
            stderr: ens.energy.iter().map(|e| e.stderr).collect(),
        },
    };
    if series.times.len() < 2 {
        return Err(Error::InvalidParameter { name: "series", reason: "need at least two time points".into() });
    }
    Ok(series)
}

impl EnergySeries {
    pub fn linear(&self) -> LineFit {
        linear_fit(&self.times, &self.mean)
    }

    /// Slope at t = 0 from a parabola through the series.
    pub fn initial_slope(&self) -> QuadraticFit {
        quadratic_fit(&self.times, &self.mean)
    }
}

/// d/dt Tr[Hρ] from the collapse term alone: −Tr[H (R∘ρ)].
pub fn energy_rate(rho: &DensityMatrix, geometry: &CollapseGeometry, hamiltonian: &DMatrix<Complex64>) -> f64 {
    let damped = rho.matrix.zip_map(geometry.rates(), |z, r| z * r);
    -(hamiltonian * damped).trace().re
}

/// Single-particle collapse rate on a `dimension`-dimensional lattice,
/// λ = γm²/(4πa²)^{d/2}. DGGR is only defined here in three dimensions.
pub fn single_particle_rate(model: &KernelModel<f64>, m: f64, a: f64, dimension: usize) -> Result<f64> {
    match (model, dimension) {
        (_, 3) => Ok(model.rate(m, a)),
        (KernelModel::Grwp { gamma }, d) => {
            Ok(gamma * m * m / (4.0 * std::f64::consts::PI * a * a).powf(d as f64 / 2.0))
        }
        (KernelModel::Dggr { .. }, d) => Err(Error::Unsupported(format!("DGGR rate in {d} dimensions"))),
    }
}

/// GRWP strength giving rate `lambda` on a `dimension`-dimensional lattice.
pub fn grwp_for_rate(lambda: f64, m: f64, a: f64, dimension: usize) -> Result<KernelModel<f64>> {
    ensure_positive("lambda", lambda)?;
    let gamma = lambda * (4.0 * std::f64::consts::PI * a * a).powf(dimension as f64 / 2.0) / (m * m);
    KernelModel::new(crate::collapse::KernelKind::Grwp, gamma)
}

/// Heating rate per axis in the continuum, ħ²λ/(4ma²).
pub fn continuum_energy_rate_per_axis(hbar: f64, lambda: f64, m: f64, a: f64) -> f64 {
    hbar * hbar * lambda / (4.0 * m * a * a)
}

/// 10⁻² / max(‖H‖/ħ, max rate).
pub fn default_dt(geometry: &CollapseGeometry, h_norm: f64, hbar: f64) -> Result<f64> {
    let scale = (h_norm / hbar).max(geometry.max_rate());
    if scale <= 0.0 {
        return Err(Error::InvalidParameter { name: "dt", reason: "no dynamics to set a time scale".into() });
    }
    Ok(1e-2 / scale)
}

/// Halve dt until the observable moves by less than `rel_tol` relative.
/// Returns the accepted dt and the observable at that dt.
pub fn refine_dt<F>(dt0: f64, mut observable: F, rel_tol: f64, max_halvings: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure_positive("dt", dt0)?;
    let mut dt = dt0;
    let mut prev = observable(dt)?;
    for _ in 0..max_halvings {
        let next = observable(dt / 2.0)?;
        let shift = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        dt /= 2.0;
        if shift < rel_tol {
            return Ok((dt * 2.0, prev));
        }
        prev = next;
    }
    Err(Error::StepTooLarge(format!("observable not converged after {max_halvings} halvings of dt = {dt0:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::KernelKind;
    use crate::dynamics::master::evolve_series;
    use crate::dynamics::trajectory::{Propagator, QuantumState};
    use crate::lattice::{HamiltonianSpec, LatticeSystem};

    #[test]
    fn collapse_off_gives_zero_slope() {
        let sys = LatticeSystem::builder(1, 16, 0.5)
            .particle(1.0)
            .smearing(1.0)
            .hamiltonian(HamiltonianSpec::FreeParticle { hbar: 1.0 })
            .build()
            .unwrap();
        let geo = CollapseGeometry::off(&sys).unwrap();
        let psi = QuantumState::new(nalgebra::DVector::from_fn(16, |s, _| {
            Complex64::new((-((s as f64 - 8.0).powi(2)) / 8.0).exp(), 0.0)
        }))
        .unwrap();
        let rho0 = DensityMatrix::from_state(&psi);
        assert_eq!(energy_rate(&rho0, &geo, sys.hamiltonian()), 0.0);
        let prop = Propagator::new(sys.hamiltonian(), 1.0, 0.01).unwrap();
        let series = evolve_series(&rho0, &geo, prop, 200, 20).unwrap();
        let e = measure_energy_series(EnergySource::Density(&series), sys.hamiltonian()).unwrap();
        assert!(e.linear().slope.abs() < 1e-9);
    }

    #[test]
    fn rate_helpers_round_trip() {
        let model = grwp_for_rate(0.3, 2.0, 1.5, 1).unwrap();
        assert!((single_particle_rate(&model, 2.0, 1.5, 1).unwrap() - 0.3).abs() < 1e-14);
        let model3 = grwp_for_rate(0.3, 2.0, 1.5, 3).unwrap();
        assert!((model3.rate(2.0, 1.5) - 0.3).abs() < 1e-14);
        let dggr = KernelModel::new(KernelKind::Dggr, 1.0).unwrap();
        assert!(single_particle_rate(&dggr, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn refine_stops_on_converged_observable() {
        // observable with O(dt) error
        let (dt, v) = refine_dt(0.4, |dt| Ok(1.0 + dt), 0.01, 20).unwrap();
        assert!(dt <= 0.02 && (v - 1.0).abs() < 0.03);
        assert!(refine_dt(1.0, |dt| Ok(1.0 / dt), 0.01, 5).is_err());
    }
}
