//! Empirical correlations of w₀ on the periodic event lattice.

use rayon::prelude::*;
use serde::Serialize;

use super::{sample_config, w0_field, EventConfig, FluctuationKind, FluctuationSpec};
use crate::error::{Error, Result};
use crate::rng::{stream, Domain};
use crate::stats::{mean_stderr, Estimate};

/// Fewer cell-interval samples than this are rejected.
pub const MIN_SAMPLES: usize = 1000;

/// Cell-pair covariances of w₀ and the coefficient they imply.
///
/// Each configuration contributes one batch mean, so the standard errors are
/// batch-means errors over configurations.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationEstimate {
    pub kind: FluctuationKind,
    /// ⟨w₀(x)²⟩, g² cm⁻⁶.
    pub same_cell: Estimate,
    /// ⟨w₀(x)w₀(x+ℒe)⟩ averaged over face neighbours.
    pub adjacent: Estimate,
    /// ⟨w₀(x)w₀(x+3ℒe)⟩, zero in both models.
    pub distant: Estimate,
    /// Space-time integrated coefficient from the same-cell covariance:
    /// ℒ³𝒯⟨w₀²⟩ (monopole) or ℒ⁵𝒯⟨w₀²⟩/6 (dipole).
    pub coefficient: Estimate,
    /// Dipole only: −ℒ⁵𝒯 × adjacent covariance.
    pub coefficient_adjacent: Option<Estimate>,
    /// Expectation of `coefficient` at this 𝒫: μ²P̃(1 − 𝒫) or P̃p²(1 − 7𝒫/12)/3.
    pub exact: f64,
    /// Small-𝒫 value μ²P̃ or P̃p²/3.
    pub target: f64,
    /// γ or γ′ implied by `coefficient`.
    pub implied_strength: f64,
    pub samples: usize,
}

struct ConfigMoments {
    same: f64,
    adjacent: f64,
    distant: f64,
}

fn moments(config: &EventConfig, w: &[f64]) -> ConfigMoments {
    let n = config.extent;
    let cells = w.len() as f64;
    let (mut same, mut adj, mut far) = (0.0, 0.0, 0.0);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let idx = x + n * (y + n * z);
                let v = w[idx];
                let c = [x as i64, y as i64, z as i64];
                same += v * v;
                adj += v
                    * (w[config.cell_index([c[0] + 1, c[1], c[2]])]
                        + w[config.cell_index([c[0], c[1] + 1, c[2]])]
                        + w[config.cell_index([c[0], c[1], c[2] + 1])]);
                far += v * w[config.cell_index([c[0] + 3, c[1], c[2]])];
            }
        }
    }
    ConfigMoments { same: same / cells, adjacent: adj / (3.0 * cells), distant: far / cells }
}

/// Sample `n_configs` lattices from stream (seed, i) and estimate the
/// covariances of w₀. Values are computed in units of (μ/ℒ³)².
pub fn empirical_correlation(
    spec: &FluctuationSpec,
    n_configs: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<CorrelationEstimate> {
    spec.validate()?;
    if n_configs < 2 || n_configs * spec.extent.pow(3) < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_configs",
            reason: format!("need at least two configurations and {MIN_SAMPLES} cell samples"),
        });
    }
    let unit = FluctuationSpec { mu: 1.0, cell_l: 1.0, ..*spec };
    let per_config: Vec<ConfigMoments> = crate::pool::install(workers, || {
        (0..n_configs)
            .into_par_iter()
            .map(|i| {
                let cfg = sample_config(&unit, &mut stream(seed, Domain::VacuumConfig, i as u64));
                moments(&cfg, &w0_field(&cfg, &unit))
            })
            .collect()
    })?;
    let density2 = (spec.mu / spec.cell_l.powi(3)).powi(2);
    let collect = |f: fn(&ConfigMoments) -> f64| mean_stderr(&per_config.iter().map(f).collect::<Vec<_>>()).scale(density2);
    let same_cell = collect(|m| m.same);
    let adjacent = collect(|m| m.adjacent);
    let distant = collect(|m| m.distant);

    // field realizations always place the partner one cell away
    let lattice = FluctuationSpec { arm: spec.cell_l, ..*spec };
    let (l, t, p) = (spec.cell_l, spec.interval_t, spec.p);
    let (coefficient, coefficient_adjacent, exact) = match spec.kind {
        FluctuationKind::Monopole => (same_cell.scale(l.powi(3) * t), None, lattice.target_coefficient() * (1.0 - p)),
        FluctuationKind::Dipole => (
            same_cell.scale(l.powi(5) * t / 6.0),
            Some(adjacent.scale(-l.powi(5) * t)),
            lattice.target_coefficient() * (1.0 - 7.0 * p / 12.0),
        ),
    };
    Ok(CorrelationEstimate {
        kind: spec.kind,
        same_cell,
        adjacent,
        distant,
        implied_strength: spec.implied_strength(coefficient.mean),
        coefficient,
        coefficient_adjacent,
        exact,
        target: lattice.target_coefficient(),
        samples: n_configs * spec.extent.pow(3),
    })
}

/// Power spectrum S(k) = |ŵ(k,0,0)|²/N³ along one lattice axis, in units of
/// (μ/ℒ³)², for k = 2πj/(Nℒ), j = 0..=N/2.
pub fn empirical_spectrum(spec: &FluctuationSpec, n_configs: usize, seed: u64) -> Result<Vec<(f64, Estimate)>> {
    spec.validate()?;
    let n = spec.extent;
    let unit = FluctuationSpec { mu: 1.0, cell_l: 1.0, ..*spec };
    let per_config: Vec<Vec<f64>> = (0..n_configs)
        .into_par_iter()
        .map(|i| {
            let cfg = sample_config(&unit, &mut stream(seed, Domain::VacuumConfig, i as u64));
            let w = w0_field(&cfg, &unit);
            let mut line = vec![0.0; n];
            for (idx, v) in w.iter().enumerate() {
                line[idx % n] += v;
            }
            (0..=n / 2)
                .map(|j| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (x, v) in line.iter().enumerate() {
                        let phase = 2.0 * std::f64::consts::PI * (j * x) as f64 / n as f64;
                        re += v * phase.cos();
                        im -= v * phase.sin();
                    }
                    (re * re + im * im) / (n * n * n) as f64
                })
                .collect()
        })
        .collect();
    Ok((0..=n / 2)
        .map(|j| {
            let k = 2.0 * std::f64::consts::PI * j as f64 / (n as f64 * spec.cell_l);
            (k, mean_stderr(&per_config.iter().map(|s| s[j]).collect::<Vec<_>>()))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monopole_covariances() {
        let spec = FluctuationSpec::new(FluctuationKind::Monopole, 3.0, 0.05, 0.5, 2.0).unwrap().with_extent(24).unwrap();
        let est = empirical_correlation(&spec, 40, 3, None).unwrap();
        assert!(est.coefficient.within_sigma(est.exact, 4.0), "{:?} vs {}", est.coefficient, est.exact);
        assert!(est.adjacent.within_sigma(0.0, 4.0));
        assert!(est.distant.within_sigma(0.0, 4.0));
        assert!((est.implied_strength * 4.0 * est.coefficient.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dipole_covariances() {
        let p = 0.05;
        let spec = FluctuationSpec::new(FluctuationKind::Dipole, 1.0, p, 1.0, 1.0).unwrap().with_extent(24).unwrap();
        let est = empirical_correlation(&spec, 40, 5, None).unwrap();
        assert!(est.same_cell.within_sigma(2.0 * p - 7.0 * p * p / 6.0, 4.0));
        assert!(est.adjacent.within_sigma(-p * (1.0 - p) / 3.0, 4.0), "{:?}", est.adjacent);
        assert!(est.distant.within_sigma(0.0, 4.0));
        assert!(est.coefficient.within_sigma(est.exact, 4.0));
        let adj = est.coefficient_adjacent.unwrap();
        assert!(adj.within_sigma(est.target * (1.0 - p), 4.0));
    }

    /// Exact S(k,0,0) of the dipole lattice, including the 𝒫² terms from
    /// cells that share a seeding neighbour.
    fn dipole_axis_spectrum(p: f64, k: f64) -> f64 {
        let c1 = -p * (1.0 - p) / 3.0;
        let c2 = -p * p / 36.0;
        (2.0 * p - 7.0 * p * p / 6.0) + c1 * (2.0 * k.cos() + 4.0) + c2 * (2.0 * (2.0 * k).cos() + 4.0)
            + 2.0 * c2 * (8.0 * k.cos() + 4.0)
    }

    #[test]
    fn dipole_spectrum_vanishes_as_k_squared() {
        let p = 0.1;
        let spec = FluctuationSpec::new(FluctuationKind::Dipole, 1.0, p, 1.0, 1.0).unwrap().with_extent(32).unwrap();
        let s = empirical_spectrum(&spec, 400, 9).unwrap();
        assert!(s[0].1.mean.abs() < 1e-20);
        assert!(dipole_axis_spectrum(p, 0.0).abs() < 1e-15);
        for (k, est) in &s[1..] {
            assert!(est.within_sigma(dipole_axis_spectrum(p, *k), 4.0), "k = {k}: {est:?}");
        }
        // small-k limit is (𝒫/3)k²
        let k = 1e-3;
        assert!((dipole_axis_spectrum(p, k) / (p / 3.0 * k * k) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn monopole_spectrum_is_flat() {
        let p = 0.2;
        let spec = FluctuationSpec::new(FluctuationKind::Monopole, 1.0, p, 1.0, 1.0).unwrap().with_extent(16).unwrap();
        for (_, est) in empirical_spectrum(&spec, 300, 1).unwrap() {
            assert!(est.within_sigma(p * (1.0 - p), 4.0), "{est:?}");
        }
    }
}
