//! Brownian heating of a free smeared mass under sampled vacuum forces.
//!
//! Each interval adds F𝒯 to the momentum with F drawn fresh, so
//! ⟨E(t)⟩ = (3K²/2m)t exactly for the truncated force law.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::force::{tail_fraction, CutoffSampler};
use super::FluctuationSpec;
use crate::constants::PhysicalConstants;
use crate::error::{ensure_positive, Error, Result};
use crate::rng::{stream, Domain};
use crate::stats::{linear_fit, mean_stderr, pairwise_reduce, Estimate, LineFit};

#[derive(Debug, Clone, Serialize)]
pub struct BrownianSpec {
    pub n_runs: usize,
    pub n_intervals: usize,
    pub record_every: usize,
    /// Event cutoff radius, cm.
    pub cutoff: f64,
    pub seed: u64,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BrownianResult {
    pub times: Vec<f64>,
    /// ⟨E⟩ over runs at each record time, erg.
    pub energy: Vec<Estimate>,
    /// Mean over runs of E(t_end)/t_end, erg s⁻¹.
    pub slope: Estimate,
    /// Least-squares line through the mean curve.
    pub curve_fit: LineFit,
    /// 2√π m(Gμ)²P̃/a or (√π/3)G²mP̃p²/a³.
    pub target: f64,
    pub tail_fraction: f64,
    /// slope / (1 − tail_fraction).
    pub corrected: Estimate,
    /// γ or γ′ implied by the tail-corrected slope.
    pub implied_strength: f64,
}

/// Energy of one run at intervals 0, record_every, …, n_intervals.
pub fn brownian_energy_run<R: Rng + ?Sized>(
    sampler: &CutoffSampler,
    g: f64,
    m: f64,
    a: f64,
    interval_t: f64,
    n_intervals: usize,
    record_every: usize,
    rng: &mut R,
) -> Vec<f64> {
    let every = record_every.max(1);
    let mut p = [0.0f64; 3];
    let mut scratch = Vec::new();
    let mut out = vec![0.0];
    for n in 1..=n_intervals {
        let f = sampler.force(rng, &mut scratch, g, m, a);
        for i in 0..3 {
            p[i] += f[i] * interval_t;
        }
        if n % every == 0 || n == n_intervals {
            out.push((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2.0 * m));
        }
    }
    out
}

pub fn brownian_ensemble(
    spec: &FluctuationSpec,
    constants: &PhysicalConstants<f64>,
    m: f64,
    a: f64,
    run: &BrownianSpec,
) -> Result<BrownianResult> {
    ensure_positive("m", m)?;
    ensure_positive("a", a)?;
    if run.n_runs < 2 || run.n_intervals == 0 {
        return Err(Error::InvalidParameter { name: "brownian", reason: "need at least two runs and one interval".into() });
    }
    let sampler = CutoffSampler::new(spec, run.cutoff)?;
    let t = spec.interval_t;
    let every = run.record_every.max(1);
    let mut steps: Vec<usize> = (0..=run.n_intervals).step_by(every).collect();
    if *steps.last().expect("non-empty") != run.n_intervals {
        steps.push(run.n_intervals);
    }
    let times: Vec<f64> = steps.iter().map(|&s| s as f64 * t).collect();
    let runs: Vec<Vec<Vec<f64>>> = crate::pool::install(run.workers, || {
        (0..run.n_runs)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(run.seed, Domain::Brownian, i as u64);
                vec![brownian_energy_run(&sampler, constants.g, m, a, t, run.n_intervals, every, &mut rng)]
            })
            .collect()
    })?;
    let runs = pairwise_reduce(&runs, &|x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| [x.as_slice(), y].concat())
        .expect("at least one run");
    let energy: Vec<Estimate> =
        (0..times.len()).map(|r| mean_stderr(&runs.iter().map(|e| e[r]).collect::<Vec<_>>())).collect();
    let t_end = *times.last().expect("non-empty");
    let slope = mean_stderr(&runs.iter().map(|e| e[e.len() - 1] / t_end).collect::<Vec<_>>());
    let curve_fit = linear_fit(&times, &energy.iter().map(|e| e.mean).collect::<Vec<_>>());
    let tail = tail_fraction(spec.kind, a, run.cutoff);
    let corrected = slope.scale(1.0 / (1.0 - tail));
    let target = spec.heating_rate(constants, m, a);
    let coefficient = corrected.mean * spec.target_coefficient() / target;
    Ok(BrownianResult {
        times,
        energy,
        slope,
        curve_fit,
        target,
        tail_fraction: tail,
        corrected,
        implied_strength: spec.implied_strength(coefficient),
    })
}
