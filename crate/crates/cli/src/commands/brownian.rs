use serde::{Deserialize, Serialize};

use cslgrav::solver::{planck_nucleon_monopole, solve_dipole};
use cslgrav::vacuum::{brownian_ensemble, BrownianSpec, FluctuationKind, FluctuationSpec};
use cslgrav::Constants;

use super::{Context, Report};
use crate::config::{Length, Mass, Measured};
use crate::error::CliError;
use crate::output::{ResultRow, Series, Tolerance};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub model: FluctuationKind,
    /// Event probability per cell and interval; 1e-4 (monopole) or 1e-3 (dipole).
    pub p: Option<f64>,
    /// Test mass.
    pub mass: Measured<Mass>,
    /// Smearing length. Fixed by the matching conditions for the monopole.
    pub a: Option<Measured<Length>>,
    /// Event cutoff radius over a; 100 (monopole) or 10 (dipole).
    pub cutoff_over_a: Option<f64>,
    pub runs: usize,
    pub intervals: usize,
    pub record_every: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            model: FluctuationKind::Monopole,
            p: None,
            mass: Measured::new(Constants::cgs().nucleon_mass),
            a: None,
            cutoff_over_a: None,
            runs: 1000,
            intervals: 1000,
            record_every: 10,
        }
    }
}

/// Coarse cells with 𝒯 chosen so that P̃ (or P̃p²) takes its matched value.
fn fluctuation_spec(kind: FluctuationKind, p: f64, a: f64, k: &Constants) -> cslgrav::Result<FluctuationSpec> {
    let mu = k.planck_mass;
    match kind {
        FluctuationKind::Monopole => {
            let sol = planck_nucleon_monopole(k)?;
            FluctuationSpec::new(kind, mu, p, a, sol.p_tilde * a.powi(3) / p)
        }
        FluctuationKind::Dipole => {
            let cell = a / 2.0;
            let d = solve_dipole(k, a)?;
            FluctuationSpec::new(kind, mu, p, cell, d.p_tilde_p2 / (mu * cell).powi(2) * cell.powi(3) / p)
        }
    }
}

pub fn run(ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    let mut p: Params = ctx.params(params)?;
    let k = Constants::cgs();
    let matched_a = planck_nucleon_monopole(&k)?.a;
    let a = match (p.model, p.a) {
        (FluctuationKind::Monopole, Some(_)) => {
            return Err(ctx.config_error("params.a", "a is fixed by the monopole matching conditions"));
        }
        (_, Some(a)) => a.value,
        (_, None) => matched_a,
    };
    let (default_p, default_cutoff) = match p.model {
        FluctuationKind::Monopole => (1e-4, 100.0),
        FluctuationKind::Dipole => (1e-3, 10.0),
    };
    let prob = *p.p.get_or_insert(default_p);
    let cutoff_over_a = *p.cutoff_over_a.get_or_insert(default_cutoff);
    if p.model == FluctuationKind::Dipole {
        p.a = Some(Measured::new(a));
    }
    let spec = fluctuation_spec(p.model, prob, a, &k)?;
    let run = BrownianSpec {
        n_runs: p.runs,
        n_intervals: p.intervals,
        record_every: p.record_every,
        cutoff: cutoff_over_a * a,
        seed: ctx.seed,
        workers: ctx.workers,
    };
    let res = brownian_ensemble(&spec, &k, p.mass.value, a, &run)?;

    let mut series = Series::new(&[("t", Some("s")), ("E_mean", Some("erg")), ("E_stderr", Some("erg"))]);
    for (t, e) in res.times.iter().zip(&res.energy) {
        series.push(vec![(*t).into(), e.mean.into(), e.stderr.into()]);
    }
    let mut out = Report::new(&p)?;
    out.series(ctx, "brownian_energy.csv", &series)?;

    let formula = match p.model {
        FluctuationKind::Monopole => "dE/dt = 2 sqrt(pi) m (G mu)^2 Ptilde / a",
        FluctuationKind::Dipole => "dE/dt = sqrt(pi) G^2 m Ptilde p^2 / (3 a^3)",
    };
    let tol = Tolerance::RelativeOrSigma(0.1);
    out.results.push(ResultRow::new("slope", res.slope.mean, Some(res.slope.stderr), res.target, formula, tol));
    out.results.push(ResultRow::new(
        "slope_tail_corrected",
        res.corrected.mean,
        Some(res.corrected.stderr),
        res.target,
        formula,
        tol,
    ));
    Ok(out)
}
