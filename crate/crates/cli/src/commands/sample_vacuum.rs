use serde::{Deserialize, Serialize};

use cslgrav::solver::planck_nucleon_monopole;
use cslgrav::vacuum::{empirical_correlation, empirical_spectrum, FluctuationKind, FluctuationSpec};
use cslgrav::Constants;

use super::{Context, Report};
use crate::config::{Length, Mass, Measured, Time};
use crate::error::CliError;
use crate::output::{ResultRow, Series, Tolerance};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub model: FluctuationKind,
    /// Event mass μ.
    pub mu: Measured<Mass>,
    /// Event probability per cell and interval.
    pub p: f64,
    /// Cell side ℒ.
    pub cell: Measured<Length>,
    /// Interval 𝒯.
    pub interval: Measured<Time>,
    /// Cells per box side.
    pub extent: usize,
    pub configs: usize,
    /// Also write the axis power spectrum.
    pub spectrum: bool,
}

impl Default for Params {
    fn default() -> Self {
        let k = Constants::cgs();
        let a = planck_nucleon_monopole(&k).map(|s| s.a).unwrap_or(1.4e-5);
        Params {
            model: FluctuationKind::Monopole,
            mu: Measured::new(k.planck_mass),
            p: 0.01,
            cell: Measured::new(a),
            interval: Measured::new(k.planck_time),
            extent: 64,
            configs: 32,
            spectrum: true,
        }
    }
}

pub fn run(ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    let p: Params = ctx.params(params)?;
    let spec = FluctuationSpec::new(p.model, p.mu.value, p.p, p.cell.value, p.interval.value)
        .and_then(|s| s.with_extent(p.extent))?;
    let est = empirical_correlation(&spec, p.configs, ctx.seed, ctx.workers)?;
    let w2 = (p.mu.value / p.cell.value.powi(3)).powi(2);
    let prob = p.p;
    let (same, adjacent) = match p.model {
        FluctuationKind::Monopole => (prob * (1.0 - prob), 0.0),
        FluctuationKind::Dipole => (2.0 * prob - 7.0 * prob * prob / 6.0, -prob * (1.0 - prob) / 3.0),
    };

    let unit = Some("g^2 cm^-6");
    let mut cov = Series::new(&[("offset", Some("cells")), ("covariance", unit), ("stderr", unit), ("expected", unit)]);
    for (offset, e, expected) in [(0usize, est.same_cell, same), (1, est.adjacent, adjacent), (3, est.distant, 0.0)] {
        cov.push(vec![offset.into(), e.mean.into(), e.stderr.into(), (expected * w2).into()]);
    }

    let mut out = Report::new(&p)?;
    out.series(ctx, "vacuum_covariance.csv", &cov)?;
    if p.spectrum {
        let mut s = Series::new(&[("k", Some("cm^-1")), ("S", unit), ("S_stderr", unit)]);
        for (k, e) in empirical_spectrum(&spec, p.configs, ctx.seed)? {
            s.push(vec![k.into(), (e.mean * w2).into(), (e.stderr * w2).into()]);
        }
        out.series(ctx, "vacuum_spectrum.csv", &s)?;
    }

    let sigma3 = Tolerance::Sigma(3.0);
    let coefficient_formula = match p.model {
        FluctuationKind::Monopole => "L^3 T <w0^2> = mu^2 Ptilde (1 - P)",
        FluctuationKind::Dipole => "L^5 T <w0^2> / 6 = Ptilde p^2 (1 - 7P/12) / 3",
    };
    out.results.push(ResultRow::new(
        "coefficient",
        est.coefficient.mean,
        Some(est.coefficient.stderr),
        est.exact,
        coefficient_formula,
        sigma3,
    ));
    match est.coefficient_adjacent {
        Some(adj) => out.results.push(ResultRow::new(
            "coefficient_adjacent",
            adj.mean,
            Some(adj.stderr),
            est.target * (1.0 - prob),
            "-L^5 T <w0(x) w0(x+L)> = Ptilde p^2 (1 - P) / 3",
            sigma3,
        )),
        None => out.results.push(ResultRow::new(
            "adjacent_covariance",
            est.adjacent.mean,
            Some(est.adjacent.stderr),
            0.0,
            "distinct cells are uncorrelated",
            sigma3,
        )),
    }
    out.results.push(ResultRow::new(
        "distant_covariance",
        est.distant.mean,
        Some(est.distant.stderr),
        0.0,
        "cells three apart are uncorrelated",
        sigma3,
    ));
    Ok(out)
}
