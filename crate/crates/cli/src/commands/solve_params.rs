use serde::{Deserialize, Serialize};

use cslgrav::solver::{evaluate_scenario, Scenario, ScenarioReport};
use cslgrav::Constants;

use super::{Context, Report};
use crate::error::CliError;
use crate::output::{ResultRow, Tolerance};

/// Quoted values the monopole scenario is compared with.
const QUOTED_A: f64 = 1.4e-5;
const QUOTED_LAMBDA: f64 = 2e-24;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub scenario: String,
}

impl Default for Params {
    fn default() -> Self {
        Params { scenario: Scenario::PlanckNucleonMonopole.name().into() }
    }
}

fn value(report: &ScenarioReport, name: &str) -> f64 {
    report.get(name).unwrap_or(f64::NAN)
}

pub fn run(ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    let p: Params = ctx.params(params)?;
    let scenario: Scenario = p.scenario.parse().map_err(|e: cslgrav::Error| ctx.config_error("params.scenario", e.to_string()))?;
    let k = Constants::cgs();
    let report = evaluate_scenario(scenario, &k)?;
    let mut out = Report::new(&p)?;
    let residual = |name: &str, label: &str| {
        ResultRow::new(name, value(&report, name), None, 0.0, label, Tolerance::Absolute(1e-10))
    };
    match scenario {
        Scenario::PlanckNucleonMonopole => {
            out.results.push(ResultRow::new(
                "a",
                value(&report, "a"),
                None,
                QUOTED_A,
                "a = (3/pi^2)^(1/4) (hbar/4Mc) sqrt(mu/M), quoted as 1.4e-5 cm",
                Tolerance::Relative(0.03),
            ));
            out.results.push(ResultRow::new(
                "lambda_nucleon",
                value(&report, "lambda_nucleon"),
                None,
                QUOTED_LAMBDA,
                "lambda = G m^2 / (2 sqrt(3 pi) a hbar), quoted as 2e-24 s^-1",
                Tolerance::Relative(0.05),
            ));
            out.results.push(ResultRow::new(
                "a_matches_closed_form",
                value(&report, "a"),
                None,
                value(&report, "a_closed_form"),
                "a = (3/pi^2)^(1/4) (hbar/4Mc) sqrt(mu/M), with tabulated planck units",
                Tolerance::Relative(1e-5),
            ));
            out.results.push(residual("residual_correlation", "relative residual of lambda = m^2 / (32 pi^(3/2) mu^2 a^3 Ptilde)"));
            out.results.push(residual("residual_heating", "relative residual of 3 hbar^2 lambda / (4 m a^2) = 2 sqrt(pi) m (G mu)^2 Ptilde / a"));
        }
        Scenario::PlanckDipole => {
            out.results.push(ResultRow::new(
                "p_tilde_p2",
                value(&report, "p_tilde_p2"),
                None,
                3.0 / (8.0 * std::f64::consts::PI) * k.hbar / k.g,
                "Ptilde p^2 = (3/8pi) hbar/G",
                Tolerance::Relative(1e-10),
            ));
            out.results.push(ResultRow::new(
                "lambda_ratio_to_monopole",
                value(&report, "lambda_ratio_to_monopole"),
                None,
                1.0 / 3f64.sqrt(),
                "dipole over monopole rate at equal a = 1/sqrt(3)",
                Tolerance::Relative(1e-10),
            ));
            out.results.push(residual("residual_correlation", "relative residual of lambda = m^2 / (16 pi^(3/2) a Ptilde p^2)"));
            out.results.push(residual("residual_heating", "relative residual of 3 hbar^2 lambda / (4 m a^2) = sqrt(pi) G^2 m Ptilde p^2 / (3 a^3)"));
        }
    }
    out.json(ctx, "solve-params.json", &report)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    out.stdout = Some(text);
    Ok(out)
}
