use serde::{Deserialize, Serialize};

use cslgrav::collapse::KernelKind;
use cslgrav::rng::{stream, Domain};
use cslgrav::semiclassical::{evaluate, sweep, Regime, SweepRanges};
use cslgrav::{Constants, Detectability, Probe};

use super::{Context, Report};
use crate::config::{Density, Length, Mass, Measured, Velocity};
use crate::error::CliError;
use crate::output::{ResultRow, Series, Tolerance};

/// A source sphere and probe. Give exactly one of `density` and `mass`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInput {
    pub name: String,
    pub model: KernelKind,
    pub radius: Measured<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Measured<Density>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Measured<Mass>>,
    pub v_probe: Measured<Velocity>,
    pub a: Measured<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<Measured<Length>>,
    /// Fixed probe distance; omitted to search over distances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<Measured<Length>>,
    /// Checked against the verdict when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_detectable: Option<bool>,
}

impl ScenarioInput {
    fn example(name: &str, model: KernelKind, radius: f64, expect: bool) -> Self {
        ScenarioInput {
            name: name.into(),
            model,
            radius: Measured::new(radius),
            density: Some(Measured::new(1.0)),
            mass: None,
            v_probe: Measured::new(1e-3),
            a: Measured::new(1e-5),
            a_prime: None,
            separation: None,
            expect_detectable: Some(expect),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub scenarios: Vec<ScenarioInput>,
    /// Number of random scenarios in the sweep; zero skips it.
    pub sweep: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            scenarios: vec![
                ScenarioInput::example("grwp-centimetre-sphere", KernelKind::Grwp, 1.0, true),
                ScenarioInput::example("grwp-metre-sphere", KernelKind::Grwp, 100.0, true),
                ScenarioInput::example("dggr-centimetre-sphere", KernelKind::Dggr, 1.0, false),
                ScenarioInput::example("grwp-compact-grain", KernelKind::Grwp, 1e-6, false),
            ],
            sweep: 10_000,
        }
    }
}

#[derive(Serialize)]
struct Evaluated<'a> {
    name: &'a str,
    scenario: Probe,
    report: Detectability,
}

fn build(ctx: &Context, i: usize, s: &ScenarioInput) -> Result<Probe, CliError> {
    let field = |f: &str| format!("params.scenarios[{i}].{f}");
    let wrap = |f: &str, e: cslgrav::Error| ctx.config_error(&field(f), e.to_string());
    let (r, v, a) = (s.radius.value, s.v_probe.value, s.a.value);
    let mut probe = match (s.density, s.mass) {
        (Some(d), None) => Probe::from_density_radius(d.value, r, v, a, s.model).map_err(|e| wrap("density", e))?,
        (None, Some(m)) => Probe::from_mass_radius(m.value, r, v, a, s.model).map_err(|e| wrap("mass", e))?,
        _ => return Err(ctx.config_error(&field("density"), "give exactly one of density and mass")),
    };
    if let Some(ap) = s.a_prime {
        probe = probe.with_a_prime(ap.value).map_err(|e| wrap("a_prime", e))?;
    }
    if let Some(z) = s.separation {
        probe = probe.with_separation(z.value).map_err(|e| wrap("separation", e))?;
    }
    Ok(probe)
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Compact => "compact",
        Regime::Extended => "extended",
    }
}

pub fn run(ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    let p: Params = ctx.params(params)?;
    let k = Constants::cgs();
    let mut out = Report::new(&p)?;

    let mut evaluated = Vec::with_capacity(p.scenarios.len());
    for (i, input) in p.scenarios.iter().enumerate() {
        let probe = build(ctx, i, input)?;
        let report = evaluate(&probe, &k).map_err(|e| ctx.config_error(&format!("params.scenarios[{i}]"), e.to_string()))?;
        if let Some(expect) = input.expect_detectable {
            out.results.push(ResultRow::new(
                &format!("{}_detectable", input.name),
                f64::from(u8::from(report.detectable)),
                None,
                f64::from(u8::from(expect)),
                "good measurement (M/mu)^2 > v/c and open window max(R, a') < Z < c (M/mu)^2 tau",
                Tolerance::Absolute(0.0),
            ));
        }
        evaluated.push(Evaluated { name: &input.name, scenario: probe, report });
    }
    if !evaluated.is_empty() {
        out.json(ctx, "semiclassical_report.json", &evaluated)?;
    }

    if p.sweep > 0 {
        let mut rng = stream(ctx.seed, Domain::Sweep, 0);
        let runs = sweep(&k, p.sweep, &SweepRanges::default(), &mut rng)?;
        let one = Some("1");
        let mut s = Series::new(&[
            ("model", None),
            ("regime", None),
            ("radius", Some("cm")),
            ("density", Some("g/cm^3")),
            ("mass", Some("g")),
            ("a", Some("cm")),
            ("a_prime", Some("cm")),
            ("v_probe", Some("cm/s")),
            ("good_measurement_margin", one),
            ("window_ratio", one),
            ("model_derived_window_ratio", one),
            ("detectable", None),
        ]);
        let (mut compact_bad, mut dggr_bad) = (0usize, 0usize);
        for (sc, r) in &runs {
            if sc.a_prime == sc.a && sc.regime() == Regime::Compact && r.detectable {
                compact_bad += 1;
            }
            if sc.model == KernelKind::Dggr && sc.regime() == Regime::Extended && r.detectable {
                dggr_bad += 1;
            }
            s.push(vec![
                sc.model.name().into(),
                regime_name(sc.regime()).into(),
                sc.radius.into(),
                sc.density.into(),
                sc.mass.into(),
                sc.a.into(),
                sc.a_prime.into(),
                sc.v_probe.into(),
                r.good_measurement.margin().into(),
                r.scaling.necessary_window.ratio().into(),
                r.model_derived.necessary_window.ratio().into(),
                r.detectable.into(),
            ]);
        }
        out.series(ctx, "semiclassical_sweep.csv", &s)?;
        out.results.push(ResultRow::new(
            "sweep_compact_equal_smearing_detectable",
            compact_bad as f64,
            None,
            0.0,
            "R < a with a' = a: window a < Z < a is empty",
            Tolerance::Absolute(0.0),
        ));
        out.results.push(ResultRow::new(
            "sweep_extended_dggr_detectable",
            dggr_bad as f64,
            None,
            0.0,
            "DGGR with R > a: window R < Z < R is empty",
            Tolerance::Absolute(0.0),
        ));
    }
    Ok(out)
}
