//! Collapse of a superposition over a few sites of a 3D lattice, in units
//! with m = a = ħ = 1 and single-particle rate λ = 1.

use serde::{Deserialize, Serialize};

use cslgrav::collapse::{KernelKind, KernelModel};
use cslgrav::dynamics::energy::energy_rate;
use cslgrav::dynamics::{
    evolve_series, run_ensemble, trace_distance, CollapseGeometry, DensityMatrix, EnsembleSpec, Propagator,
    QuantumState,
};
use cslgrav::kernels::off_diagonal_rate;
use cslgrav::lattice::{hopping_chain, HamiltonianSpec, LatticeSystem};
use cslgrav::stats::quadratic_fit;

use super::{Context, Report};
use crate::error::CliError;
use crate::output::{ResultRow, Series, Tolerance};

const MAX_SITES: usize = 8;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub kernel: KernelKind,
    /// Initial Born weights, one per site.
    pub probabilities: Vec<f64>,
    /// Site spacing along x, in units of a.
    pub separation: f64,
    /// Nearest-neighbour hopping between sites, in units of ħλ.
    pub hopping: f64,
    pub trajectories: usize,
    pub steps: usize,
    pub record_every: usize,
    /// Time step in units of 1/λ; defaults to 1% of the fastest decoherence time.
    pub dt: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            kernel: KernelKind::Grwp,
            probabilities: vec![0.3, 0.7],
            separation: 2.0,
            hopping: 0.0,
            trajectories: 10_000,
            steps: 2000,
            record_every: 100,
            dt: None,
        }
    }
}

/// Grid used for each kernel: a periodic box of 16a.
fn grid(kind: KernelKind) -> (usize, f64) {
    match kind {
        KernelKind::Grwp => (32, 0.5),
        KernelKind::Dggr => (64, 0.25),
    }
}

pub fn run(ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    let mut p: Params = ctx.params(params)?;
    let n_sites = p.probabilities.len();
    if !(2..=MAX_SITES).contains(&n_sites) {
        return Err(ctx.config_error("params.probabilities", format!("need between 2 and {MAX_SITES} sites")));
    }
    let psi = QuantumState::from_probabilities(&p.probabilities)
        .map_err(|e| ctx.config_error("params.probabilities", e.to_string()))?;
    let (n, dx) = grid(p.kernel);
    let step_cells = p.separation / dx;
    if !(step_cells >= 1.0 && (step_cells - step_cells.round()).abs() < 1e-9) {
        return Err(ctx.config_error("params.separation", format!("must be a positive multiple of the grid step {dx}")));
    }
    let step_cells = step_cells.round() as usize;
    if (n_sites - 1) * step_cells >= n / 2 {
        return Err(ctx.config_error("params.separation", "sites must span less than half the 16a box"));
    }

    let builder = LatticeSystem::builder(3, n, dx).particle(1.0).smearing(1.0);
    let probe = builder.clone().allowed_sites(vec![0]).build()?;
    let indices: Vec<usize> = (0..n_sites).map(|i| probe.site_index([i * step_cells, 0, 0])).collect();
    let positions: Vec<[f64; 3]> = indices.iter().map(|&s| probe.site_position(s)).collect();
    let h = if p.hopping == 0.0 {
        HamiltonianSpec::Zero
    } else {
        HamiltonianSpec::Custom(hopping_chain(n_sites, p.hopping))
    };
    let system = builder.allowed_sites(indices).hamiltonian(h).build()?;
    let model = KernelModel::from_rate(p.kernel, 1.0, 1.0, 1.0)?;
    let geometry = CollapseGeometry::new(&system, Some(&model))?;
    let dt = *p.dt.get_or_insert(0.01 / geometry.max_rate());

    let spec = EnsembleSpec {
        n_trajectories: p.trajectories,
        steps: p.steps,
        record_every: p.record_every,
        dt,
        hbar: 1.0,
        seed: ctx.seed,
        workers: ctx.workers,
        track_density: true,
    };
    let ens = run_ensemble(&system, &geometry, &psi, &spec)?;
    let rho0 = DensityMatrix::from_state(&psi);
    let prop = Propagator::new(system.hamiltonian(), 1.0, dt)?;
    let master = evolve_series(&rho0, &geometry, prop, p.steps, p.record_every)?;

    let mut out = Report::new(&p)?;
    let (t_unit, e_unit, one) = (Some("1/lambda"), Some("hbar lambda"), Some("1"));
    let mut energy = Series::new(&[("t", t_unit), ("E_mean", e_unit), ("E_stderr", e_unit), ("E_master", e_unit)]);
    let mut coherence = Series::new(&[
        ("t", t_unit),
        ("rho01_ensemble", one),
        ("rho01_master", one),
        ("trace_distance", one),
    ]);
    let mut worst_td: f64 = 0.0;
    for (i, (t, m)) in master.iter().enumerate() {
        let td = trace_distance(&ens.rho_weighted[i], &m.matrix);
        worst_td = worst_td.max(td);
        let e = ens.energy[i];
        energy.push(vec![(*t).into(), e.mean.into(), e.stderr.into(), m.expectation(system.hamiltonian()).into()]);
        coherence.push(vec![
            (*t).into(),
            ens.rho_weighted[i][(0, 1)].norm().into(),
            m.matrix[(0, 1)].norm().into(),
            td.into(),
        ]);
    }
    out.series(ctx, "csl_energy.csv", &energy)?;
    out.series(ctx, "csl_coherence.csv", &coherence)?;

    let freq = ens.outcome_frequencies(n_sites);
    let n_traj = ens.outcomes.len() as f64;
    let mut outcomes = Series::new(&[("site", None), ("x", Some("a")), ("born", one), ("frequency", one), ("stderr", one)]);
    for (c, (&born, &f)) in p.probabilities.iter().zip(&freq).enumerate() {
        let born = born / p.probabilities.iter().sum::<f64>();
        let se = (born * (1.0 - born) / n_traj).sqrt();
        outcomes.push(vec![c.into(), positions[c][0].into(), born.into(), f.into(), se.into()]);
        // outcomes follow the initial weights only without hopping
        if p.hopping == 0.0 {
            out.results.push(ResultRow::new(
                &format!("outcome_frequency_{c}"),
                f,
                Some(se),
                born,
                "Born weight |psi_c|^2 of the initial state",
                Tolerance::Sigma(3.0),
            ));
        }
    }
    out.series(ctx, "csl_outcomes.csv", &outcomes)?;

    out.results.push(ResultRow::new(
        "max_trace_distance",
        worst_td,
        None,
        0.0,
        "ensemble average of weighted trajectories equals the master-equation density matrix",
        Tolerance::Absolute(0.05),
    ));
    let (t_end, rho_end) = master.last().expect("at least the initial record");
    if p.hopping == 0.0 && *t_end > 0.0 {
        let measured = -(rho_end.matrix[(0, 1)].norm() / rho0.matrix[(0, 1)].norm()).ln() / t_end;
        let exact = off_diagonal_rate(&model, 1.0, &[1.0], &[positions[0]], &[positions[1]])?;
        out.results.push(ResultRow::new(
            "coherence_decay_rate_01",
            measured,
            None,
            exact,
            "Gamma = (1/2) int G^-1 [A(x) - A'(x)]^2 over the smeared mass difference",
            Tolerance::Relative(0.02),
        ));
    }
    if p.hopping != 0.0 && master.len() >= 3 {
        // the fit is linear in the data, so fitting the master curve gives
        // the expectation of the per-trajectory estimator
        let t: Vec<f64> = master.iter().map(|(t, _)| *t).collect();
        let e: Vec<f64> = master.iter().map(|(_, m)| m.expectation(system.hamiltonian())).collect();
        out.results.push(ResultRow::new(
            "energy_initial_slope",
            ens.energy_initial_slope.mean,
            Some(ens.energy_initial_slope.stderr),
            quadratic_fit(&t, &e).c1,
            "linear coefficient of a quadratic fit to the master-equation energy",
            Tolerance::Sigma(3.0),
        ));
        out.results.push(ResultRow::new(
            "energy_rate_at_start",
            energy_rate(&rho0, &geometry, system.hamiltonian()),
            None,
            quadratic_fit(&t, &e).c1,
            "dE/dt at t = 0 from the double commutator; agrees with the fit only for short record windows",
            Tolerance::Relative(0.05),
        ));
    }
    Ok(out)
}
