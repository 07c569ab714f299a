//! Trajectory ensembles.
//!
//! Trajectory i draws from its own stream (seed, i). Trajectories are grouped
//! into fixed chunks and chunk results are combined by a fixed pairwise tree,
//! so every sum is bitwise independent of the number of workers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::geometry::CollapseGeometry;
use super::trajectory::{check_step, step_projected, Propagator, QuantumState};
use crate::error::{ensure_positive, Error, Result};
use crate::lattice::LatticeSystem;
use crate::rng::{stream, Domain};
use crate::stats::{linear_fit, mean_stderr, pairwise_reduce, quadratic_fit, Estimate};

const CHUNK: usize = 32;

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub n_trajectories: usize,
    pub steps: usize,
    pub record_every: usize,
    pub dt: f64,
    pub hbar: f64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Accumulate density matrices at each record time.
    pub track_density: bool,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Σ W ψψ† / Σ W at each record time (empty unless tracked).
    pub rho_weighted: Vec<DMatrix<Complex64>>,
    /// Plain average of ψψ† (empty unless tracked).
    pub rho_unweighted: Vec<DMatrix<Complex64>>,
    /// ⟨ψ|H|ψ⟩ over trajectories at each record time.
    pub energy: Vec<Estimate>,
    /// Mean and stderr of the per-trajectory least-squares energy slopes.
    pub energy_slope: Estimate,
    /// Mean and stderr of the per-trajectory slopes at t = 0 from a parabola
    /// fit (NaN with fewer than three record times).
    pub energy_initial_slope: Estimate,
    /// Most probable configuration of each trajectory at the end.
    pub outcomes: Vec<usize>,
    pub final_log_weights: Vec<f64>,
    /// Trajectories stopped by norm underflow.
    pub aborted: usize,
}

impl EnsembleResult {
    /// Kish effective sample size of the final weights.
    pub fn effective_sample_size(&self) -> f64 {
        let w: Vec<f64> = self.final_log_weights.iter().map(|l| l.exp()).collect();
        let s: f64 = w.iter().sum();
        let s2: f64 = w.iter().map(|x| x * x).sum();
        s * s / s2
    }

    pub fn outcome_frequencies(&self, n_configs: usize) -> Vec<f64> {
        let mut f = vec![0.0; n_configs];
        for &o in &self.outcomes {
            f[o] += 1.0;
        }
        let n = self.outcomes.len() as f64;
        f.iter_mut().for_each(|x| *x /= n);
        f
    }
}

#[derive(Clone)]
struct Chunk {
    rho_w: Vec<DMatrix<Complex64>>,
    rho_u: Vec<DMatrix<Complex64>>,
    w_sum: Vec<f64>,
    energies: Vec<Vec<f64>>,
    slopes: Vec<f64>,
    initial_slopes: Vec<f64>,
    outcomes: Vec<usize>,
    log_weights: Vec<f64>,
    aborted: usize,
}

impl Chunk {
    fn empty(records: usize, nc: usize, track: bool) -> Self {
        let mats = if track { vec![DMatrix::zeros(nc, nc); records] } else { Vec::new() };
        Chunk {
            rho_w: mats.clone(),
            rho_u: mats,
            w_sum: vec![0.0; records],
            energies: vec![Vec::new(); records],
            slopes: Vec::new(),
            initial_slopes: Vec::new(),
            outcomes: Vec::new(),
            log_weights: Vec::new(),
            aborted: 0,
        }
    }

    fn merge(&self, other: &Chunk) -> Chunk {
        let add = |a: &[DMatrix<Complex64>], b: &[DMatrix<Complex64>]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        let cat = |a: &[f64], b: &[f64]| a.iter().chain(b).copied().collect::<Vec<f64>>();
        Chunk {
            rho_w: add(&self.rho_w, &other.rho_w),
            rho_u: add(&self.rho_u, &other.rho_u),
            w_sum: self.w_sum.iter().zip(&other.w_sum).map(|(a, b)| a + b).collect(),
            energies: self.energies.iter().zip(&other.energies).map(|(a, b)| cat(a, b)).collect(),
            slopes: cat(&self.slopes, &other.slopes),
            initial_slopes: cat(&self.initial_slopes, &other.initial_slopes),
            outcomes: self.outcomes.iter().chain(&other.outcomes).copied().collect(),
            log_weights: cat(&self.log_weights, &other.log_weights),
            aborted: self.aborted + other.aborted,
        }
    }
}

fn record_times(spec: &EnsembleSpec) -> Vec<usize> {
    let every = spec.record_every.max(1);
    let mut steps: Vec<usize> = (0..=spec.steps).step_by(every).collect();
    if *steps.last().expect("non-empty") != spec.steps {
        steps.push(spec.steps);
    }
    steps
}

fn run_chunk(
    indices: std::ops::Range<usize>,
    geometry: &CollapseGeometry,
    h: &DMatrix<Complex64>,
    propagator: &Propagator,
    psi0: &QuantumState,
    spec: &EnsembleSpec,
    records: &[usize],
) -> Chunk {
    let nc = geometry.n_configs();
    let mut acc = Chunk::empty(records.len(), nc, spec.track_density);
    let times: Vec<f64> = records.iter().map(|&s| s as f64 * spec.dt).collect();
    let mut b = Vec::with_capacity(nc);
    'traj: for i in indices {
        let mut rng = stream(spec.seed, Domain::Trajectory, i as u64);
        let mut state = psi0.clone();
        let mut rec = Vec::with_capacity(records.len());
        let mut next = 0;
        for step in 0..=spec.steps {
            if step > 0 {
                geometry.sample_projected(spec.dt, &mut rng, &mut b);
                if step_projected(&mut state, geometry, &b, propagator).is_err() {
                    acc.aborted += 1;
                    continue 'traj;
                }
            }
            if next < records.len() && records[next] == step {
                rec.push((state.projector(), state.norm_weight(), state.expectation(h)));
                next += 1;
            }
        }
        let e_traj: Vec<f64> = rec.iter().map(|r| r.2).collect();
        for (r, (proj, w, e)) in rec.into_iter().enumerate() {
            if spec.track_density {
                acc.rho_w[r] += &proj * Complex64::new(w, 0.0);
                acc.rho_u[r] += proj;
            }
            acc.w_sum[r] += w;
            acc.energies[r].push(e);
        }
        if times.len() >= 2 {
            acc.slopes.push(linear_fit(&times, &e_traj).slope);
        }
        if times.len() >= 3 {
            acc.initial_slopes.push(quadratic_fit(&times, &e_traj).c1);
        }
        acc.outcomes.push(state.outcome());
        acc.log_weights.push(state.log_weight);
    }
    acc
}

pub fn run_ensemble(
    system: &LatticeSystem,
    geometry: &CollapseGeometry,
    psi0: &QuantumState,
    spec: &EnsembleSpec,
) -> Result<EnsembleResult> {
    ensure_positive("dt", spec.dt)?;
    if spec.n_trajectories == 0 {
        return Err(Error::InvalidParameter { name: "n_trajectories", reason: "must be positive".into() });
    }
    if psi0.amplitudes.len() != geometry.n_configs() {
        return Err(Error::Shape(format!("state has {} amplitudes, basis {}", psi0.amplitudes.len(), geometry.n_configs())));
    }
    let h = system.hamiltonian();
    let propagator = Propagator::new(h, spec.hbar, spec.dt)?;
    check_step(geometry, &propagator, spec.hbar)?;
    let records = record_times(spec);
    let ranges: Vec<std::ops::Range<usize>> =
        (0..spec.n_trajectories).step_by(CHUNK).map(|s| s..(s + CHUNK).min(spec.n_trajectories)).collect();
    let work = || -> Vec<Chunk> {
        ranges
            .par_iter()
            .map(|r| run_chunk(r.clone(), geometry, h, &propagator, psi0, spec, &records))
            .collect()
    };
    let chunks = crate::pool::install(spec.workers, work)?;
    let total = pairwise_reduce(&chunks, &|a: &Chunk, b: &Chunk| a.merge(b)).expect("at least one chunk");
    if total.outcomes.is_empty() {
        return Err(Error::NormUnderflow { norm: 0.0, step: 0 });
    }
    let n_ok = total.outcomes.len() as f64;
    let rho_weighted = total
        .rho_w
        .iter()
        .zip(&total.w_sum)
        .map(|(m, w)| m / Complex64::new(*w, 0.0))
        .collect();
    let rho_unweighted = total.rho_u.iter().map(|m| m / Complex64::new(n_ok, 0.0)).collect();
    Ok(EnsembleResult {
        times: records.iter().map(|&s| s as f64 * spec.dt).collect(),
        rho_weighted,
        rho_unweighted,
        energy: total.energies.iter().map(|e| mean_stderr(e)).collect(),
        energy_slope: mean_stderr(&total.slopes),
        energy_initial_slope: mean_stderr(&total.initial_slopes),
        outcomes: total.outcomes,
        final_log_weights: total.log_weights,
        aborted: total.aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::{KernelKind, KernelModel};
    use crate::dynamics::master::{evolve_series, trace_distance, DensityMatrix};
    use crate::lattice::{hopping_chain, HamiltonianSpec};

    fn setup() -> (LatticeSystem, CollapseGeometry) {
        let sys = LatticeSystem::builder(1, 16, 0.5)
            .particle(1.0)
            .smearing(1.0)
            .allowed_sites(vec![2, 8])
            .hamiltonian(HamiltonianSpec::Custom(hopping_chain(2, 0.02)))
            .build()
            .unwrap();
        let model = KernelModel::new(KernelKind::Grwp, 4.0).unwrap();
        let geo = CollapseGeometry::new(&sys, Some(&model)).unwrap();
        (sys, geo)
    }

    fn spec(workers: Option<usize>) -> EnsembleSpec {
        EnsembleSpec {
            n_trajectories: 100,
            steps: 40,
            record_every: 10,
            dt: 0.05,
            hbar: 1.0,
            seed: 17,
            workers,
            track_density: true,
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (sys, geo) = setup();
        let psi = QuantumState::from_probabilities(&[0.5, 0.5]).unwrap();
        let a = run_ensemble(&sys, &geo, &psi, &spec(Some(1))).unwrap();
        let b = run_ensemble(&sys, &geo, &psi, &spec(Some(3))).unwrap();
        assert_eq!(a.rho_weighted, b.rho_weighted);
        assert_eq!(a.final_log_weights, b.final_log_weights);
        assert_eq!(a.energy_slope, b.energy_slope);
    }

    #[test]
    fn weighted_average_follows_master_equation() {
        let (sys, geo) = setup();
        let psi = QuantumState::from_probabilities(&[0.5, 0.5]).unwrap();
        let mut s = spec(None);
        s.n_trajectories = 2000;
        let ens = run_ensemble(&sys, &geo, &psi, &s).unwrap();
        let prop = Propagator::new(sys.hamiltonian(), 1.0, s.dt).unwrap();
        let master = evolve_series(&DensityMatrix::from_state(&psi), &geo, prop, s.steps, s.record_every).unwrap();
        for (rho, (_, m)) in ens.rho_weighted.iter().zip(&master) {
            assert!(trace_distance(rho, &m.matrix) < 0.05);
        }
        assert_eq!(ens.times.len(), master.len());
    }

    #[test]
    fn record_grid_includes_end() {
        let mut s = spec(None);
        s.steps = 25;
        assert_eq!(record_times(&s), vec![0, 10, 20, 25]);
    }
}
