//! Gravitational forces from vacuum events on a Gaussian-smeared test mass.
//!
//! A point source M at separation r pulls a mass m smeared with variance a²
//! with magnitude GMm g(r/a)/r², g(u) = erf(u/√2) − √(2/π) u e^{−u²/2}.
//!
//! The fast sampler works in the frame of the test mass: it sits at the centre
//! of cell (0,0,0) and events are drawn fresh each interval in the cells whose
//! centres lie within the cutoff. The uniform monopole background is then an
//! inversion-symmetric sum around the test mass and exerts no force.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{EventConfig, FluctuationKind, FluctuationSpec, DIRECTIONS};
use crate::constants::PhysicalConstants;
use crate::error::{ensure_positive, Error, Result};
use crate::rng::{stream, Domain};
use crate::stats::{mean_stderr, pairwise_reduce, Estimate};

const FRAC_SQRT_2_PI: f64 = 0.797_884_560_802_865_4;

/// g(u), the fraction of the point-mass force felt by the smeared mass.
pub fn smeared_force_profile(u: f64) -> f64 {
    let u = u.abs();
    if u < 0.1 {
        let u2 = u * u;
        FRAC_SQRT_2_PI * u * u2 * (1.0 / 3.0 - u2 / 10.0 + u2 * u2 / 56.0 - u2 * u2 * u2 / 432.0)
    } else if u > 40.0 {
        1.0
    } else {
        libm::erf(u / std::f64::consts::SQRT_2) - FRAC_SQRT_2_PI * u * (-0.5 * u * u).exp()
    }
}

/// Signed source mass at an offset from the test mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub offset: [f64; 3],
    pub mass: f64,
}

/// Force on m smeared over a, in units of G (multiply by G for dyn).
fn force_per_g(sources: &[PointSource], m: f64, a: f64) -> [f64; 3] {
    let mut f = [0.0; 3];
    for s in sources {
        let r2 = s.offset.iter().map(|x| x * x).sum::<f64>();
        if r2 == 0.0 {
            continue;
        }
        let r = r2.sqrt();
        let scale = s.mass * m * smeared_force_profile(r / a) / (r2 * r);
        for i in 0..3 {
            f[i] += scale * s.offset[i];
        }
    }
    f
}

/// Fraction of K² carried by events beyond the cutoff, for R_c ≫ a:
/// √π a/R_c (monopole) or 4√π (a/R_c)³ (point dipoles).
pub fn tail_fraction(kind: FluctuationKind, a: f64, cutoff: f64) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    match kind {
        FluctuationKind::Monopole => sqrt_pi * a / cutoff,
        FluctuationKind::Dipole => 4.0 * sqrt_pi * (a / cutoff).powi(3),
    }
}

/// Force (dyn) at `position` (cm) from one lattice realization, summing all
/// sources within `cutoff` under the minimum-image convention. Cell c has its
/// centre at ℒc. Dipoles are kept whole when their seed is inside.
pub fn force_on_smeared_mass(
    config: &EventConfig,
    spec: &FluctuationSpec,
    constants: &PhysicalConstants<f64>,
    m: f64,
    a: f64,
    position: [f64; 3],
    cutoff: f64,
) -> Result<[f64; 3]> {
    ensure_positive("m", m)?;
    ensure_positive("a", a)?;
    ensure_positive("cutoff", cutoff)?;
    let l = spec.cell_l;
    let box_len = config.extent as f64 * l;
    if 2.0 * cutoff >= box_len {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            reason: format!("cutoff {cutoff:e} cm must be below half the lattice box {box_len:e} cm"),
        });
    }
    let wrap = |d: f64| d - box_len * (d / box_len).round();
    let mut sources = Vec::new();
    for idx in 0..config.occupied.len() {
        let c = config.cell_coords(idx);
        let off = [0, 1, 2].map(|i| wrap(c[i] as f64 * l - position[i]));
        if off.iter().map(|x| x * x).sum::<f64>() > cutoff * cutoff {
            continue;
        }
        match spec.kind {
            FluctuationKind::Monopole => {
                let u = if config.occupied[idx] { 1.0 } else { 0.0 };
                sources.push(PointSource { offset: off, mass: spec.mu * (u - spec.p) });
            }
            FluctuationKind::Dipole if config.occupied[idx] => {
                let d = DIRECTIONS[config.orientation[idx] as usize];
                sources.push(PointSource { offset: off, mass: spec.mu });
                let partner = [0, 1, 2].map(|i| off[i] + spec.arm * d[i] as f64);
                sources.push(PointSource { offset: partner, mass: -spec.mu });
            }
            FluctuationKind::Dipole => {}
        }
    }
    Ok(force_per_g(&sources, m, a).map(|f| f * constants.g))
}

/// Draws the events within the cutoff around a test mass at a cell centre.
#[derive(Debug, Clone)]
pub struct CutoffSampler {
    spec: FluctuationSpec,
    half: i64,
    side: u64,
    radius2: f64,
    ln_q: f64,
}

impl CutoffSampler {
    pub fn new(spec: &FluctuationSpec, cutoff: f64) -> Result<Self> {
        spec.validate()?;
        ensure_positive("cutoff", cutoff)?;
        let radius = cutoff / spec.cell_l;
        if radius > 2000.0 {
            return Err(Error::InvalidParameter { name: "cutoff", reason: format!("{radius:.0} cells exceeds 2000") });
        }
        let half = radius.floor() as i64;
        let side = (2 * half + 1) as u64;
        Ok(CutoffSampler { spec: *spec, half, side, radius2: radius * radius, ln_q: (-spec.p).ln_1p() })
    }

    /// Cells whose centres lie inside the cutoff.
    pub fn cells_in_sphere(&self) -> u64 {
        let h = self.half;
        let mut count = 0;
        for i in -h..=h {
            for j in -h..=h {
                let rem = self.radius2 - (i * i + j * j) as f64;
                if rem >= 0.0 {
                    count += 2 * rem.sqrt().floor().min(h as f64) as u64 + 1;
                }
            }
        }
        count
    }

    /// Next occupied cell index after skipping a geometric gap.
    fn gap<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.spec.p >= 1.0 {
            return 0;
        }
        let u = 1.0 - rng.random::<f64>();
        let g = (u.ln() / self.ln_q).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<PointSource>) {
        out.clear();
        if self.spec.p <= 0.0 {
            return;
        }
        let total = self.side.pow(3);
        let l = self.spec.cell_l;
        let mut idx = self.gap(rng);
        while idx < total {
            let i = (idx % self.side) as i64 - self.half;
            let j = ((idx / self.side) % self.side) as i64 - self.half;
            let k = (idx / (self.side * self.side)) as i64 - self.half;
            if ((i * i + j * j + k * k) as f64) <= self.radius2 {
                let off = [i as f64 * l, j as f64 * l, k as f64 * l];
                out.push(PointSource { offset: off, mass: self.spec.mu });
                if self.spec.kind == FluctuationKind::Dipole {
                    let d = DIRECTIONS[rng.random_range(0..6usize)];
                    let partner = [0, 1, 2].map(|n| off[n] + self.spec.arm * d[n] as f64);
                    out.push(PointSource { offset: partner, mass: -self.spec.mu });
                }
            }
            idx = idx.saturating_add(1).saturating_add(self.gap(rng));
        }
    }

    /// Force (dyn) on m smeared over a from one interval of events.
    pub fn force<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        scratch: &mut Vec<PointSource>,
        g: f64,
        m: f64,
        a: f64,
    ) -> [f64; 3] {
        self.sample(rng, scratch);
        force_per_g(scratch, m, a).map(|f| f * g)
    }
}

/// Events for one interval around a test mass at the origin cell centre.
pub fn sample_event_sources<R: Rng + ?Sized>(sampler: &CutoffSampler, rng: &mut R) -> Vec<PointSource> {
    let mut out = Vec::new();
    sampler.sample(rng, &mut out);
    out
}

/// Monte Carlo estimate of K² = 𝒯⟨F_i²⟩.
#[derive(Debug, Clone, Serialize)]
pub struct ForceEstimate {
    /// Average over the three axes, dyn² s.
    pub k2: Estimate,
    pub per_axis: [Estimate; 3],
    /// Average of 𝒯⟨F_iF_j⟩ over the three axis pairs.
    pub cross: Estimate,
    /// Analytic K² for an infinite cutoff.
    pub target: f64,
    pub tail_fraction: f64,
    /// k2 / (1 − tail_fraction).
    pub corrected: Estimate,
    pub cutoff: f64,
}

const FORCE_CHUNK: usize = 4096;

pub fn force_noise_coefficient(
    spec: &FluctuationSpec,
    constants: &PhysicalConstants<f64>,
    m: f64,
    a: f64,
    cutoff: f64,
    n_intervals: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<ForceEstimate> {
    ensure_positive("m", m)?;
    ensure_positive("a", a)?;
    if n_intervals < 2 {
        return Err(Error::InvalidParameter { name: "n_intervals", reason: "need at least two intervals".into() });
    }
    let sampler = CutoffSampler::new(spec, cutoff)?;
    let t = spec.interval_t;
    let n_chunks = n_intervals.div_ceil(FORCE_CHUNK);
    let chunks: Vec<Vec<[f64; 3]>> = crate::pool::install(workers, || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream(seed, Domain::ForceSample, c as u64);
                let mut scratch = Vec::new();
                let len = FORCE_CHUNK.min(n_intervals - c * FORCE_CHUNK);
                (0..len).map(|_| sampler.force(&mut rng, &mut scratch, constants.g, m, a)).collect()
            })
            .collect()
    })?;
    let forces = pairwise_reduce(&chunks, &|x: &Vec<[f64; 3]>, y: &Vec<[f64; 3]>| [x.as_slice(), y].concat())
        .expect("at least one chunk");
    let series = |f: &dyn Fn(&[f64; 3]) -> f64| mean_stderr(&forces.iter().map(|v| t * f(v)).collect::<Vec<_>>());
    let k2 = series(&|f| (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]) / 3.0);
    let per_axis = [0, 1, 2].map(|i| series(&|f| f[i] * f[i]));
    let cross = series(&|f| (f[0] * f[1] + f[1] * f[2] + f[2] * f[0]) / 3.0);
    let tail = tail_fraction(spec.kind, a, cutoff);
    Ok(ForceEstimate {
        k2,
        per_axis,
        cross,
        target: spec.force_coefficient(constants, m, a),
        tail_fraction: tail,
        corrected: k2.scale(1.0 / (1.0 - tail)),
        cutoff,
    })
}
