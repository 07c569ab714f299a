//! Classical vacuum-fluctuation models.
//!
//! Space is cut into cubic cells of side ℒ and time into intervals 𝒯. In the
//! monopole model each cell independently holds a mass μ with probability 𝒫
//! for one interval, against a uniform background −μ𝒫/ℒ³. In the dipole model
//! each cell seeds, with probability 𝒫, a pair +μ in the cell and −μ in one
//! of its six face neighbours chosen uniformly.

mod brownian;
mod correlation;
mod force;

pub use brownian::{brownian_energy_run, brownian_ensemble, BrownianResult, BrownianSpec};
pub use correlation::{empirical_correlation, empirical_spectrum, CorrelationEstimate, MIN_SAMPLES};
pub use force::{
    force_noise_coefficient, force_on_smeared_mass, sample_event_sources, smeared_force_profile, tail_fraction,
    CutoffSampler, ForceEstimate, PointSource,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluctuationKind {
    Monopole,
    Dipole,
}

impl FluctuationKind {
    pub fn name(self) -> &'static str {
        match self {
            FluctuationKind::Monopole => "monopole",
            FluctuationKind::Dipole => "dipole",
        }
    }
}

/// The six face-neighbour directions.
pub const DIRECTIONS: [[i64; 3]; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSpec {
    pub kind: FluctuationKind,
    /// Event mass μ, g.
    pub mu: f64,
    /// Probability per cell per interval.
    pub p: f64,
    /// Cell side ℒ, cm.
    pub cell_l: f64,
    /// Interval 𝒯, s.
    pub interval_t: f64,
    /// Cells per axis of the periodic lattice used for field realizations.
    pub extent: usize,
    /// Separation of the ±μ pair, cm. Field realizations always put the
    /// partner in the adjacent cell; forces use this value.
    pub arm: f64,
}

impl FluctuationSpec {
    pub fn new(kind: FluctuationKind, mu: f64, p: f64, cell_l: f64, interval_t: f64) -> Result<Self> {
        let spec = FluctuationSpec { kind, mu, p, cell_l, interval_t, extent: 64, arm: cell_l };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_extent(mut self, extent: usize) -> Result<Self> {
        self.extent = extent;
        self.validate()?;
        Ok(self)
    }

    pub fn with_arm(mut self, arm: f64) -> Result<Self> {
        self.arm = arm;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("mu", self.mu)?;
        ensure_positive("cell_l", self.cell_l)?;
        ensure_positive("interval_t", self.interval_t)?;
        ensure_positive("arm", self.arm)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter { name: "p", reason: format!("probability {} outside [0, 1]", self.p) });
        }
        if self.extent < 3 {
            return Err(Error::InvalidParameter { name: "extent", reason: "need at least 3 cells per axis".into() });
        }
        Ok(())
    }

    /// P̃ = 𝒫𝒯/ℒ³, s cm⁻³.
    pub fn p_tilde(&self) -> f64 {
        self.p * self.interval_t / self.cell_l.powi(3)
    }

    /// Dipole moment p = μ · arm, g cm.
    pub fn dipole_moment(&self) -> f64 {
        self.mu * self.arm
    }

    /// Small-𝒫 correlation coefficient: μ²P̃ (monopole) or P̃p²/3 (dipole).
    pub fn target_coefficient(&self) -> f64 {
        match self.kind {
            FluctuationKind::Monopole => self.mu * self.mu * self.p_tilde(),
            FluctuationKind::Dipole => self.p_tilde() * self.dipole_moment().powi(2) / 3.0,
        }
    }

    /// Kernel strength implied by a correlation coefficient: γ = 1/(4c) for
    /// the monopole, γ′ = 1/(16πc) for the dipole.
    pub fn implied_strength(&self, coefficient: f64) -> f64 {
        match self.kind {
            FluctuationKind::Monopole => 1.0 / (4.0 * coefficient),
            FluctuationKind::Dipole => 1.0 / (16.0 * std::f64::consts::PI * coefficient),
        }
    }

    /// White-noise force coefficient K² = 𝒯⟨F_i²⟩ on a mass m smeared over a:
    /// (4√π/3)(Gμm)²P̃/a or (2√π/9)G²m²P̃p²/a³.
    pub fn force_coefficient(&self, constants: &PhysicalConstants<f64>, m: f64, a: f64) -> f64 {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let g = constants.g;
        match self.kind {
            FluctuationKind::Monopole => 4.0 * sqrt_pi / 3.0 * (g * self.mu * m).powi(2) * self.p_tilde() / a,
            FluctuationKind::Dipole => {
                2.0 * sqrt_pi / 9.0 * (g * m).powi(2) * self.p_tilde() * self.dipole_moment().powi(2) / a.powi(3)
            }
        }
    }

    /// Heating rate 3K²/(2m): 2√π m(Gμ)²P̃/a or (√π/3)G²mP̃p²/a³.
    pub fn heating_rate(&self, constants: &PhysicalConstants<f64>, m: f64, a: f64) -> f64 {
        1.5 * self.force_coefficient(constants, m, a) / m
    }
}

/// One realization of events on the periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct EventConfig {
    pub kind: FluctuationKind,
    pub extent: usize,
    /// Occupation (monopole) or seed flag (dipole) per cell.
    pub occupied: Vec<bool>,
    /// Direction index into [`DIRECTIONS`] for each dipole seed, per cell.
    pub orientation: Vec<u8>,
}

impl EventConfig {
    pub fn n_events(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn cell_index(&self, c: [i64; 3]) -> usize {
        let n = self.extent as i64;
        let w = |v: i64| v.rem_euclid(n) as usize;
        w(c[0]) + self.extent * (w(c[1]) + self.extent * w(c[2]))
    }

    pub fn cell_coords(&self, idx: usize) -> [i64; 3] {
        let n = self.extent;
        [(idx % n) as i64, ((idx / n) % n) as i64, (idx / (n * n)) as i64]
    }
}

pub fn sample_config<R: Rng + ?Sized>(spec: &FluctuationSpec, rng: &mut R) -> EventConfig {
    let cells = spec.extent.pow(3);
    let mut occupied = vec![false; cells];
    let mut orientation = vec![0u8; cells];
    for c in 0..cells {
        occupied[c] = rng.random::<f64>() < spec.p;
        if occupied[c] && spec.kind == FluctuationKind::Dipole {
            orientation[c] = rng.random_range(0..6u8);
        }
    }
    EventConfig { kind: spec.kind, extent: spec.extent, occupied, orientation }
}

/// w₀ per cell (g cm⁻³): μ(u − 𝒫)/ℒ³ for the monopole, ±μ/ℒ³ on the two
/// cells of each dipole.
pub fn w0_field(config: &EventConfig, spec: &FluctuationSpec) -> Vec<f64> {
    let density = spec.mu / spec.cell_l.powi(3);
    match config.kind {
        FluctuationKind::Monopole => {
            config.occupied.iter().map(|&u| density * (if u { 1.0 } else { 0.0 } - spec.p)).collect()
        }
        FluctuationKind::Dipole => {
            let mut w = vec![0.0; config.occupied.len()];
            for (idx, _) in config.occupied.iter().enumerate().filter(|(_, &o)| o) {
                let c = config.cell_coords(idx);
                let d = DIRECTIONS[config.orientation[idx] as usize];
                w[idx] += density;
                w[config.cell_index([c[0] + d[0], c[1] + d[1], c[2] + d[2]])] -= density;
            }
            w
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(kind: FluctuationKind, p: f64) -> FluctuationSpec {
        FluctuationSpec::new(kind, 2.0, p, 0.5, 3.0).unwrap().with_extent(16).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let s = spec(FluctuationKind::Dipole, 0.25);
        assert!((s.p_tilde() - 0.25 * 3.0 / 0.125).abs() < 1e-14);
        assert!((s.dipole_moment() - 1.0).abs() < 1e-15);
        assert!(FluctuationSpec::new(FluctuationKind::Monopole, 1.0, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_and_full_lattices_have_no_fluctuation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [0.0, 1.0] {
            let s = spec(FluctuationKind::Monopole, p);
            let cfg = sample_config(&s, &mut rng);
            assert!(w0_field(&cfg, &s).iter().all(|&w| w == 0.0));
        }
        let s = spec(FluctuationKind::Dipole, 0.0);
        let cfg = sample_config(&s, &mut rng);
        assert_eq!(cfg.n_events(), 0);
    }

    #[test]
    fn occupancy_fraction_is_binomial() {
        let s = FluctuationSpec::new(FluctuationKind::Monopole, 1.0, 0.1, 1.0, 1.0).unwrap().with_extent(100).unwrap();
        let cfg = sample_config(&s, &mut ChaCha8Rng::seed_from_u64(4));
        let n = 1e6;
        let frac = cfg.n_events() as f64 / n;
        assert!((frac - 0.1).abs() < 3.0 * (0.1 * 0.9 / n).sqrt());
    }

    #[test]
    fn cell_values() {
        let s = spec(FluctuationKind::Monopole, 0.2);
        let cfg = sample_config(&s, &mut ChaCha8Rng::seed_from_u64(8));
        let w = w0_field(&cfg, &s);
        let rho = s.mu / s.cell_l.powi(3);
        for (u, v) in cfg.occupied.iter().zip(&w) {
            let expected = if *u { rho * 0.8 } else { -rho * 0.2 };
            assert!((v - expected).abs() < 1e-12 * rho);
        }
    }

    #[test]
    fn dipoles_carry_no_net_mass() {
        let s = spec(FluctuationKind::Dipole, 0.3);
        let cfg = sample_config(&s, &mut ChaCha8Rng::seed_from_u64(2));
        let total: f64 = w0_field(&cfg, &s).iter().sum();
        assert!(total.abs() < 1e-9);
    }

    #[test]
    fn heating_is_three_halves_k2_over_m() {
        let k = PhysicalConstants::<f64>::cgs();
        for kind in [FluctuationKind::Monopole, FluctuationKind::Dipole] {
            let s = spec(kind, 0.01);
            let (m, a) = (3.0f64, 0.7f64);
            let direct = match kind {
                FluctuationKind::Monopole => 2.0 * std::f64::consts::PI.sqrt() * m * (k.g * s.mu).powi(2) * s.p_tilde() / a,
                FluctuationKind::Dipole => {
                    std::f64::consts::PI.sqrt() / 3.0 * k.g * k.g * m * s.p_tilde() * s.dipole_moment().powi(2) / a.powi(3)
                }
            };
            assert!((s.heating_rate(&k, m, a) / direct - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn implied_strengths_match_solver() {
        let k = PhysicalConstants::cgs();
        let s = FluctuationSpec::new(FluctuationKind::Monopole, k.planck_mass, 1e-3, 1e-5, 1.0).unwrap();
        let sol = crate::solver::solve_monopole(&k, s.mu, s.p_tilde()).unwrap();
        assert!((s.implied_strength(s.target_coefficient()) / sol.gamma() - 1.0).abs() < 1e-14);
        let d = FluctuationSpec { kind: FluctuationKind::Dipole, ..s };
        let sol = crate::solver::DipoleSolution { a: 1e-5, p_tilde_p2: d.p_tilde() * d.dipole_moment().powi(2), constants: k };
        assert!((d.implied_strength(d.target_coefficient()) / sol.gamma_prime() - 1.0).abs() < 1e-14);
    }
}
