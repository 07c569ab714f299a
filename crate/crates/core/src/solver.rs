//! Closed-form GRW parameters from the vacuum-fluctuation models.
//!
//! Monopole model: matching the noise correlation (γ = 1/(4μ²P̃)) and the
//! Brownian heating rate against the collapse heating rate fixes both a and
//! λ(m). Dipole model: the same two matchings fix P̃p² and leave λ(m)·a.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::collapse::{KernelKind, KernelModel};
use crate::constants::PhysicalConstants;
use crate::error::{ensure_positive, Error, Result};
use crate::num::{pow3_2, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopoleSolution<T> {
    /// Event mass μ, g.
    pub mu: T,
    /// P̃ = 𝒫𝒯/ℒ³, s cm⁻³.
    pub p_tilde: T,
    /// Localization length, cm.
    pub a: T,
    pub constants: PhysicalConstants<T>,
}

impl<T: Real> MonopoleSolution<T> {
    /// λ_m = G m² / (2√(3π) a ħ).
    pub fn lambda(&self, m: T) -> T {
        let k = &self.constants;
        k.g * m * m / (T::lit(2.0) * (T::lit(3.0) * T::PI()).sqrt() * self.a * k.hbar)
    }

    /// γ = 1/(4μ²P̃).
    pub fn gamma(&self) -> T {
        T::one() / (T::lit(4.0) * self.mu * self.mu * self.p_tilde)
    }

    pub fn kernel(&self) -> Result<KernelModel<T>> {
        KernelModel::new(KernelKind::Grwp, self.gamma())
    }

    /// Collapse rate from the correlation matching alone:
    /// λ = m² / (32 π^{3/2} μ² a³ P̃).
    pub fn lambda_from_correlation(&self, m: T) -> T {
        m * m / (T::lit(32.0) * pow3_2(T::PI()) * self.mu * self.mu * self.a.powi(3) * self.p_tilde)
    }

    /// Brownian heating rate 2√π m (Gμ)² P̃ / a.
    pub fn brownian_heating(&self, m: T) -> T {
        let gm = self.constants.g * self.mu;
        T::lit(2.0) * T::PI().sqrt() * m * gm * gm * self.p_tilde / self.a
    }

    /// Relative residuals of the two defining equations at mass `m`:
    /// (correlation matching, heating matching).
    pub fn residuals(&self, m: T) -> (T, T) {
        let lambda = self.lambda(m);
        let r1 = (lambda / self.lambda_from_correlation(m) - T::one()).abs();
        let hbar = self.constants.hbar;
        let csl_heating = T::lit(3.0) * hbar * hbar * lambda / (T::lit(4.0) * m * self.a * self.a);
        let r2 = (csl_heating / self.brownian_heating(m) - T::one()).abs();
        (r1, r2)
    }
}

/// Solve the monopole relations for a and λ(m).
///
/// a = (3/π²)^{1/4} (1/4) (cħ/(Gμ²))^{1/2} (1/(P̃c))^{1/2}
pub fn solve_monopole<T: Real>(constants: &PhysicalConstants<T>, mu: T, p_tilde: T) -> Result<MonopoleSolution<T>> {
    ensure_positive("mu", mu.to_f64_lossy())?;
    ensure_positive("p_tilde", p_tilde.to_f64_lossy())?;
    let k = constants;
    let pi = T::PI();
    let a = (T::lit(3.0) / (pi * pi)).powf(T::lit(0.25)) / T::lit(4.0)
        * (k.c * k.hbar / (k.g * mu * mu)).sqrt()
        * (T::one() / (p_tilde * k.c)).sqrt();
    Ok(MonopoleSolution { mu, p_tilde, a, constants: *k })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSolution<T> {
    pub a: T,
    /// Required P̃p² = (3/8π)(ħ/G), g² s cm⁻¹.
    pub p_tilde_p2: T,
    pub constants: PhysicalConstants<T>,
}

impl<T: Real> DipoleSolution<T> {
    /// λ_m = G m² / (6√π a ħ).
    pub fn lambda(&self, m: T) -> T {
        let k = &self.constants;
        k.g * m * m / (T::lit(6.0) * T::PI().sqrt() * self.a * k.hbar)
    }

    /// γ′ = 3/(16π P̃p²).
    pub fn gamma_prime(&self) -> T {
        T::lit(3.0) / (T::lit(16.0) * T::PI() * self.p_tilde_p2)
    }

    pub fn kernel(&self) -> Result<KernelModel<T>> {
        KernelModel::new(KernelKind::Dggr, self.gamma_prime())
    }

    /// λ = m² / (16 π^{3/2} a P̃p²).
    pub fn lambda_from_correlation(&self, m: T) -> T {
        m * m / (T::lit(16.0) * pow3_2(T::PI()) * self.a * self.p_tilde_p2)
    }

    /// Brownian heating rate √π G² m P̃p² / (3a³).
    pub fn brownian_heating(&self, m: T) -> T {
        let g = self.constants.g;
        T::PI().sqrt() * g * g * m * self.p_tilde_p2 / (T::lit(3.0) * self.a.powi(3))
    }

    pub fn residuals(&self, m: T) -> (T, T) {
        let lambda = self.lambda(m);
        let r1 = (lambda / self.lambda_from_correlation(m) - T::one()).abs();
        let hbar = self.constants.hbar;
        let csl_heating = T::lit(3.0) * hbar * hbar * lambda / (T::lit(4.0) * m * self.a * self.a);
        let r2 = (csl_heating / self.brownian_heating(m) - T::one()).abs();
        (r1, r2)
    }

    /// Cell event density 𝒫/ℒ³ for a given interval 𝒯 and dipole moment p.
    pub fn event_density(&self, interval: T, dipole_moment: T) -> T {
        self.p_tilde_p2 / (interval * dipole_moment * dipole_moment)
    }
}

/// Solve the dipole relations. Only `a` is free; P̃p² is fixed by constants.
pub fn solve_dipole<T: Real>(constants: &PhysicalConstants<T>, a: T) -> Result<DipoleSolution<T>> {
    ensure_positive("a", a.to_f64_lossy())?;
    let p_tilde_p2 = T::lit(3.0) / (T::lit(8.0) * T::PI()) * (constants.hbar / constants.g);
    Ok(DipoleSolution { a, p_tilde_p2, constants: *constants })
}

/// Named parameter scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// μ = planck mass, 𝒯 = planck time, 𝒫/ℒ³ = (Mc/ħ)³ with M the nucleon
    /// (proton) mass.
    PlanckNucleonMonopole,
    /// 𝒯 = planck time, p = ħ/c, a = 10⁻⁵ cm.
    PlanckDipole,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::PlanckNucleonMonopole, Scenario::PlanckDipole];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PlanckNucleonMonopole => "planck-nucleon-monopole",
            Scenario::PlanckDipole => "planck-dipole",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| Error::InvalidParameter {
            name: "scenario",
            reason: format!("unknown scenario `{s}`; expected one of planck-nucleon-monopole, planck-dipole"),
        })
    }
}

/// A reported number with its unit and the relation it comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub source: String,
}

impl NamedValue {
    fn new(name: &str, value: f64, unit: &str, source: &str) -> Self {
        NamedValue { name: name.into(), value, unit: unit.into(), source: source.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub values: Vec<NamedValue>,
}

impl ScenarioReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }
}

/// The GRW rate the model is compared with, s⁻¹.
pub const GRW_LAMBDA: f64 = 1e-16;
/// The GRW localization length, cm.
pub const GRW_A: f64 = 1e-5;

pub fn planck_nucleon_monopole(k: &PhysicalConstants<f64>) -> Result<MonopoleSolution<f64>> {
    let density = (k.nucleon_mass * k.c / k.hbar).powi(3);
    solve_monopole(k, k.planck_mass, k.planck_time * density)
}

pub fn evaluate_scenario(scenario: Scenario, k: &PhysicalConstants<f64>) -> Result<ScenarioReport> {
    let m = k.nucleon_mass;
    let values = match scenario {
        Scenario::PlanckNucleonMonopole => {
            let sol = planck_nucleon_monopole(k)?;
            let compton = k.compton_length(m);
            let closed = (3.0 / (std::f64::consts::PI.powi(2))).powf(0.25) * compton / 4.0 * (k.planck_mass / m).sqrt();
            let (r1, r2) = sol.residuals(m);
            vec![
                NamedValue::new("a", sol.a, "cm", "a from correlation and heating matching"),
                NamedValue::new("a_closed_form", closed, "cm", "a = (3/pi^2)^(1/4) (hbar/4Mc) sqrt(mu/M)"),
                NamedValue::new("lambda_nucleon", sol.lambda(m), "s^-1", "lambda = G m^2 / (2 sqrt(3 pi) a hbar)"),
                NamedValue::new("lambda_grw", GRW_LAMBDA, "s^-1", "GRW reference"),
                NamedValue::new("lambda_times_a", sol.lambda(m) * sol.a, "cm s^-1", "lambda = G m^2 / (2 sqrt(3 pi) a hbar)"),
                NamedValue::new("gamma", sol.gamma(), "cm^3 s^-1 g^-2", "gamma = 1/(4 mu^2 Ptilde)"),
                NamedValue::new("p_tilde", sol.p_tilde, "s cm^-3", "Ptilde = P T / L^3"),
                NamedValue::new("mu", sol.mu, "g", "planck mass"),
                NamedValue::new("residual_correlation", r1, "1", "correlation matching"),
                NamedValue::new("residual_heating", r2, "1", "heating matching"),
            ]
        }
        Scenario::PlanckDipole => {
            let sol = solve_dipole(k, GRW_A)?;
            let mono_same_a = MonopoleSolution { mu: k.planck_mass, p_tilde: 1.0, a: GRW_A, constants: *k };
            let p = k.hbar / k.c;
            let density = sol.event_density(k.planck_time, p);
            let planck_density = 3.0 / (8.0 * std::f64::consts::PI) * (k.planck_mass * k.c / k.hbar).powi(3);
            let (r1, r2) = sol.residuals(m);
            vec![
                NamedValue::new("p_tilde_p2", sol.p_tilde_p2, "g^2 s cm^-1", "Ptilde p^2 = (3/8pi) hbar/G"),
                NamedValue::new("a", sol.a, "cm", "GRW value"),
                NamedValue::new("lambda_nucleon", sol.lambda(m), "s^-1", "lambda = G m^2 / (6 sqrt(pi) a hbar)"),
                NamedValue::new("lambda_ratio_to_monopole", sol.lambda(m) / mono_same_a.lambda(m), "1", "dipole over monopole rate at equal a"),
                NamedValue::new("gamma_prime", sol.gamma_prime(), "cm s^-1 g^-2", "gamma' = 3/(16 pi Ptilde p^2)"),
                NamedValue::new("event_density", density, "cm^-3", "P/L^3 with T = planck time, p = hbar/c"),
                NamedValue::new("planck_event_density", planck_density, "cm^-3", "(3/8pi)(mu c/hbar)^3"),
                NamedValue::new("residual_correlation", r1, "1", "correlation matching"),
                NamedValue::new("residual_heating", r2, "1", "heating matching"),
            ]
        }
    };
    Ok(ScenarioReport { scenario: scenario.name().into(), values })
}
