//! Order-of-magnitude test of whether a probe can read out the gravitational
//! field of a source mass before collapse settles the source.
//!
//! A source of mass M, radius R and density D is probed by a test mass moving
//! at speed v (which must stay below c) at distance Z. All bounds are scaling
//! relations with unit coefficients, so margins are only meaningful to within
//! an order of magnitude.

use rand::Rng;
use serde::Serialize;

use crate::collapse::KernelKind;
use crate::constants::PhysicalConstants;
use crate::error::{ensure_positive, Error, Result};
use crate::kernels::OrderOfMagnitude;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeScenario<T> {
    /// Source mass M, g.
    pub mass: T,
    /// Source radius R, cm.
    pub radius: T,
    /// Source density D, g cm⁻³.
    pub density: T,
    /// Probe speed, cm s⁻¹.
    pub v_probe: T,
    /// Collapse length a, cm.
    pub a: T,
    /// Probe smearing length a′, cm.
    pub a_prime: T,
    /// Fixed probe distance Z, cm. `None` searches over Z.
    pub separation: Option<T>,
    pub model: KernelKind,
}

impl<T: Real> ProbeScenario<T> {
    /// Build a scenario from mass and radius; density follows from a uniform
    /// sphere.
    pub fn from_mass_radius(mass: T, radius: T, v_probe: T, a: T, model: KernelKind) -> Result<Self> {
        let density = mass / (T::lit(4.0) / T::lit(3.0) * T::PI() * radius.powi(3));
        Self { mass, radius, density, v_probe, a, a_prime: a, separation: None, model }.checked()
    }

    /// Build a scenario from density and radius.
    pub fn from_density_radius(density: T, radius: T, v_probe: T, a: T, model: KernelKind) -> Result<Self> {
        let mass = T::lit(4.0) / T::lit(3.0) * T::PI() * radius.powi(3) * density;
        Self { mass, radius, density, v_probe, a, a_prime: a, separation: None, model }.checked()
    }

    pub fn with_a_prime(mut self, a_prime: T) -> Result<Self> {
        self.a_prime = a_prime;
        self.checked()
    }

    pub fn with_separation(mut self, z: T) -> Result<Self> {
        self.separation = Some(z);
        self.checked()
    }

    fn checked(self) -> Result<Self> {
        ensure_positive("mass", self.mass.to_f64_lossy())?;
        ensure_positive("radius", self.radius.to_f64_lossy())?;
        ensure_positive("density", self.density.to_f64_lossy())?;
        ensure_positive("v_probe", self.v_probe.to_f64_lossy())?;
        ensure_positive("a", self.a.to_f64_lossy())?;
        ensure_positive("a_prime", self.a_prime.to_f64_lossy())?;
        if let Some(z) = self.separation {
            ensure_positive("separation", z.to_f64_lossy())?;
        }
        Ok(self)
    }

    pub fn validate(&self, constants: &PhysicalConstants<T>) -> Result<()> {
        self.checked()?;
        if self.v_probe >= constants.c {
            return Err(Error::InvalidParameter {
                name: "v_probe",
                reason: format!("probe speed {} is not below c", self.v_probe),
            });
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.radius < self.a {
            Regime::Compact
        } else {
            Regime::Extended
        }
    }
}

/// Source smaller or larger than the collapse length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Compact,
    Extended,
}

/// A strict inequality `lhs > rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality<T> {
    pub label: &'static str,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> Inequality<T> {
    pub fn holds(&self) -> bool {
        self.lhs > self.rhs
    }

    /// lhs/rhs; above one when the inequality holds.
    pub fn margin(&self) -> T {
        self.lhs / self.rhs
    }
}

/// Open interval `lower < Z < upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZWindow<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> ZWindow<T> {
    pub fn is_open(&self) -> bool {
        self.upper > self.lower
    }

    pub fn contains(&self, z: T) -> bool {
        z > self.lower && z < self.upper
    }

    /// upper/lower.
    pub fn ratio(&self) -> T {
        self.upper / self.lower
    }
}

/// Kernel-strength normalization used when turning a kernel into a collapse
/// time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthConvention {
    /// γ ∼ Ga²/ħ and γ′ ∼ G/ħ with unit coefficients.
    Scaling,
    /// γ = (4π/√3) Ga²/ħ and γ′ = G/(2ħ), the values implied by the monopole
    /// and dipole fluctuation models.
    ModelDerived,
}

impl StrengthConvention {
    fn factor<T: Real>(self, model: KernelKind) -> T {
        match (self, model) {
            (StrengthConvention::Scaling, _) => T::one(),
            (StrengthConvention::ModelDerived, KernelKind::Grwp) => T::lit(4.0) * T::PI() / T::lit(3.0).sqrt(),
            (StrengthConvention::ModelDerived, KernelKind::Dggr) => T::lit(0.5),
        }
    }
}

/// Everything evaluated for one scenario under one strength convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionReport<T> {
    pub convention: StrengthConvention,
    /// Collapse rate of the source, s⁻¹ (order of magnitude).
    pub collapse_rate: T,
    pub collapse_time: T,
    /// Window from requiring a fast enough probe at the best speed allowed by
    /// a good measurement.
    pub necessary_window: ZWindow<T>,
    /// Window at the scenario's own probe speed: Z < v τ.
    pub kinematic_window: ZWindow<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectabilityReport<T> {
    pub regime: Regime,
    pub model: KernelKind,
    /// (M/μ)² > v/c: the probe recoil does not swamp the measurement.
    pub good_measurement: Inequality<T>,
    /// Z used for the per-Z checks below.
    pub z_eval: T,
    /// Z > max(R, a′).
    pub geometric: Inequality<T>,
    /// Minimum probe velocity spread ħ/(M Z) at `z_eval`.
    pub velocity_uncertainty: T,
    /// τ_collapse > Z/v at `z_eval` (scaling strengths).
    pub collapse_slower_than_probe: Inequality<T>,
    pub scaling: ConventionReport<T>,
    pub model_derived: ConventionReport<T>,
    /// Good measurement and a non-empty necessary window.
    pub detectable: bool,
    /// In fixed-Z mode: every per-Z check holds at the given Z.
    pub detectable_at_z: Option<bool>,
}

impl<T: Real> DetectabilityReport<T> {
    pub fn order_of_magnitude_rate(&self) -> OrderOfMagnitude<T> {
        OrderOfMagnitude::new(self.scaling.collapse_rate)
    }
}

fn collapse_rate<T: Real>(s: &ProbeScenario<T>, k: &PhysicalConstants<T>, factor: T) -> T {
    let bare = match (s.regime(), s.model) {
        (Regime::Compact, _) => k.g * s.mass * s.mass / (s.a * k.hbar),
        (Regime::Extended, KernelKind::Grwp) => k.g * s.mass * s.density * s.a * s.a / k.hbar,
        (Regime::Extended, KernelKind::Dggr) => k.g * s.mass * s.mass / (s.radius * k.hbar),
    };
    factor * bare
}

/// Upper end of the necessary window, c(M/μ)²τ, written in closed form so that
/// the comparison with the lower end is exact.
fn necessary_upper<T: Real>(s: &ProbeScenario<T>, factor: T) -> T {
    let bare = match (s.regime(), s.model) {
        (Regime::Compact, _) => s.a,
        (Regime::Extended, KernelKind::Grwp) => s.mass / (s.density * s.a * s.a),
        (Regime::Extended, KernelKind::Dggr) => s.radius,
    };
    bare / factor
}

fn convention_report<T: Real>(
    s: &ProbeScenario<T>,
    k: &PhysicalConstants<T>,
    convention: StrengthConvention,
) -> ConventionReport<T> {
    let factor = convention.factor(s.model);
    let rate = collapse_rate(s, k, factor);
    let tau = T::one() / rate;
    let lower = s.radius.max(s.a_prime);
    ConventionReport {
        convention,
        collapse_rate: rate,
        collapse_time: tau,
        necessary_window: ZWindow { lower, upper: necessary_upper(s, factor) },
        kinematic_window: ZWindow { lower, upper: s.v_probe * tau },
    }
}

/// (M/μ)² > v/c.
pub fn min_probe_mass_condition<T: Real>(k: &PhysicalConstants<T>, mass: T, v_probe: T) -> Inequality<T> {
    let r = mass / k.planck_mass;
    Inequality { label: "good measurement", lhs: r * r, rhs: v_probe / k.c }
}

pub fn evaluate<T: Real>(s: &ProbeScenario<T>, k: &PhysicalConstants<T>) -> Result<DetectabilityReport<T>> {
    s.validate(k)?;
    let good = min_probe_mass_condition(k, s.mass, s.v_probe);
    let scaling = convention_report(s, k, StrengthConvention::Scaling);
    let model_derived = convention_report(s, k, StrengthConvention::ModelDerived);
    let w = scaling.necessary_window;
    let z = match s.separation {
        Some(z) => z,
        None if w.is_open() => (w.lower * w.upper).sqrt(),
        None => w.lower,
    };
    let geometric = Inequality { label: "probe outside source and its own smearing", lhs: z, rhs: w.lower };
    let timing =
        Inequality { label: "collapse slower than probe transit", lhs: scaling.collapse_time, rhs: z / s.v_probe };
    let detectable = good.holds() && w.is_open();
    let detectable_at_z = s.separation.map(|_| good.holds() && geometric.holds() && timing.holds());
    Ok(DetectabilityReport {
        regime: s.regime(),
        model: s.model,
        good_measurement: good,
        z_eval: z,
        geometric,
        velocity_uncertainty: k.hbar / (s.mass * z),
        collapse_slower_than_probe: timing,
        scaling,
        model_derived,
        detectable,
        detectable_at_z,
    })
}

/// Log-uniform ranges for a random sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRanges {
    pub radius: (f64, f64),
    pub density: (f64, f64),
    pub a: (f64, f64),
    /// a′/a.
    pub a_prime_ratio: (f64, f64),
    /// v/c, sampled log-uniformly.
    pub speed_fraction: (f64, f64),
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            radius: (1e-8, 1e2),
            density: (1e-1, 2e1),
            a: (1e-7, 1e-3),
            a_prime_ratio: (1e-2, 1e2),
            speed_fraction: (1e-12, 0.5),
        }
    }
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Random scenarios drawn from `ranges`; half of them use a′ = a.
pub fn sweep<R: Rng>(
    k: &PhysicalConstants<f64>,
    n: usize,
    ranges: &SweepRanges,
    rng: &mut R,
) -> Result<Vec<(ProbeScenario<f64>, DetectabilityReport<f64>)>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let model = if rng.random::<bool>() { KernelKind::Grwp } else { KernelKind::Dggr };
        let radius = log_uniform(rng, ranges.radius);
        let density = log_uniform(rng, ranges.density);
        let a = log_uniform(rng, ranges.a);
        let v = log_uniform(rng, ranges.speed_fraction) * k.c;
        let mut s = ProbeScenario::from_density_radius(density, radius, v, a, model)?;
        if rng.random::<bool>() {
            s = s.with_a_prime(a * log_uniform(rng, ranges.a_prime_ratio))?;
        }
        let report = evaluate(&s, k)?;
        out.push((s, report));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k() -> PhysicalConstants<f64> {
        PhysicalConstants::cgs()
    }

    #[test]
    fn compact_source_with_equal_smearing_never_detectable() {
        let k = k();
        for model in [KernelKind::Grwp, KernelKind::Dggr] {
            let s = ProbeScenario::from_density_radius(1.0, 1e-6, 1e3, 1e-5, model).unwrap();
            let r = evaluate(&s, &k).unwrap();
            assert_eq!(r.regime, Regime::Compact);
            assert!(!r.scaling.necessary_window.is_open());
            assert!(!r.detectable);
        }
    }

    #[test]
    fn extended_dggr_never_detectable() {
        let k = k();
        for radius in [1e-4, 1.0, 1e3] {
            let s = ProbeScenario::from_density_radius(5.0, radius, 1e-3, 1e-5, KernelKind::Dggr).unwrap();
            let r = evaluate(&s, &k).unwrap();
            assert!(r.good_measurement.holds());
            assert!(!r.detectable, "R = {radius}");
        }
    }

    #[test]
    fn extended_grwp_centimetre_source_detectable() {
        let k = k();
        let s = ProbeScenario::from_density_radius(1.0, 1.0, 1e3, 1e-5, KernelKind::Grwp).unwrap();
        let r = evaluate(&s, &k).unwrap();
        assert!(r.detectable);
        // window runs from R to R³/a² up to the sphere factor
        let w = r.scaling.necessary_window;
        assert_eq!(w.lower, 1.0);
        assert!((w.upper / (4.0 * std::f64::consts::PI / 3.0 * 1e10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn necessary_upper_matches_generic_form() {
        // c (M/μ)² τ, with τ from the scaling collapse rate
        let k = k().with_derived_planck_units();
        for (radius, model) in [(1e-7, KernelKind::Grwp), (1e-2, KernelKind::Grwp), (1e-2, KernelKind::Dggr)] {
            let s = ProbeScenario::from_density_radius(3.0, radius, 1.0, 1e-5, model).unwrap();
            let r = evaluate(&s, &k).unwrap();
            let generic = k.c * (s.mass / k.planck_mass).powi(2) * r.scaling.collapse_time;
            assert!((r.scaling.necessary_window.upper / generic - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn light_fast_probe_fails_good_measurement() {
        let k = k();
        let m = 1e-20;
        let ineq = min_probe_mass_condition(&k, m, 1e5);
        assert!(!ineq.holds());
        assert!(min_probe_mass_condition(&k, 1.0, 1e5).holds());
    }

    #[test]
    fn fixed_separation_mode() {
        let k = k();
        let s = ProbeScenario::from_density_radius(1.0, 1.0, 1e3, 1e-5, KernelKind::Grwp).unwrap();
        let inside = evaluate(&s.with_separation(0.5).unwrap(), &k).unwrap();
        assert_eq!(inside.detectable_at_z, Some(false));
        assert!(!inside.geometric.holds());
        let outside = evaluate(&s.with_separation(10.0).unwrap(), &k).unwrap();
        assert_eq!(outside.detectable_at_z, Some(outside.collapse_slower_than_probe.holds()));
        assert!(outside.geometric.holds());
    }

    #[test]
    fn model_derived_strengths_shift_margins() {
        let k = k();
        let s = ProbeScenario::from_density_radius(1.0, 1.0, 1e3, 1e-5, KernelKind::Grwp).unwrap();
        let r = evaluate(&s, &k).unwrap();
        let ratio = r.model_derived.collapse_rate / r.scaling.collapse_rate;
        assert!((ratio - 4.0 * std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-12);
        let s = s.with_a_prime(1e-5).unwrap();
        let s = ProbeScenario { model: KernelKind::Dggr, ..s };
        let r = evaluate(&s, &k).unwrap();
        assert!((r.model_derived.collapse_rate / r.scaling.collapse_rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superluminal_probe_rejected() {
        let k = k();
        let s = ProbeScenario::from_density_radius(1.0, 1.0, 4e10, 1e-5, KernelKind::Grwp).unwrap();
        assert!(evaluate(&s, &k).is_err());
    }

    #[test]
    fn verdicts_invariant_under_unit_rescaling() {
        // cm → m: lengths ×1e-2, and each constant converted accordingly
        let k = k();
        let mut km = k;
        km.g *= 1e-6;
        km.hbar *= 1e-4;
        km.c *= 1e-2;
        km.planck_length *= 1e-2;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = sweep(&k, 500, &SweepRanges::default(), &mut rng).unwrap();
        for (s, r) in cases {
            let sm = ProbeScenario {
                radius: s.radius * 1e-2,
                density: s.density * 1e6,
                v_probe: s.v_probe * 1e-2,
                a: s.a * 1e-2,
                a_prime: s.a_prime * 1e-2,
                ..s
            };
            let rm = evaluate(&sm, &km).unwrap();
            assert_eq!(r.detectable, rm.detectable);
            assert_eq!(r.good_measurement.holds(), rm.good_measurement.holds());
            let m1 = r.scaling.necessary_window.ratio();
            let m2 = rm.scaling.necessary_window.ratio();
            assert!((m1 / m2 - 1.0).abs() < 1e-9);
            assert!((r.scaling.collapse_time / rm.scaling.collapse_time - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn f32_evaluation_in_natural_units() {
        let k = PhysicalConstants::<f32> {
            g: 1.0,
            hbar: 1.0,
            c: 1.0,
            planck_mass: 1.0,
            planck_time: 1.0,
            planck_length: 1.0,
            nucleon_mass: 1e-3,
        };
        let s = ProbeScenario::from_density_radius(1.0f32, 10.0, 0.1, 1.0, KernelKind::Grwp).unwrap();
        let r = evaluate(&s, &k).unwrap();
        assert!(r.detectable);
    }
}
