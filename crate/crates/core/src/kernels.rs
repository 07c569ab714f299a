//! Correlation kernels, pair-decay functions Φ, pointer collapse rates and
//! the mean energy-production rate.
//!
//! Fourier transforms use the symmetric convention
//! f̃(k) = (2π)^{-3/2} ∫ d³x e^{-ik·x} f(x), under which G̃ G̃⁻¹ (2π)³ = 1.
//! Delta-function kernels are never evaluated pointwise in position space:
//! everything positional goes through the smeared Φ.

use crate::collapse::KernelModel;
use crate::error::{Error, Result};
use crate::num::{pow3_2, Real};

/// G⁻¹ and its inverse G for one kernel, in Fourier space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair<T> {
    pub model: KernelModel<T>,
}

impl<T: Real> KernelPair<T> {
    pub fn new(model: KernelModel<T>) -> Self {
        KernelPair { model }
    }

    /// G̃⁻¹(k²): γ/(2π)^{3/2} or (2/π)^{1/2} γ′/k².
    pub fn g_inverse_fourier(&self, k2: T) -> T {
        match self.model {
            KernelModel::Grwp { gamma } => gamma / pow3_2(T::lit(2.0) * T::PI()),
            KernelModel::Dggr { gamma_prime } => (T::lit(2.0) / T::PI()).sqrt() * gamma_prime / k2,
        }
    }

    /// G̃(k²): 1/(γ(2π)^{3/2}) or k²/(4πγ′(2π)^{3/2}).
    pub fn g_fourier(&self, k2: T) -> T {
        let norm = pow3_2(T::lit(2.0) * T::PI());
        match self.model {
            KernelModel::Grwp { gamma } => T::one() / (gamma * norm),
            KernelModel::Dggr { gamma_prime } => k2 / (T::lit(4.0) * T::PI() * gamma_prime * norm),
        }
    }
}

/// Φ(r) for a fixed pair of masses and smearing length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFunction<T> {
    pub model: KernelModel<T>,
    pub a: T,
    pub m_i: T,
    pub m_j: T,
}

impl<T: Real> PhiFunction<T> {
    pub fn new(model: KernelModel<T>, a: T, m_i: T, m_j: T) -> Self {
        PhiFunction { model, a, m_i, m_j }
    }

    pub fn eval(&self, r: T) -> Result<T> {
        phi_pair(&self.model, self.m_i, self.m_j, self.a, r)
    }
}

/// (1/r) ∫₀^r e^{−z²/4a²} dz, with the removable singularity at r = 0
/// handled by its Taylor series.
pub fn smeared_inverse_distance_profile<T: Real>(r: T, a: T) -> T {
    let x = r / a;
    if x < T::lit(1e-6) {
        let x2 = x * x;
        T::one() - x2 / T::lit(12.0) + x2 * x2 / T::lit(160.0)
    } else {
        a * T::PI().sqrt() * (r / (T::lit(2.0) * a)).erf() / r
    }
}

/// Pair-decay function Φ(r) for particles of mass m_i, m_j at separation r.
///
/// GRWP: γ m_i m_j (4πa²)^{-3/2} e^{−r²/4a²}.
/// DGGR: γ′ m_i m_j/(a√π) · (1/r)∫₀^r e^{−z²/4a²} dz.
pub fn phi_pair<T: Real>(model: &KernelModel<T>, m_i: T, m_j: T, a: T, r: T) -> Result<T> {
    if !(r >= T::zero()) {
        return Err(Error::InvalidParameter { name: "r", reason: format!("separation must be non-negative, got {r}") });
    }
    let four = T::lit(4.0);
    Ok(match *model {
        KernelModel::Grwp { gamma } => {
            gamma * m_i * m_j / pow3_2(four * T::PI() * a * a) * (-(r * r) / (four * a * a)).exp()
        }
        KernelModel::Dggr { gamma_prime } => {
            gamma_prime * m_i * m_j / (a * T::PI().sqrt()) * smeared_inverse_distance_profile(r, a)
        }
    })
}

fn distance<T: Real>(x: &[T; 3], y: &[T; 3]) -> T {
    let d0 = x[0] - y[0];
    let d1 = x[1] - y[1];
    let d2 = x[2] - y[2];
    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
}

/// Decay rate of the position-basis element ⟨x|ρ|x′⟩ under the collapse
/// term alone:
///
/// ½ Σᵢ Σⱼ [Φ(xᵢ − xⱼ) + Φ(x′ᵢ − x′ⱼ) − 2Φ(xᵢ − x′ⱼ)].
pub fn off_diagonal_rate<T: Real>(
    model: &KernelModel<T>,
    a: T,
    masses: &[T],
    x: &[[T; 3]],
    x_prime: &[[T; 3]],
) -> Result<T> {
    if masses.len() != x.len() || x.len() != x_prime.len() {
        return Err(Error::Shape(format!(
            "{} masses, {} positions x, {} positions x'",
            masses.len(),
            x.len(),
            x_prime.len()
        )));
    }
    let mut total = T::zero();
    for i in 0..masses.len() {
        for j in 0..masses.len() {
            let (mi, mj) = (masses[i], masses[j]);
            total = total + phi_pair(model, mi, mj, a, distance(&x[i], &x[j]))?
                + phi_pair(model, mi, mj, a, distance(&x_prime[i], &x_prime[j]))?
                - T::lit(2.0) * phi_pair(model, mi, mj, a, distance(&x[i], &x_prime[j]))?;
        }
    }
    Ok(total / T::lit(2.0))
}

/// An order-of-magnitude estimate. Only ratios and scalings are meaningful;
/// the bare value has to be asked for explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderOfMagnitude<T>(T);

impl<T: Real> OrderOfMagnitude<T> {
    pub fn new(value: T) -> Self {
        OrderOfMagnitude(value)
    }

    pub fn bare_value(&self) -> T {
        self.0
    }

    pub fn ratio(&self, other: &Self) -> T {
        self.0 / other.0
    }

    pub fn scale(self, factor: T) -> Self {
        OrderOfMagnitude(self.0 * factor)
    }

    pub fn is_order_of_magnitude(&self) -> bool {
        true
    }
}

/// Collapse rate of a pointer of total mass `total_mass`, density `density`
/// and size `size`, superposed over a distance much larger than `a` and
/// `size`.
///
/// GRWP: γM²/a³ (L < a), γMD (L ≥ a). DGGR: γ′M²/a (L < a), γ′M²/L (L ≥ a).
pub fn pointer_collapse_rate<T: Real>(
    model: &KernelModel<T>,
    total_mass: T,
    density: T,
    size: T,
    a: T,
) -> OrderOfMagnitude<T> {
    let m2 = total_mass * total_mass;
    let v = match *model {
        KernelModel::Grwp { gamma } if size < a => gamma * m2 / (a * a * a),
        KernelModel::Grwp { gamma } => gamma * total_mass * density,
        KernelModel::Dggr { gamma_prime } if size < a => gamma_prime * m2 / a,
        KernelModel::Dggr { gamma_prime } => gamma_prime * m2 / size,
    };
    OrderOfMagnitude(v)
}

/// Mean rate of energy increase Σⱼ 3ħ²λⱼ/(4 mⱼ a²), for particles given as
/// (mass, λ) pairs. Takes no state: the rate does not depend on it.
pub fn energy_gain_rate<T: Real>(particles: &[(T, T)], a: T, hbar: T) -> T {
    particles
        .iter()
        .fold(T::zero(), |acc, &(m, lambda)| acc + T::lit(3.0) * hbar * hbar * lambda / (T::lit(4.0) * m * a * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::{lambda_closed_form, KernelKind};
    use crate::constants::PhysicalConstants;
    use crate::quadrature::{integrate, Tolerance};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    const A: f64 = 1e-5;

    fn grwp() -> KernelModel<f64> {
        KernelModel::Grwp { gamma: 2.5e30 }
    }

    fn dggr() -> KernelModel<f64> {
        KernelModel::Dggr { gamma_prime: 3.1e19 }
    }

    #[test]
    fn fourier_pair_is_reciprocal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for model in [grwp(), dggr()] {
            let pair = KernelPair::new(model);
            for _ in 0..1_000_000 {
                let k = 10f64.powf(rng.random_range(-3.0..3.0)) / A;
                let k2 = k * k;
                let gi = pair.g_inverse_fourier(k2);
                let g = pair.g_fourier(k2);
                assert!(gi > 0.0 && g > 0.0);
                let prod = g * gi * (2.0 * std::f64::consts::PI).powi(3);
                assert!((prod - 1.0).abs() < 1e-12, "{prod}");
            }
        }
    }

    #[test]
    fn grwp_phi_at_origin() {
        let (mi, mj) = (1.0e-24, 2.0e-24);
        let phi = phi_pair(&grwp(), mi, mj, A, 0.0).unwrap();
        let expected = 2.5e30 * mi * mj / (4.0 * std::f64::consts::PI * A * A).powf(1.5);
        assert!((phi / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dggr_phi_limits() {
        let (mi, mj) = (1.0e-24, 1.0e-24);
        let bracket = 3.1e19 * mi * mj / (A * std::f64::consts::PI.sqrt());
        let at0 = phi_pair(&dggr(), mi, mj, A, 0.0).unwrap();
        assert!((at0 / bracket - 1.0).abs() < 1e-15);
        // series and erf branches agree across the switch point
        let below = phi_pair(&dggr(), mi, mj, A, 0.999e-6 * A).unwrap();
        let above = phi_pair(&dggr(), mi, mj, A, 1.001e-6 * A).unwrap();
        assert!((below / above - 1.0).abs() < 1e-12);
        let far = phi_pair(&dggr(), mi, mj, A, 100.0 * A).unwrap();
        let newtonian = 3.1e19 * mi * mj / (100.0 * A);
        assert!((far / newtonian - 1.0).abs() < 1e-3);
    }

    #[test]
    fn dggr_phi_matches_direct_quadrature() {
        // oracle: integrate e^{-z²/4a²} on [0, r] directly
        for r in [1e-3 * A, 0.3 * A, A, 2.0 * A, 17.0 * A] {
            let integral =
                integrate(|z: f64| (-z * z / (4.0 * A * A)).exp(), 0.0, r, Tolerance::default()).unwrap().value;
            let oracle = 3.1e19 / (A * std::f64::consts::PI.sqrt()) * integral / r;
            let phi = phi_pair(&dggr(), 1.0, 1.0, A, r).unwrap();
            assert!((phi / oracle - 1.0).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn negative_separation_rejected() {
        assert!(phi_pair(&grwp(), 1.0, 1.0, A, -1.0).is_err());
        assert!(phi_pair(&grwp(), 1.0, 1.0, A, f64::NAN).is_err());
    }

    #[test]
    fn phi_positive_and_monotone_on_log_grid() {
        for model in [grwp(), dggr()] {
            let mut prev = f64::INFINITY;
            for i in 0..=600 {
                let r = A * 10f64.powf(-3.0 + 6.0 * i as f64 / 600.0);
                let phi = phi_pair(&model, 1.0, 1.0, A, r).unwrap();
                // GRWP underflows to zero far out; positivity is asserted where representable
                if r < 50.0 * A {
                    assert!(phi > 0.0);
                }
                assert!(phi <= prev, "{model:?} not monotone at r = {r}");
                prev = phi;
            }
        }
    }

    #[test]
    fn off_diagonal_rate_vanishes_on_diagonal() {
        let x = [[0.0, 0.0, 0.0], [3e-5, 1e-5, 0.0], [-2e-5, 4e-6, 7e-6]];
        let m = [1.0e-24, 2.0e-24, 3.0e-24];
        for model in [grwp(), dggr()] {
            assert_eq!(off_diagonal_rate(&model, A, &m, &x, &x).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_particle_far_separation_saturates_at_lambda() {
        // oracle: Eq. (3.3a) in Eq. (3.2) with one particle gives Φ(0) − Φ(d) → Φ(0) = λ
        let m = 1.67e-24;
        let rate =
            off_diagonal_rate(&grwp(), A, &[m], &[[0.0; 3]], &[[100.0 * A, 0.0, 0.0]]).unwrap();
        let lambda = lambda_closed_form(KernelKind::Grwp, 2.5e30, m, A);
        assert!((rate / lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_particle_small_separation_is_quadratic() {
        // Taylor oracle: Φ(0) − Φ(d) ≈ Φ(0) d²/(4a²)
        let m = 1.0;
        let phi0 = phi_pair(&grwp(), m, m, A, 0.0).unwrap();
        for d in [1e-3 * A, 2e-3 * A] {
            let rate = off_diagonal_rate(&grwp(), A, &[m], &[[0.0; 3]], &[[d, 0.0, 0.0]]).unwrap();
            let taylor = phi0 * d * d / (4.0 * A * A);
            assert!((rate / taylor - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(off_diagonal_rate(&grwp(), A, &[1.0, 1.0], &[[0.0; 3]], &[[0.0; 3]]).is_err());
    }

    #[test]
    fn pointer_rate_branches() {
        let (m, d) = (1e-3, 2.0);
        let g = pointer_collapse_rate(&grwp(), m, d, 0.5 * A, A);
        assert!(g.is_order_of_magnitude());
        assert!((g.bare_value() / (2.5e30 * m * m / A.powi(3)) - 1.0).abs() < 1e-14);
        let dg = pointer_collapse_rate(&dggr(), m, d, 10.0 * A, A);
        assert!((dg.bare_value() / (3.1e19 * m * m / (10.0 * A)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pointer_rate_continuous_at_l_equals_a_for_cube() {
        // oracle: M = D L³ at L = a makes the two GRWP branches coincide
        let d = 1.3;
        for model in [grwp(), dggr()] {
            let m = d * A.powi(3);
            let below = pointer_collapse_rate(&model, m, d, A * (1.0 - 1e-12), A);
            let at = pointer_collapse_rate(&model, m, d, A, A);
            let ratio = below.ratio(&at);
            assert!((0.1..=10.0).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn energy_gain_examples() {
        let k = PhysicalConstants::<f64>::cgs();
        let m = k.nucleon_mass;
        let single = energy_gain_rate(&[(m, 1e-16)], 1e-5, k.hbar);
        let expected = 3.0 * k.hbar * k.hbar * 1e-16 / (4.0 * m * 1e-10);
        assert!((single / expected - 1.0).abs() < 1e-14);
        assert_eq!(energy_gain_rate::<f64>(&[], 1e-5, k.hbar), 0.0);
        let many = energy_gain_rate(&vec![(m, 1e-16); 7], 1e-5, k.hbar);
        assert!((many / (7.0 * single) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn off_diagonal_rate_non_negative(
            xs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 1..4),
            shift in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
            grwp_kind in any::<bool>(),
        ) {
            let x: Vec<[f64; 3]> = xs.iter().map(|&(a, b, c)| [a * A, b * A, c * A]).collect();
            let xp: Vec<[f64; 3]> = xs.iter().enumerate()
                .map(|(i, &(a, b, c))| [a * A + shift.0 * A * i as f64, b * A + shift.1 * A, c * A - shift.2 * A])
                .collect();
            let m = vec![1.0; x.len()];
            let model = if grwp_kind { grwp() } else { dggr() };
            let rate = off_diagonal_rate(&model, A, &m, &x, &xp).unwrap();
            let scale = phi_pair(&model, 1.0, 1.0, A, 0.0).unwrap();
            prop_assert!(rate >= -1e-12 * scale);
        }
    }
}
