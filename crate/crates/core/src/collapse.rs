//! Collapse parameters (a, λ) and the two standard noise kernels.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::num::{pow3_2, Real};
use crate::quadrature::{integrate_semi_infinite, Tolerance};

/// Which correlation kernel G⁻¹ is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// G⁻¹(x − x′) = γ δ(x − x′)
    Grwp,
    /// G⁻¹(x − x′) = γ′ / |x − x′|
    Dggr,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Grwp => "GRWP",
            KernelKind::Dggr => "DGGR",
        }
    }
}

/// A kernel together with its strength: γ (cm³ s⁻¹ g⁻²) for GRWP, γ′
/// (cm s⁻¹ g⁻²) for DGGR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelModel<T> {
    Grwp { gamma: T },
    Dggr { gamma_prime: T },
}

impl<T: Real> KernelModel<T> {
    pub fn new(kind: KernelKind, strength: T) -> Result<Self> {
        ensure_positive("kernel strength", strength.to_f64_lossy())?;
        Ok(match kind {
            KernelKind::Grwp => KernelModel::Grwp { gamma: strength },
            KernelKind::Dggr => KernelModel::Dggr { gamma_prime: strength },
        })
    }

    /// Kernel whose single-particle rate for mass `m` at smearing `a` is `lambda`.
    pub fn from_rate(kind: KernelKind, lambda: T, m: T, a: T) -> Result<Self> {
        ensure_positive("lambda", lambda.to_f64_lossy())?;
        Self::new(kind, gamma_from_lambda(kind, lambda, m, a)?)
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelModel::Grwp { .. } => KernelKind::Grwp,
            KernelModel::Dggr { .. } => KernelKind::Dggr,
        }
    }

    pub fn strength(&self) -> T {
        match *self {
            KernelModel::Grwp { gamma } => gamma,
            KernelModel::Dggr { gamma_prime } => gamma_prime,
        }
    }

    /// Single-particle collapse rate λ(m) at smearing `a`.
    pub fn rate(&self, m: T, a: T) -> T {
        lambda_closed_form(self.kind(), self.strength(), m, a)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("kernel strength", self.strength().to_f64_lossy())
    }
}

/// The pair (a, λ_ref at m_ref); λ at any other mass follows the m² law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams<T> {
    /// Localization length, cm.
    pub a: T,
    /// Rate at the reference mass, s⁻¹.
    pub lambda_ref: T,
    /// Reference mass, g.
    pub m_ref: T,
}

impl<T: Real> CollapseParams<T> {
    pub fn new(a: T, lambda_ref: T, m_ref: T) -> Result<Self> {
        ensure_positive("a", a.to_f64_lossy())?;
        ensure_non_negative("lambda_ref", lambda_ref.to_f64_lossy())?;
        ensure_positive("m_ref", m_ref.to_f64_lossy())?;
        Ok(CollapseParams { a, lambda_ref, m_ref })
    }

    /// λ(m) = λ_ref (m / m_ref)².
    pub fn lambda(&self, m: T) -> T {
        let r = m / self.m_ref;
        self.lambda_ref * r * r
    }

    pub fn kernel(&self, kind: KernelKind) -> Result<KernelModel<T>> {
        KernelModel::new(kind, gamma_from_lambda(kind, self.lambda_ref, self.m_ref, self.a)?)
    }
}

fn check_rate_inputs<T: Real>(m: T, a: T) -> Result<()> {
    if m == T::zero() {
        return Err(Error::InvalidParameter { name: "m", reason: "zero mass".into() });
    }
    ensure_positive("m", m.to_f64_lossy())?;
    ensure_positive("a", a.to_f64_lossy())
}

/// GRWP: λ = m²γ/((4π)^{3/2} a³); DGGR: λ = m²γ′/(3√π a).
pub fn lambda_closed_form<T: Real>(kind: KernelKind, strength: T, m: T, a: T) -> T {
    let pi = T::PI();
    match kind {
        KernelKind::Grwp => m * m * strength / (pow3_2(T::lit(4.0) * pi) * a * a * a),
        KernelKind::Dggr => m * m * strength / (T::lit(3.0) * pi.sqrt() * a),
    }
}

/// Kernel strength giving single-particle rate `lambda` for mass `m`:
/// γ = λ (4π)^{3/2} a³ / m² or γ′ = 3√π a λ / m².
pub fn gamma_from_lambda<T: Real>(kind: KernelKind, lambda: T, m: T, a: T) -> Result<T> {
    check_rate_inputs(m, a)?;
    ensure_non_negative("lambda", lambda.to_f64_lossy())?;
    let pi = T::PI();
    Ok(match kind {
        KernelKind::Grwp => lambda * pow3_2(T::lit(4.0) * pi) * a * a * a / (m * m),
        KernelKind::Dggr => T::lit(3.0) * pi.sqrt() * a * lambda / (m * m),
    })
}

pub fn lambda_from_gamma<T: Real>(kind: KernelKind, strength: T, m: T, a: T) -> Result<T> {
    check_rate_inputs(m, a)?;
    ensure_non_negative("kernel strength", strength.to_f64_lossy())?;
    Ok(lambda_closed_form(kind, strength, m, a))
}

/// Single-particle rate for an arbitrary isotropic kernel given through its
/// Fourier transform G̃⁻¹(k²):
///
/// λ = 2m²a² / (3(2π)^{3/2}) · 4π ∫₀^∞ dk k⁴ e^{−a²k²} G̃⁻¹(k²).
///
/// The radial integral is done in the scaled variable u = a k.
pub fn lambda_general<T: Real, F>(g_inverse_fourier: F, m: T, a: T, tol: Tolerance) -> Result<T>
where
    F: Fn(T) -> T,
{
    check_rate_inputs(m, a)?;
    let integral = integrate_semi_infinite(
        |u: T| {
            let k = u / a;
            let u2 = u * u;
            u2 * u2 * (-u2).exp() * g_inverse_fourier(k * k)
        },
        tol,
    )?;
    // dk k^4 = du u^4 / a^5
    let radial = integral.value / (a * a * a * a * a);
    let two_pi = T::lit(2.0) * T::PI();
    let prefactor = T::lit(2.0) * m * m * a * a / (T::lit(3.0) * pow3_2(two_pi));
    Ok(prefactor * T::lit(4.0) * T::PI() * radial)
}
