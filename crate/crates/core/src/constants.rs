//! Physical constants in CGS units with explicit ħ.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};
use crate::num::Real;
use crate::quantity::{Dimension, Quantity};

/// Fundamental constants used throughout the crate.
///
/// The defaults are CODATA 2018 values. The planck quantities are stored
/// rather than derived so that a perturbed set (for sensitivity studies) can be
/// checked for internal consistency with [`PhysicalConstants::consistency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    /// Newton's constant, cm³ g⁻¹ s⁻².
    pub g: T,
    /// Reduced Planck constant, erg s.
    pub hbar: T,
    /// Speed of light, cm/s.
    pub c: T,
    /// Planck mass μ, g.
    pub planck_mass: T,
    /// Planck time, s.
    pub planck_time: T,
    /// Planck length, cm.
    pub planck_length: T,
    /// Nucleon mass, g. Taken to be the proton mass.
    pub nucleon_mass: T,
}

impl PhysicalConstants<f64> {
    pub const CGS: PhysicalConstants<f64> = PhysicalConstants {
        g: 6.674_30e-8,
        hbar: 1.054_571_817e-27,
        c: 2.997_924_58e10,
        planck_mass: 2.176_434e-5,
        planck_time: 5.391_247e-44,
        planck_length: 1.616_255e-33,
        nucleon_mass: 1.672_621_923_69e-24,
    };
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::cgs()
    }
}

/// Relative deviations of the stored planck quantities from their defining
/// relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consistency<T> {
    /// |μ − √(ħc/G)| / μ
    pub planck_mass: T,
    /// |t_P − ħ/(μc²)| / t_P
    pub planck_time: T,
    /// |l_P − c t_P| / l_P
    pub planck_length: T,
}

impl<T: Real> Consistency<T> {
    pub fn max(&self) -> T {
        self.planck_mass.max(self.planck_time).max(self.planck_length)
    }
}

impl<T: Real> PhysicalConstants<T> {
    pub fn cgs() -> Self {
        let k = PhysicalConstants::CGS;
        PhysicalConstants {
            g: T::lit(k.g),
            hbar: T::lit(k.hbar),
            c: T::lit(k.c),
            planck_mass: T::lit(k.planck_mass),
            planck_time: T::lit(k.planck_time),
            planck_length: T::lit(k.planck_length),
            nucleon_mass: T::lit(k.nucleon_mass),
        }
    }

    /// Re-derive the planck quantities from (G, ħ, c).
    pub fn with_derived_planck_units(mut self) -> Self {
        self.planck_mass = (self.hbar * self.c / self.g).sqrt();
        self.planck_time = self.hbar / (self.planck_mass * self.c * self.c);
        self.planck_length = self.planck_time * self.c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("G", self.g),
            ("hbar", self.hbar),
            ("c", self.c),
            ("planck_mass", self.planck_mass),
            ("planck_time", self.planck_time),
            ("planck_length", self.planck_length),
            ("nucleon_mass", self.nucleon_mass),
        ] {
            ensure_positive(name, v.to_f64_lossy())?;
        }
        Ok(())
    }

    pub fn consistency(&self) -> Consistency<T> {
        let mu = (self.hbar * self.c / self.g).sqrt();
        let tp = self.hbar / (self.planck_mass * self.c * self.c);
        let lp = self.c * self.planck_time;
        Consistency {
            planck_mass: ((self.planck_mass - mu) / self.planck_mass).abs(),
            planck_time: ((self.planck_time - tp) / self.planck_time).abs(),
            planck_length: ((self.planck_length - lp) / self.planck_length).abs(),
        }
    }

    /// Reduced compton wavelength ħ/(mc).
    pub fn compton_length(&self, mass: T) -> T {
        self.hbar / (mass * self.c)
    }

    pub fn g_q(&self) -> Quantity<T> {
        Quantity::new(self.g, Dimension::GRAVITATIONAL).expect("finite constant")
    }

    pub fn hbar_q(&self) -> Quantity<T> {
        Quantity::new(self.hbar, Dimension::ACTION).expect("finite constant")
    }

    pub fn c_q(&self) -> Quantity<T> {
        Quantity::new(self.c, Dimension::VELOCITY).expect("finite constant")
    }

    pub fn planck_mass_q(&self) -> Quantity<T> {
        Quantity::new(self.planck_mass, Dimension::MASS).expect("finite constant")
    }

    pub fn planck_time_q(&self) -> Quantity<T> {
        Quantity::new(self.planck_time, Dimension::TIME).expect("finite constant")
    }

    pub fn nucleon_mass_q(&self) -> Quantity<T> {
        Quantity::new(self.nucleon_mass, Dimension::MASS).expect("finite constant")
    }
}
