//! CGS dimensioned scalars.
//!
//! A [`Quantity`] is a value paired with integer exponents over gram,
//! centimeter and second. Formulas elsewhere in the crate run on raw scalars;
//! the dimensional tests recompute them with quantities to pin their units.

use std::fmt;
use std::ops::{Div, Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Exponents over (gram, centimeter, second).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dimension {
    pub gram: i8,
    pub centimeter: i8,
    pub second: i8,
}

impl Dimension {
    pub const NONE: Dimension = Dimension::new(0, 0, 0);
    pub const MASS: Dimension = Dimension::new(1, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1);
    pub const RATE: Dimension = Dimension::new(0, 0, -1);
    pub const VELOCITY: Dimension = Dimension::new(0, 1, -1);
    pub const DENSITY: Dimension = Dimension::new(1, -3, 0);
    pub const ENERGY: Dimension = Dimension::new(1, 2, -2);
    pub const POWER: Dimension = Dimension::new(1, 2, -3);
    pub const FORCE: Dimension = Dimension::new(1, 1, -2);
    pub const ACTION: Dimension = Dimension::new(1, 2, -1);
    pub const GRAVITATIONAL: Dimension = Dimension::new(-1, 3, -2);
    /// GRWP strength γ: cm³ s⁻¹ g⁻².
    pub const GRWP_STRENGTH: Dimension = Dimension::new(-2, 3, -1);
    /// DGGR strength γ′: cm s⁻¹ g⁻².
    pub const DGGR_STRENGTH: Dimension = Dimension::new(-2, 1, -1);
    /// P̃ = 𝒫𝒯/ℒ³: s cm⁻³.
    pub const P_TILDE: Dimension = Dimension::new(0, -3, 1);

    pub const fn new(gram: i8, centimeter: i8, second: i8) -> Self {
        Dimension { gram, centimeter, second }
    }

    pub fn is_dimensionless(self) -> bool {
        self == Self::NONE
    }

    pub fn powi(self, n: i8) -> Self {
        Dimension::new(self.gram * n, self.centimeter * n, self.second * n)
    }

    pub fn inverse(self) -> Self {
        self.powi(-1)
    }

    pub fn sqrt(self) -> Result<Self> {
        if self.gram % 2 != 0 || self.centimeter % 2 != 0 || self.second % 2 != 0 {
            return Err(Error::OddRoot(self));
        }
        Ok(Dimension::new(self.gram / 2, self.centimeter / 2, self.second / 2))
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        Dimension::new(self.gram + rhs.gram, self.centimeter + rhs.centimeter, self.second + rhs.second)
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Dimension) -> Dimension {
        self * rhs.inverse()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (sym, exp) in [("g", self.gram), ("cm", self.centimeter), ("s", self.second)] {
            match exp {
                0 => {}
                1 => parts.push(sym.to_string()),
                e => parts.push(format!("{sym}^{e}")),
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// Parses unit strings such as `g/cm^3`, `cm^3 g^-1 s^-2`, `1/s`, `erg*s`.
///
/// Recognised symbols: `g`, `cm`, `s`, `erg`, `dyn` and the literal `1`.
/// Factors are separated by whitespace, `*` or `·`; every factor after a `/`
/// is inverted. Exponents use `^n` or unicode superscripts.
impl FromStr for Dimension {
    type Err = Error;

    fn from_str(unit: &str) -> Result<Self> {
        let trimmed = unit.trim();
        if trimmed.is_empty() {
            return Err(Error::MalformedUnit(unit.to_string()));
        }
        let mut dim = Dimension::NONE;
        for (k, segment) in trimmed.split('/').enumerate() {
            let factors: Vec<&str> =
                segment.split(|c: char| c.is_whitespace() || c == '*' || c == '·').filter(|t| !t.is_empty()).collect();
            if factors.is_empty() {
                return Err(Error::MalformedUnit(unit.to_string()));
            }
            for factor in factors {
                let d = parse_factor(factor, unit)?;
                dim = if k == 0 { dim * d } else { dim / d };
            }
        }
        Ok(dim)
    }
}

fn parse_factor(factor: &str, whole: &str) -> Result<Dimension> {
    let (symbol, exponent) = split_exponent(factor).ok_or_else(|| Error::MalformedUnit(whole.to_string()))?;
    let base = match symbol {
        "1" => Dimension::NONE,
        "g" => Dimension::MASS,
        "cm" => Dimension::LENGTH,
        "s" | "sec" => Dimension::TIME,
        "erg" => Dimension::ENERGY,
        "dyn" => Dimension::FORCE,
        other => return Err(Error::UnknownUnit(other.to_string())),
    };
    Ok(base.powi(exponent))
}

fn split_exponent(factor: &str) -> Option<(&str, i8)> {
    if let Some((sym, exp)) = factor.split_once('^') {
        let e: i8 = exp.trim_start_matches('+').parse().ok()?;
        return (!sym.is_empty()).then_some((sym, e));
    }
    let idx = factor.find(|c: char| "⁻⁰¹²³⁴⁵⁶⁷⁸⁹".contains(c));
    match idx {
        None => Some((factor, 1)),
        Some(i) => {
            let (sym, sup) = factor.split_at(i);
            let mut negative = false;
            let mut value: i8 = 0;
            for c in sup.chars() {
                match c {
                    '⁻' if value == 0 && !negative => negative = true,
                    _ => {
                        let d = "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|s| s == c)? as i8;
                        value = value.checked_mul(10)?.checked_add(d)?;
                    }
                }
            }
            (!sym.is_empty()).then_some((sym, if negative { -value } else { value }))
        }
    }
}

/// A value carrying CGS dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<T> {
    value: T,
    dim: Dimension,
}

impl<T: Real> Quantity<T> {
    pub fn new(value: T, dim: Dimension) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { context: "quantity construction" });
        }
        Ok(Quantity { value, dim })
    }

    pub fn dimensionless(value: T) -> Result<Self> {
        Self::new(value, Dimension::NONE)
    }

    /// Parse `unit` and attach it to `value`.
    pub fn with_unit(value: T, unit: &str) -> Result<Self> {
        Self::new(value, unit.parse()?)
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    /// The raw value, provided the dimension is the expected one.
    pub fn value_in(&self, expected: Dimension) -> Result<T> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch { expected, found: self.dim });
        }
        Ok(self.value)
    }

    fn finite(value: T, dim: Dimension, context: &'static str) -> Result<Self> {
        if value.is_finite() {
            Ok(Quantity { value, dim })
        } else {
            Err(Error::NonFinite { context })
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        Self::finite(self.value + rhs.value, self.dim, "addition")
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        self.try_add(-rhs)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        Self::finite(self.value * rhs.value, self.dim * rhs.dim, "multiplication")
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        Self::finite(self.value / rhs.value, self.dim / rhs.dim, "division")
    }

    pub fn powi(self, n: i8) -> Result<Self> {
        Self::finite(self.value.powi(n as i32), self.dim.powi(n), "power")
    }

    pub fn sqrt(self) -> Result<Self> {
        Self::finite(self.value.sqrt(), self.dim.sqrt()?, "square root")
    }

    pub fn scale(self, factor: T) -> Result<Self> {
        Self::finite(self.value * factor, self.dim, "scaling")
    }
}

impl<T: Real> Neg for Quantity<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Quantity { value: -self.value, dim: self.dim }
    }
}

/// Infallible product; a non-finite result is a bug in the caller.
impl<T: Real> Mul for Quantity<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("finite product")
    }
}

impl<T: Real> Div for Quantity<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.try_div(rhs).expect("finite quotient")
    }
}

impl<T: Real> fmt::Display for Quantity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.value, self.dim)
    }
}
