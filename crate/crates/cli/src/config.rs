//! Run configuration: JSON with dimensioned inputs as `{value, unit}` pairs.

use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use cslgrav::quantity::{Dimension, Quantity};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CliError;

pub trait DimensionTag {
    const DIMENSION: Dimension;
    /// Unit written back into manifests.
    const UNIT: &'static str;
}

macro_rules! tag {
    ($name:ident, $dim:expr, $unit:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;
        impl DimensionTag for $name {
            const DIMENSION: Dimension = $dim;
            const UNIT: &'static str = $unit;
        }
    };
}

tag!(Mass, Dimension::MASS, "g");
tag!(Length, Dimension::LENGTH, "cm");
tag!(Time, Dimension::TIME, "s");
tag!(Rate, Dimension::RATE, "s^-1");
tag!(Velocity, Dimension::VELOCITY, "cm/s");
tag!(Density, Dimension::DENSITY, "g/cm^3");
tag!(Energy, Dimension::ENERGY, "erg");
tag!(Wavenumber, Dimension::new(0, -1, 0), "cm^-1");

/// A CGS value whose unit was checked against `D` while parsing.
pub struct Measured<D> {
    pub value: f64,
    _dim: PhantomData<D>,
}

impl<D> Measured<D> {
    pub fn new(value: f64) -> Self {
        Measured { value, _dim: PhantomData }
    }
}

impl<D> Clone for Measured<D> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<D> Copy for Measured<D> {}

impl<D> PartialEq for Measured<D> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<D: DimensionTag> fmt::Debug for Measured<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.value, D::UNIT)
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawMeasured {
    value: f64,
    unit: String,
}

impl<'de, D: DimensionTag> Deserialize<'de> for Measured<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        let raw = RawMeasured::deserialize(deserializer)?;
        let q = Quantity::with_unit(raw.value, &raw.unit)
            .map_err(|e| de::Error::custom(format!("unit `{}`: {e}", raw.unit)))?;
        let value = q.value_in(D::DIMENSION).map_err(|_| {
            de::Error::custom(format!("unit `{}` has dimension {}, expected {}", raw.unit, q.dimension(), D::DIMENSION))
        })?;
        if !value.is_finite() {
            return Err(de::Error::custom("value is not finite"));
        }
        Ok(Measured::new(value))
    }
}

impl<D: DimensionTag> Serialize for Measured<D> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawMeasured { value: self.value, unit: D::UNIT.to_string() }.serialize(serializer)
    }
}

/// Top level of a config file. Manifests embed the resolved config under
/// `config`, so a manifest can be fed back in.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Option<serde_json::Value>,
}

fn config_error(file: &Path, err: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = err.path().to_string();
    CliError::Config { file: file.display().to_string(), path, message: err.into_inner().to_string() }
}

/// Load a config file, or the `config` section of a manifest.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config {
        file: path.display().to_string(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    let section = match value.get("config") {
        Some(inner) if value.get("tool").is_some() => inner.to_string(),
        _ => text,
    };
    let de = &mut serde_json::Deserializer::from_str(&section);
    serde_path_to_error::deserialize(de).map_err(|e| config_error(path, e))
}

/// Parse a command's parameter block, reporting failures with their field
/// path under `params`.
pub fn parse_params<T: for<'de> Deserialize<'de> + Default>(
    file: &Path,
    params: Option<&serde_json::Value>,
) -> Result<T, CliError> {
    let Some(value) = params else {
        return Ok(T::default());
    };
    let text = value.to_string();
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut err = config_error(file, e);
        if let CliError::Config { path, message, .. } = &mut err {
            *path = if path == "." { "params".into() } else { format!("params.{path}") };
            // positions refer to the re-serialized block, not the file
            if let Some(i) = message.rfind(" at line ") {
                message.truncate(i);
            }
        }
        err
    })
}
