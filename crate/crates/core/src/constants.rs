//! Versioned registry of physical constants, stored as TOML.
//!
//! Each entry has a name, a value, a unit string and a source note. Units
//! are frequency units (`s^-1`, `kHz`, `MHz`, `GHz`), optionally per tesla
//! (`MHz T^-1`); they are converted to plain s⁻¹ (per tesla) on lookup.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::donor::DonorParams;
use crate::error::{Error, Result};

/// Environment variable naming an alternative registry file.
pub const CONSTANTS_ENV: &str = "SPINPREP_CONSTANTS";

const BUILTIN: &str = include_str!("../data/constants.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: f64,
    pub unit: String,
    #[serde(default)]
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: String,
    #[serde(rename = "constant", default)]
    pub constants: Vec<ConstantEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dimension {
    Frequency,
    FrequencyPerTesla,
}

fn parse_unit(unit: &str) -> Option<(f64, Dimension)> {
    let unit = unit.trim();
    let (base, dim) = match unit.strip_suffix("T^-1").or_else(|| unit.strip_suffix("/T")) {
        Some(b) => (b.trim(), Dimension::FrequencyPerTesla),
        None => (unit, Dimension::Frequency),
    };
    let scale = match base {
        "s^-1" | "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        _ => return None,
    };
    Some((scale, dim))
}

impl Registry {
    /// The registry compiled into the crate.
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN).expect("built-in registry is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let reg: Registry = toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        for c in &reg.constants {
            if parse_unit(&c.unit).is_none() {
                return Err(Error::Registry(format!("unknown unit '{}' for {}", c.unit, c.name)));
            }
            if !c.value.is_finite() {
                return Err(Error::Registry(format!("non-finite value for {}", c.name)));
            }
        }
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Explicit path first, then `$SPINPREP_CONSTANTS`, then the built-in table.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::load(p);
        }
        match std::env::var_os(CONSTANTS_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn entry(&self, name: &str) -> Result<&ConstantEntry> {
        self.constants
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Registry(format!("no constant named '{name}'")))
    }

    fn get(&self, name: &str, want: Dimension) -> Result<f64> {
        let e = self.entry(name)?;
        let (scale, dim) = parse_unit(&e.unit).expect("validated on load");
        if dim != want {
            return Err(Error::Registry(format!("constant '{name}' has unit '{}'", e.unit)));
        }
        Ok(e.value * scale)
    }

    /// Value in s⁻¹.
    pub fn frequency(&self, name: &str) -> Result<f64> {
        self.get(name, Dimension::Frequency)
    }

    /// Value in s⁻¹ T⁻¹.
    pub fn gyromagnetic(&self, name: &str) -> Result<f64> {
        self.get(name, Dimension::FrequencyPerTesla)
    }

    /// Donor parameters stored as `<preset>.gamma_e`, `<preset>.gamma_n`, `<preset>.hyperfine_a`.
    pub fn donor_preset(&self, preset: &str) -> Result<DonorParams> {
        DonorParams::new(
            self.gyromagnetic(&format!("{preset}.gamma_e"))?,
            self.gyromagnetic(&format!("{preset}.gamma_n"))?,
            self.frequency(&format!("{preset}.hyperfine_a"))?,
        )
    }
}
