//! Run records: every subcommand's inputs, outputs and residuals as
//! unit-carrying numbers.
//!
//! Text form, one `key: value unit` per line under three section headers:
//!
//! ```text
//! command: entangle
//! constants_version: 1.0.0
//!
//! [inputs]
//! chi: 0.0000000000000000e0 rad
//!
//! [outputs]
//! bz: 4.1994152333046176e-3 T
//!
//! [residuals]
//! ```
//!
//! Values are written with 17 significant digits, so parsing the text gives
//! back the same `f64`s.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

pub type QuantityMap = IndexMap<String, Quantity>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub inputs: QuantityMap,
    pub outputs: QuantityMap,
    pub residuals: QuantityMap,
    pub constants_version: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Inputs,
    Outputs,
    Residuals,
}

const SECTIONS: [(Section, &str); 3] = [
    (Section::Inputs, "[inputs]"),
    (Section::Outputs, "[outputs]"),
    (Section::Residuals, "[residuals]"),
];

fn put(map: &mut QuantityMap, key: impl Into<String>, value: f64, unit: &str) {
    map.insert(key.into(), Quantity { value, unit: unit.to_string() });
}

impl RunRecord {
    pub fn new(command: &str, constants_version: &str) -> Self {
        Self {
            command: command.to_string(),
            constants_version: constants_version.to_string(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, key: impl Into<String>, value: f64, unit: &str) -> &mut Self {
        put(&mut self.inputs, key, value, unit);
        self
    }

    pub fn output(&mut self, key: impl Into<String>, value: f64, unit: &str) -> &mut Self {
        put(&mut self.outputs, key, value, unit);
        self
    }

    pub fn residual(&mut self, key: impl Into<String>, value: f64, unit: &str) -> &mut Self {
        put(&mut self.residuals, key, value, unit);
        self
    }

    fn section(&self, s: Section) -> &QuantityMap {
        match s {
            Section::Inputs => &self.inputs,
            Section::Outputs => &self.outputs,
            Section::Residuals => &self.residuals,
        }
    }

    fn section_mut(&mut self, s: Section) -> &mut QuantityMap {
        match s {
            Section::Inputs => &mut self.inputs,
            Section::Outputs => &mut self.outputs,
            Section::Residuals => &mut self.residuals,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\nconstants_version: {}\n", self.command, self.constants_version);
        for (s, header) in SECTIONS {
            out.push('\n');
            out.push_str(header);
            out.push('\n');
            for (k, q) in self.section(s) {
                out.push_str(&format!("{k}: {:.16e} {}\n", q.value, q.unit));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut rec = RunRecord::default();
        let mut section = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(&(s, _)) = SECTIONS.iter().find(|(_, h)| *h == line) {
                section = Some(s);
                continue;
            }
            let (key, rest) = line
                .split_once(": ")
                .ok_or_else(|| format!("line {}: expected 'key: value'", n + 1))?;
            match section {
                None => match key {
                    "command" => rec.command = rest.to_string(),
                    "constants_version" => rec.constants_version = rest.to_string(),
                    _ => return Err(format!("line {}: unknown header field '{key}'", n + 1)),
                },
                Some(s) => {
                    let (value, unit) = rest.split_once(' ').unwrap_or((rest, ""));
                    let value: f64 = value
                        .parse()
                        .map_err(|_| format!("line {}: bad number '{value}'", n + 1))?;
                    put(rec.section_mut(s), key, value, unit.trim());
                }
            }
        }
        Ok(rec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.outputs
            .get(key)
            .or_else(|| self.inputs.get(key))
            .or_else(|| self.residuals.get(key))
            .map(|q| q.value)
    }
}
