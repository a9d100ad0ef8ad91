// SPDX-License-Identifier: Apache-2.0

//! Run configuration: built-in defaults, then a preset, then a config file,
//! then `--set` overrides, then explicit flags. Layers are merged as TOML
//! trees and deserialized once, so an unknown key in any layer is an error
//! naming that key.

use std::path::{Path, PathBuf};

use cavent_core::ledger::{Coupling, Ledger, Material, MicrowaveCavity, OpticalCavity, Operating, Solver};
use cavent_core::sweep::{Axis, AxisName, CalibrationSearch, SweepSpec};
use serde::{Deserialize, Serialize};
use toml::Value;

const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../../../presets/fig2.toml")),
    ("fig3", include_str!("../../../presets/fig3.toml")),
    ("fig4", include_str!("../../../presets/fig4.toml")),
    ("fig5", include_str!("../../../presets/fig5.toml")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Inclusive linear grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Linspace {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        if self.points == 0 || !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(format!("bad grid {self:?}"));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| self.start + (self.stop - self.start) * (k as f64 / n))
            .collect())
    }
}

/// One sweep axis, given either as explicit `values` or as a `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: AxisName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Linspace>,
}

impl AxisConfig {
    pub fn to_axis(&self) -> Result<Axis, String> {
        let values = match (&self.values, &self.grid) {
            (Some(v), None) => v.clone(),
            (None, Some(g)) => g.values()?,
            _ => return Err(format!("axis '{}' needs exactly one of `values` or `grid`", self.name)),
        };
        Ok(Axis { name: self.name, values })
    }
}

/// Entanglement sweep. The first axis is the plot abscissa; a second axis,
/// if present, gives one curve per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axes: vec![
                AxisConfig {
                    name: AxisName::DeltaWOverW,
                    values: None,
                    grid: Some(Linspace { start: -1.0, stop: 1.0, points: 201 }),
                },
                AxisConfig {
                    name: AxisName::Temperature,
                    values: Some(vec![80.0, 180.0, 250.0, 273.0, 298.0, 310.0]),
                    grid: None,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub energies_ev: Linspace,
    pub temperatures: Vec<f64>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            energies_ev: Linspace { start: 0.8, stop: 1.6, points: 161 },
            temperatures: vec![80.0, 180.0, 250.0, 273.0, 298.0, 310.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("cavent-out"), plot: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub oc: OpticalCavity,
    pub mw: MicrowaveCavity,
    pub operating: Operating,
    pub material: Material,
    pub coupling: Coupling,
    pub solver: Solver,
    pub sweep: SweepConfig,
    pub spectrum: SpectrumConfig,
    pub calibration: CalibrationSearch,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn ledger(&self) -> Ledger {
        Ledger {
            oc: self.oc,
            mw: self.mw,
            operating: self.operating,
            material: self.material,
            coupling: self.coupling,
            solver: self.solver,
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, String> {
        let axes = self.sweep.axes.iter().map(AxisConfig::to_axis).collect::<Result<_, _>>()?;
        let spec = SweepSpec { base: self.ledger(), axes };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.ledger().validate().map_err(|e| e.to_string())?;
        self.sweep_spec()?;
        self.spectrum.energies_ev.values()?;
        if self.spectrum.temperatures.is_empty() {
            return Err("spectrum.temperatures is empty".into());
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

/// Everything that feeds the resolved config.
#[derive(Debug, Default)]
pub struct Sources<'a> {
    pub preset: Option<&'a str>,
    pub file: Option<&'a Path>,
    pub sets: &'a [String],
}

fn merge(base: &mut Value, layer: Value) {
    match (base, layer) {
        (Value::Table(b), Value::Table(l)) => {
            for (k, v) in l {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, l) => *b = l,
    }
}

fn parse_layer(text: &str, origin: &str) -> Result<Value, String> {
    text.parse::<toml::Table>()
        .map(Value::Table)
        .map_err(|e| format!("{origin}: {e}"))
}

/// `a.b.c=value`; the value is read as TOML and falls back to a bare string.
fn apply_set(root: &mut Value, assignment: &str) -> Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("--set expects key=value, got '{assignment}'"))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("--set: malformed key '{path}'"));
    }
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim().to_string()));
    let mut slot = root;
    for key in &keys[..keys.len() - 1] {
        let table = slot
            .as_table_mut()
            .ok_or_else(|| format!("--set {path}: '{key}' is not a section"))?;
        slot = table
            .entry(key.to_string())
            .or_insert_with(|| Value::Table(toml::Table::new()));
    }
    slot.as_table_mut()
        .ok_or_else(|| format!("--set {path}: parent is not a section"))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

pub fn resolve(sources: &Sources) -> Result<RunConfig, String> {
    let mut tree = Value::try_from(RunConfig::default()).map_err(|e| e.to_string())?;
    if let Some(name) = sources.preset {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| format!("unknown preset '{name}' (known: {})", preset_names().join(", ")))?;
        merge(&mut tree, parse_layer(text, &format!("preset {name}"))?);
    }
    if let Some(path) = sources.file {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        merge(&mut tree, parse_layer(&text, &path.display().to_string())?);
    }
    for s in sources.sets {
        apply_set(&mut tree, s)?;
    }
    let config: RunConfig = tree.try_into().map_err(|e: toml::de::Error| e.to_string())?;
    config.validate()?;
    Ok(config)
}
