// SPDX-License-Identifier: Apache-2.0

//! Per-point pipeline, grid sweeps, CSV output and calibration of the
//! coupling scale.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coventangle::{physicality_check, solve_lyapunov, symplectic_eigenvalue, VERDICT_MARGIN};
use crate::ledger::{Ledger, LEDGER_VERSION};
use crate::lindyn::{complex_drift, diffusion, stability, to_quadrature};
use crate::photodiode::{coupling_rate, photocurrent, SpectrumRow};
use crate::steadystate::{effective_params, solve_steady_state, SystemParams};
use crate::{Error, Result};

/// Relative slack for the trend comparisons on `2 eta` (non-decreasing /
/// non-increasing). Matches the Lyapunov residual bound.
pub const TREND_SLACK: f64 = 1e-9;

/// Resolution at which nearest-miss violations are compared.
pub const VIOLATION_QUANTUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    /// Drift has an eigenvalue with non-negative real part.
    Unstable,
    /// Mean-field iteration exhausted `max_iter`.
    NonConverged,
    /// Stable, but the Lyapunov residual bound could not be met.
    IllConditioned,
    /// Covariance failed the uncertainty relation.
    NonPhysical,
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PointStatus::Ok => "ok",
            PointStatus::Unstable => "unstable",
            PointStatus::NonConverged => "nonconverged",
            PointStatus::IllConditioned => "ill_conditioned",
            PointStatus::NonPhysical => "nonphysical",
        };
        f.write_str(s)
    }
}

/// Everything computed at one operating point. `two_eta` is present exactly
/// when a certified stationary covariance exists (`stable`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub params: SystemParams,
    pub q_oc: f64,
    pub photocurrent: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub linearization_valid: bool,
    pub stable: bool,
    pub marginally_stable: bool,
    pub max_real_part: Option<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub two_eta: Option<f64>,
    pub entangled: Option<bool>,
    pub status: PointStatus,
    pub iterations: usize,
}

/// Runs photodiode -> steady state -> drift -> stability -> covariance ->
/// verdict for the ledger's operating point. Physically unstable or
/// non-converged points come back as flagged results, not errors.
pub fn run_point(ledger: &Ledger) -> Result<PointResult> {
    ledger.validate()?;
    let mat = ledger.material()?;
    let drive = ledger.optical_drive()?;
    let temperature = ledger.operating.temperature;
    let q_oc = coupling_rate(&drive, &mat, temperature, &ledger.bridge()?)?;
    let current = photocurrent(&drive, &mat, temperature, ledger.coupling.n_abs)?;
    let params = ledger.system_params(q_oc)?;

    let mut result = PointResult {
        params,
        q_oc,
        photocurrent: current,
        alpha: Complex64::new(f64::NAN, f64::NAN),
        beta: Complex64::new(f64::NAN, f64::NAN),
        linearization_valid: false,
        stable: false,
        marginally_stable: false,
        max_real_part: None,
        eigenvalues: Vec::new(),
        two_eta: None,
        entangled: None,
        status: PointStatus::NonConverged,
        iterations: 0,
    };

    let state = match solve_steady_state(&params, &ledger.solver_options()) {
        Ok(state) => state,
        Err(Error::NonConvergence { iterations, .. }) => {
            result.iterations = iterations;
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    result.alpha = state.alpha;
    result.beta = state.beta;
    result.iterations = state.iterations;
    result.linearization_valid = state.linearization_valid();

    let eff = effective_params(&state, &params);
    let drift = to_quadrature(&complex_drift(&eff, &params))?;
    let report = stability(&drift)?;
    result.max_real_part = Some(report.max_real_part);
    result.eigenvalues = report.eigenvalues.clone();
    result.marginally_stable = report.marginally_stable;
    if !report.stable {
        result.status = PointStatus::Unstable;
        return Ok(result);
    }

    let cov = match solve_lyapunov(&drift, &diffusion(&params)?) {
        Ok(cov) => cov,
        Err(Error::IllConditioned { .. }) => {
            result.status = PointStatus::IllConditioned;
            return Ok(result);
        }
        Err(Error::NonPhysical(_)) => {
            result.status = PointStatus::NonPhysical;
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    if !physicality_check(&cov).physical {
        result.status = PointStatus::NonPhysical;
        return Ok(result);
    }
    let verdict = match symplectic_eigenvalue(&cov) {
        Ok(v) => v,
        Err(Error::NonPhysical(_)) => {
            result.status = PointStatus::NonPhysical;
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    result.stable = true;
    result.two_eta = Some(verdict.two_eta);
    result.entangled = Some(verdict.entangled);
    result.status = PointStatus::Ok;
    Ok(result)
}

/// Sweepable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "delta_w_over_w")]
    DeltaWOverW,
    #[serde(rename = "delta_c_over_w")]
    DeltaCOverW,
    #[serde(rename = "T")]
    Temperature,
    #[serde(rename = "P_c")]
    PumpPowerOptical,
    #[serde(rename = "P_w")]
    PumpPowerMicrowave,
    #[serde(rename = "photon_energy_ev")]
    PhotonEnergyEv,
    #[serde(rename = "q_scale")]
    QScale,
}

impl AxisName {
    pub const ALL: [AxisName; 7] = [
        AxisName::DeltaWOverW,
        AxisName::DeltaCOverW,
        AxisName::Temperature,
        AxisName::PumpPowerOptical,
        AxisName::PumpPowerMicrowave,
        AxisName::PhotonEnergyEv,
        AxisName::QScale,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::DeltaWOverW => "delta_w_over_w",
            AxisName::DeltaCOverW => "delta_c_over_w",
            AxisName::Temperature => "T",
            AxisName::PumpPowerOptical => "P_c",
            AxisName::PumpPowerMicrowave => "P_w",
            AxisName::PhotonEnergyEv => "photon_energy_ev",
            AxisName::QScale => "q_scale",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            AxisName::DeltaWOverW | AxisName::DeltaCOverW => "1",
            AxisName::Temperature => "K",
            AxisName::PumpPowerOptical | AxisName::PumpPowerMicrowave => "W",
            AxisName::PhotonEnergyEv => "eV",
            AxisName::QScale => "rad/s",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = AxisName::ALL.iter().map(|a| a.as_str()).collect();
                Error::InvalidSpec(format!("unknown axis '{name}' (known: {})", known.join(", ")))
            })
    }

    /// Writes `value` into the matching ledger field.
    pub fn apply(&self, ledger: &mut Ledger, value: f64) {
        match self {
            AxisName::DeltaWOverW => ledger.operating.delta_w_over_w = value,
            AxisName::DeltaCOverW => ledger.operating.delta_c_over_w = value,
            AxisName::Temperature => ledger.operating.temperature = value,
            AxisName::PumpPowerOptical => ledger.oc.pump_power = value,
            AxisName::PumpPowerMicrowave => ledger.mw.pump_power = value,
            AxisName::PhotonEnergyEv => ledger.oc.photon_energy_ev = value,
            AxisName::QScale => ledger.coupling.q_scale = value,
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Ledger,
    pub axes: Vec<Axis>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSpec(format!(
                "a sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::InvalidSpec(format!("axis '{}' given twice", self.axes[0].name)));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::InvalidSpec(format!("axis '{}' has no values", axis.name)));
            }
            if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSpec(format!("axis '{}' has non-finite value {v}", axis.name)));
            }
        }
        self.base.validate()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of grid point `index`; the last axis varies fastest.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = axis.values[rem % axis.values.len()];
            rem /= axis.values.len();
        }
        out
    }

    pub fn ledger_at(&self, index: usize) -> Ledger {
        let mut ledger = self.base;
        for (axis, value) in self.axes.iter().zip(self.coords(index)) {
            axis.name.apply(&mut ledger, value);
        }
        ledger
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub result: PointResult,
}

/// Evaluates every grid point on a pool of `workers` threads. Row order is
/// the grid order whatever the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let eval = |index: usize| -> Result<SweepRow> {
        let coords = spec.coords(index);
        let result = run_point(&spec.ledger_at(index)).map_err(|e| Error::AtGridPoint {
            index,
            coords: spec
                .axes
                .iter()
                .zip(&coords)
                .map(|(a, v)| format!("{}={v}", a.name))
                .collect::<Vec<_>>()
                .join(", "),
            source: Box::new(e),
        })?;
        Ok(SweepRow { coords, result })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    pool.install(|| (0..spec.len()).into_par_iter().map(eval).collect())
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

const RESULT_COLUMNS: [&str; 25] = [
    "oc_omega",
    "oc_kappa",
    "oc_pump_omega",
    "oc_pump_power",
    "mw_omega",
    "mw_kappa",
    "mw_pump_omega",
    "mw_pump_power",
    "delta_c",
    "delta_w",
    "temperature",
    "q_oc",
    "photocurrent",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "linearization_valid",
    "stable",
    "marginally_stable",
    "max_real_part",
    "two_eta",
    "entangled",
    "status",
    "iterations",
];

pub fn csv_header(axes: &[Axis]) -> Vec<String> {
    axes.iter()
        .map(|a| a.name.as_str().to_string())
        .chain(RESULT_COLUMNS.iter().map(|s| s.to_string()))
        .collect()
}

fn csv_record(row: &SweepRow) -> Vec<String> {
    let r = &row.result;
    let p = &r.params;
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    let converged = r.status != PointStatus::NonConverged;
    let complex_part = |x: f64| if converged { format_float(x) } else { String::new() };
    let mut out: Vec<String> = row.coords.iter().map(|&v| format_float(v)).collect();
    out.extend([
        format_float(p.oc.omega),
        format_float(p.oc.kappa),
        format_float(p.oc.pump_omega),
        format_float(p.oc.pump_power),
        format_float(p.mw.omega),
        format_float(p.mw.kappa),
        format_float(p.mw.pump_omega),
        format_float(p.mw.pump_power),
        format_float(p.delta_c),
        format_float(p.delta_w),
        format_float(p.temperature),
        format_float(r.q_oc),
        format_float(r.photocurrent),
        complex_part(r.alpha.re),
        complex_part(r.alpha.im),
        complex_part(r.beta.re),
        complex_part(r.beta.im),
        r.linearization_valid.to_string(),
        r.stable.to_string(),
        r.marginally_stable.to_string(),
        opt(r.max_real_part),
        opt(r.two_eta),
        r.entangled.map(|b| b.to_string()).unwrap_or_default(),
        r.status.to_string(),
        r.iterations.to_string(),
    ]);
    out
}

/// RFC-4180 CSV with LF line endings.
pub fn write_csv<W: Write>(rows: &[SweepRow], axes: &[Axis], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(axes))?;
    for row in rows {
        w.write_record(csv_record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Photocurrent spectrum as CSV: `energy_ev,temperature,photocurrent`.
pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["energy_ev", "temperature", "photocurrent"])?;
    for r in rows {
        w.write_record([format_float(r.energy_ev), format_float(r.temperature), format_float(r.current)])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// calibration

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSearch {
    /// Log-spaced `q_scale` candidates, rad/s.
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
    pub temperatures: Vec<f64>,
    /// `|Delta_w / omega_w|` of the off-resonance trend check.
    pub off_resonance: f64,
}

impl Default for CalibrationSearch {
    fn default() -> Self {
        CalibrationSearch {
            q_min: 1e-6,
            q_max: 1e3,
            points: 37,
            temperatures: vec![80.0, 180.0, 250.0, 273.0, 298.0],
            off_resonance: 0.5,
        }
    }
}

impl CalibrationSearch {
    pub fn candidates(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.q_min];
        }
        let (lo, hi) = (self.q_min.log10(), self.q_max.log10());
        (0..self.points)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (self.points - 1) as f64))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.q_min > 0.0 && self.q_max >= self.q_min && self.points >= 1) {
            return Err(Error::InvalidSpec(format!("bad q_scale search range {self:?}")));
        }
        if self.temperatures.is_empty() || self.temperatures.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidSpec("calibration temperatures must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureEvidence {
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_eta_resonant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_eta_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_eta_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationRecord {
    pub format_version: u32,
    pub ledger_version: u32,
    pub passed: bool,
    pub q_scale: f64,
    /// Criteria violated at this `q_scale`.
    pub failed_checks: usize,
    /// Summed size of the violations (2 eta units).
    pub violation: f64,
    pub entangled_at_resonance: bool,
    pub monotone_off_resonance: bool,
    pub candidates_tried: usize,
    pub search: CalibrationSearch,
    pub evidence: Vec<TemperatureEvidence>,
    pub ledger: Ledger,
}

impl CalibrationRecord {
    /// TOML body preceded by a `content_hash` line (SHA-256 of the body).
    pub fn to_text(&self) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))?;
        let hash = hex::encode(Sha256::digest(body.as_bytes()));
        Ok(format!("content_hash = \"{hash}\"\n{body}"))
    }

    /// Parses a record and verifies its content hash.
    pub fn from_text(text: &str) -> Result<Self> {
        let (first, body) = text
            .split_once('\n')
            .ok_or_else(|| Error::Serialize("empty calibration record".into()))?;
        let stated = first
            .strip_prefix("content_hash = \"")
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| Error::Serialize("calibration record lacks content_hash".into()))?;
        let actual = hex::encode(Sha256::digest(body.as_bytes()));
        if stated != actual {
            return Err(Error::Serialize(format!(
                "calibration content hash mismatch: stated {stated}, computed {actual}"
            )));
        }
        toml::from_str(body).map_err(|e| Error::Serialize(e.to_string()))
    }
}

fn two_eta_at(base: &Ledger, temperature: f64, delta_w_over_w: f64) -> Result<Option<f64>> {
    let mut l = *base;
    l.operating.temperature = temperature;
    l.operating.delta_c_over_w = 0.0;
    l.operating.delta_w_over_w = delta_w_over_w;
    Ok(run_point(&l)?.two_eta)
}

/// `true` if `ys` never drops by more than the trend slack.
pub fn non_decreasing(ys: &[f64]) -> bool {
    ys.windows(2)
        .all(|w| w[1] >= w[0] - TREND_SLACK * w[0].abs().max(1.0))
}

/// `true` if `ys` never rises by more than the trend slack.
pub fn non_increasing(ys: &[f64]) -> bool {
    ys.windows(2)
        .all(|w| w[1] <= w[0] + TREND_SLACK * w[0].abs().max(1.0))
}

fn assess(base: &Ledger, search: &CalibrationSearch, q_scale: f64) -> Result<CalibrationRecord> {
    let mut ledger = *base;
    ledger.coupling.q_scale = q_scale;
    let mut evidence = Vec::with_capacity(search.temperatures.len());
    for &t in &search.temperatures {
        evidence.push(TemperatureEvidence {
            temperature: t,
            two_eta_resonant: two_eta_at(&ledger, t, 0.0)?,
            two_eta_plus: two_eta_at(&ledger, t, search.off_resonance)?,
            two_eta_minus: two_eta_at(&ledger, t, -search.off_resonance)?,
        });
    }

    let mut failed_checks = 0;
    let mut violation = 0.0;
    for e in &evidence {
        match e.two_eta_resonant {
            Some(x) if x < 1.0 - VERDICT_MARGIN => {}
            Some(x) => {
                failed_checks += 1;
                violation += (x - 1.0).max(0.0);
            }
            None => {
                failed_checks += 1;
                violation = f64::INFINITY;
            }
        }
    }
    let entangled_at_resonance = failed_checks == 0;

    let mut monotone_off_resonance = true;
    for pick in [|e: &TemperatureEvidence| e.two_eta_plus, |e: &TemperatureEvidence| e.two_eta_minus] {
        let ys: Option<Vec<f64>> = evidence.iter().map(pick).collect();
        match ys {
            Some(ys) => {
                for w in ys.windows(2) {
                    if !non_decreasing(w) {
                        failed_checks += 1;
                        violation += w[0] - w[1];
                        monotone_off_resonance = false;
                    }
                }
            }
            None => {
                failed_checks += 1;
                violation = f64::INFINITY;
                monotone_off_resonance = false;
            }
        }
    }

    Ok(CalibrationRecord {
        format_version: 1,
        ledger_version: LEDGER_VERSION,
        passed: failed_checks == 0,
        q_scale,
        failed_checks,
        violation,
        entangled_at_resonance,
        monotone_off_resonance,
        candidates_tried: 0,
        search: search.clone(),
        evidence,
        ledger,
    })
}

/// Grid search over `q_scale` for the smallest value at which the
/// resonant point is entangled for every temperature and the
/// off-resonance `2 eta` is non-decreasing in temperature. On failure the
/// candidate with the fewest violated checks, then the smallest summed
/// violation, then the smallest `q_scale`, is returned inside
/// `CalibrationFailure`.
pub fn calibrate_defaults(base: &Ledger, search: &CalibrationSearch, workers: usize) -> Result<CalibrationRecord> {
    search.validate()?;
    base.validate()?;
    let candidates = search.candidates();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    let assessed: Vec<CalibrationRecord> = pool.install(|| {
        candidates
            .par_iter()
            .map(|&q| assess(base, search, q))
            .collect::<Result<_>>()
    })?;
    let tried = assessed.len();
    if let Some(pass) = assessed.iter().find(|r| r.passed) {
        return Ok(CalibrationRecord {
            candidates_tried: tried,
            ..pass.clone()
        });
    }
    // violations closer than the quantum are ties, resolved toward smaller q
    let quantized = |r: &CalibrationRecord| (r.violation / VIOLATION_QUANTUM).round();
    let nearest = assessed
        .into_iter()
        .min_by(|a, b| {
            a.failed_checks
                .cmp(&b.failed_checks)
                .then(quantized(a).total_cmp(&quantized(b)))
                .then(a.q_scale.total_cmp(&b.q_scale))
        })
        .expect("at least one candidate");
    Err(Error::CalibrationFailure {
        nearest: Box::new(CalibrationRecord {
            candidates_tried: tried,
            ..nearest
        }),
    })
}
