// SPDX-License-Identifier: Apache-2.0

//! Default device parameters.
//!
//! The operating point is under-determined by published data: only the pump
//! powers (10 mW each) and the silicon band gap are fixed. Everything else
//! here is a documented modelling choice, and `coupling.q_scale` is the
//! output of `cavent calibrate` (see `sweep::calibrate_defaults`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::photodiode::{CouplingBridge, DetectorMaterial, OpticalDrive, TemperatureModel};
use crate::physics::{ev_to_omega, ModeSpec, E_CHARGE, HBAR, M0_ELECTRON};
use crate::steadystate::{SolverOptions, SystemParams};
use crate::{Error, Result};

/// Ledger revision; bump whenever a default below changes.
pub const LEDGER_VERSION: u32 = 1;

/// `q_scale` recorded by the last calibration run over the default search
/// range (rad/s). The run ended in `CalibrationFailure`; this is its
/// nearest-miss candidate. See `presets/calibration.toml`.
pub const DEFAULT_Q_SCALE: f64 = 5.623413251903491;

/// `A0^2` per watt of optical pump, chosen so that the default detector
/// delivers photocurrents in the microampere range.
pub const DEFAULT_C_DRIVE: f64 = 1.5e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalCavity {
    pub photon_energy_ev: f64,
    /// rad/s
    pub kappa: f64,
    /// W
    pub pump_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MicrowaveCavity {
    /// rad/s
    pub omega: f64,
    /// rad/s
    pub kappa: f64,
    /// W
    pub pump_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Operating {
    /// Optical detuning in units of the microwave frequency.
    pub delta_c_over_w: f64,
    /// Microwave detuning in units of the microwave frequency.
    pub delta_w_over_w: f64,
    /// K
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Material {
    pub e_gap_ev: f64,
    /// Reduced effective mass in units of m0.
    pub mu_eff_m0: f64,
    /// `|P_cv|^2 = m0 E_p / 2`.
    pub kane_energy_ev: f64,
    /// Lorentzian full width.
    pub gamma_l_ev: f64,
    /// Line centre; the band gap when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_center_ev: Option<f64>,
    pub e_act_ev: f64,
    pub escape_prefactor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Coupling {
    /// Cross-Kerr rate at the reference point, rad/s.
    pub q_scale: f64,
    /// `A0^2` per watt.
    pub c_drive: f64,
    /// W
    pub reference_power: f64,
    pub reference_photon_energy_ev: f64,
    /// K
    pub reference_temperature: f64,
    /// Effective number of absorbing states.
    pub n_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

/// Complete, serializable description of one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ledger {
    pub oc: OpticalCavity,
    pub mw: MicrowaveCavity,
    pub operating: Operating,
    pub material: Material,
    pub coupling: Coupling,
    pub solver: Solver,
}

impl Default for OpticalCavity {
    fn default() -> Self {
        OpticalCavity {
            photon_energy_ev: 1.2,
            kappa: 2.0 * PI * 1e6,
            pump_power: 10e-3,
        }
    }
}

impl Default for MicrowaveCavity {
    fn default() -> Self {
        MicrowaveCavity {
            omega: 2.0 * PI * 10e9,
            kappa: 2.0 * PI * 1e6,
            pump_power: 10e-3,
        }
    }
}

impl Default for Operating {
    fn default() -> Self {
        Operating {
            delta_c_over_w: 0.0,
            delta_w_over_w: 0.0,
            temperature: 298.0,
        }
    }
}

impl Default for Material {
    fn default() -> Self {
        Material {
            e_gap_ev: 1.12,
            mu_eff_m0: 0.16,
            kane_energy_ev: 21.6,
            gamma_l_ev: 0.05,
            line_center_ev: None,
            e_act_ev: 0.20,
            escape_prefactor: 1.0e4,
        }
    }
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling {
            q_scale: DEFAULT_Q_SCALE,
            c_drive: DEFAULT_C_DRIVE,
            reference_power: 10e-3,
            reference_photon_energy_ev: 1.2,
            reference_temperature: 80.0,
            n_abs: 1.0e10,
        }
    }
}

impl Default for Solver {
    fn default() -> Self {
        let d = SolverOptions::default();
        Solver {
            tol: d.tol,
            max_iter: d.max_iter,
            damping: d.damping,
        }
    }
}

impl Ledger {
    pub fn material(&self) -> Result<DetectorMaterial> {
        let m = &self.material;
        let e_gap = m.e_gap_ev * E_CHARGE;
        let mat = DetectorMaterial {
            e_gap,
            mu_eff: m.mu_eff_m0 * M0_ELECTRON,
            p_cv_sq: M0_ELECTRON * m.kane_energy_ev * E_CHARGE / 2.0,
            gamma_l: m.gamma_l_ev * E_CHARGE / HBAR,
            line_center: m.line_center_ev.map_or(e_gap, |ev| ev * E_CHARGE) / HBAR,
            temp_model: TemperatureModel {
                e_act: m.e_act_ev * E_CHARGE,
                prefactor: m.escape_prefactor,
            },
        };
        mat.validate()?;
        Ok(mat)
    }

    pub fn optical_drive(&self) -> Result<OpticalDrive> {
        Ok(OpticalDrive::from_power(
            ev_to_omega(self.oc.photon_energy_ev)?,
            self.oc.pump_power,
            self.coupling.c_drive,
        ))
    }

    pub fn bridge(&self) -> Result<CouplingBridge> {
        let c = &self.coupling;
        Ok(CouplingBridge {
            q_scale: c.q_scale,
            reference: OpticalDrive::from_power(
                ev_to_omega(c.reference_photon_energy_ev)?,
                c.reference_power,
                c.c_drive,
            ),
            reference_temperature: c.reference_temperature,
        })
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping: self.solver.damping,
        }
    }

    /// Cavity parameters for a given cross-Kerr rate. Pumps are taken at the
    /// cavity frequencies; the detunings do not feed back into the drive
    /// amplitudes or the thermal occupations.
    pub fn system_params(&self, q_oc: f64) -> Result<SystemParams> {
        let wc = ev_to_omega(self.oc.photon_energy_ev)?;
        let ww = self.mw.omega;
        let params = SystemParams {
            oc: ModeSpec::new(wc, self.oc.kappa, wc, self.oc.pump_power)?,
            mw: ModeSpec::new(ww, self.mw.kappa, ww, self.mw.pump_power)?,
            delta_c: self.operating.delta_c_over_w * ww,
            delta_w: self.operating.delta_w_over_w * ww,
            q_oc,
            temperature: self.operating.temperature,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.material()?;
        self.bridge()?;
        self.system_params(0.0)?;
        let c = &self.coupling;
        if !(c.q_scale >= 0.0 && c.q_scale.is_finite()) {
            return Err(Error::domain(format!("q_scale must be >= 0, got {}", c.q_scale)));
        }
        if !(c.n_abs > 0.0) {
            return Err(Error::domain(format!("n_abs must be > 0, got {}", c.n_abs)));
        }
        if !(c.c_drive > 0.0) {
            return Err(Error::domain(format!("c_drive must be > 0, got {}", c.c_drive)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Serialize(e.to_string()))
    }
}
