// SPDX-License-Identifier: Apache-2.0

//! Photodetector absorption rate from Fermi's golden rule.
//!
//! The interband rate for an incident optical field of squared vector
//! potential `A0^2` at frequency `omega_c` is
//!
//! ```text
//! W = (2 pi / hbar) (e^2 A0^2 / 4 m0^2) |P_cv|^2 g_J(hbar omega_c) L(omega_c) f(T)
//! g_J(E) = (1 / 2 pi^2) (2 mu_eff / hbar^2)^(3/2) sqrt(E - E_gap)
//! ```
//!
//! `W` is a rate per absorbing state. The cross-Kerr rate of the cavity
//! Hamiltonian is obtained through [`CouplingBridge`], which keeps the
//! spectral and thermal shape of `W` and fixes the absolute scale with a
//! calibrated `q_scale`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::physics::{ev_to_omega, photon_energy, E_CHARGE, HBAR, K_B, M0_ELECTRON};
use crate::{Error, Result};

/// Thermally activated escape competing with capture:
/// `f(T) = 1 / (1 + prefactor * exp(-E_act / k_B T))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureModel {
    /// Activation energy, J.
    pub e_act: f64,
    pub prefactor: f64,
}

impl TemperatureModel {
    pub fn silicon() -> Self {
        TemperatureModel {
            e_act: 0.20 * E_CHARGE,
            prefactor: 1.0e4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorMaterial {
    /// Band gap, J.
    pub e_gap: f64,
    /// Reduced electron-hole effective mass, kg.
    pub mu_eff: f64,
    /// Squared momentum matrix element `|<c|p|v>|^2`, (kg m/s)^2.
    pub p_cv_sq: f64,
    /// Lorentzian full width, rad/s.
    pub gamma_l: f64,
    /// Transition line centre, rad/s.
    pub line_center: f64,
    pub temp_model: TemperatureModel,
}

impl DetectorMaterial {
    /// Silicon-like defaults: 1.12 eV gap, mu = 0.16 m0, Kane energy 21.6 eV
    /// (`|P_cv|^2 = m0 E_p / 2`), 50 meV line width centred on the gap.
    pub fn silicon() -> Self {
        let e_gap = 1.12 * E_CHARGE;
        DetectorMaterial {
            e_gap,
            mu_eff: 0.16 * M0_ELECTRON,
            p_cv_sq: M0_ELECTRON * 21.6 * E_CHARGE / 2.0,
            gamma_l: 0.05 * E_CHARGE / HBAR,
            line_center: e_gap / HBAR,
            temp_model: TemperatureModel::silicon(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.e_gap > 0.0, "e_gap must be > 0"),
            (self.mu_eff > 0.0, "mu_eff must be > 0"),
            (self.p_cv_sq >= 0.0, "p_cv_sq must be >= 0"),
            (self.gamma_l > 0.0, "gamma_l must be > 0"),
            (self.line_center > 0.0, "line_center must be > 0"),
            (self.temp_model.e_act >= 0.0, "e_act must be >= 0"),
            (self.temp_model.prefactor >= 0.0, "temperature prefactor must be >= 0"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::domain(msg));
            }
        }
        Ok(())
    }
}

/// Optical field incident on the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalDrive {
    /// Incident angular frequency, rad/s.
    pub omega_c: f64,
    /// Intensity-proportional squared amplitude.
    pub a0_sq: f64,
}

impl OpticalDrive {
    /// `A0^2 = c_drive * power`.
    pub fn from_power(omega_c: f64, power: f64, c_drive: f64) -> Self {
        OpticalDrive {
            omega_c,
            a0_sq: c_drive * power,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) {
            return Err(Error::domain(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if !(self.a0_sq >= 0.0) {
            return Err(Error::domain(format!("A0^2 must be >= 0, got {}", self.a0_sq)));
        }
        Ok(())
    }
}

/// Area-normalized Lorentzian with full width `gamma_l`, in 1/(rad/s).
pub fn lorentzian(omega: f64, center: f64, gamma_l: f64) -> Result<f64> {
    if !(gamma_l > 0.0) {
        return Err(Error::domain(format!("gamma_L must be > 0, got {gamma_l}")));
    }
    let half = 0.5 * gamma_l;
    let d = omega - center;
    Ok((gamma_l / (2.0 * PI)) / (d * d + half * half))
}

/// Joint density of states per unit energy and volume, 1/(J m^3). Zero at
/// and below the gap.
pub fn joint_dos(photon_energy: f64, mat: &DetectorMaterial) -> f64 {
    let excess = photon_energy - mat.e_gap;
    if excess <= 0.0 {
        return 0.0;
    }
    (2.0 * mat.mu_eff / (HBAR * HBAR)).powf(1.5) * excess.sqrt() / (2.0 * PI * PI)
}

pub fn temperature_factor(temperature: f64, model: &TemperatureModel) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 || model.prefactor == 0.0 {
        return Ok(1.0);
    }
    let escape = model.prefactor * (-model.e_act / (K_B * temperature)).exp();
    Ok(1.0 / (1.0 + escape))
}

/// Golden-rule transition rate per absorbing state, 1/s.
pub fn transition_rate(drive: &OpticalDrive, mat: &DetectorMaterial, temperature: f64) -> Result<f64> {
    drive.validate()?;
    mat.validate()?;
    let ftemp = temperature_factor(temperature, &mat.temp_model)?;
    let g = joint_dos(photon_energy(drive.omega_c), mat);
    if g == 0.0 {
        return Ok(0.0);
    }
    let matrix_element = E_CHARGE * E_CHARGE * drive.a0_sq / (4.0 * M0_ELECTRON * M0_ELECTRON) * mat.p_cv_sq;
    let line = lorentzian(drive.omega_c, mat.line_center, mat.gamma_l)?;
    Ok(2.0 * PI / HBAR * matrix_element * g * line * ftemp)
}

/// Maps the golden-rule rate onto the cross-Kerr rate of the cavity
/// Hamiltonian: `q_oc = q_scale * W(drive, T) / W(reference drive, reference T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingBridge {
    /// Cross-Kerr rate at the reference point, rad/s.
    pub q_scale: f64,
    pub reference: OpticalDrive,
    /// Kelvin.
    pub reference_temperature: f64,
}

impl CouplingBridge {
    /// Reference at 1.2 eV, 80 K, with the given reference intensity.
    pub fn new(q_scale: f64, reference_a0_sq: f64) -> Self {
        CouplingBridge {
            q_scale,
            reference: OpticalDrive {
                omega_c: 1.2 * E_CHARGE / HBAR,
                a0_sq: reference_a0_sq,
            },
            reference_temperature: 80.0,
        }
    }
}

/// Cross-Kerr coupling rate `q_oc` in rad/s.
pub fn coupling_rate(
    drive: &OpticalDrive,
    mat: &DetectorMaterial,
    temperature: f64,
    bridge: &CouplingBridge,
) -> Result<f64> {
    if !(bridge.q_scale >= 0.0) {
        return Err(Error::domain(format!("q_scale must be >= 0, got {}", bridge.q_scale)));
    }
    let raw = transition_rate(drive, mat, temperature)?;
    if raw == 0.0 || bridge.q_scale == 0.0 {
        return Ok(0.0);
    }
    let reference = transition_rate(&bridge.reference, mat, bridge.reference_temperature)?;
    if !(reference > 0.0) {
        return Err(Error::domain(
            "coupling reference point has zero absorption rate (below gap?)",
        ));
    }
    Ok(bridge.q_scale * raw / reference)
}

/// Photocurrent `I = e W n_abs` in amperes. Dark current is not modelled.
pub fn photocurrent(
    drive: &OpticalDrive,
    mat: &DetectorMaterial,
    temperature: f64,
    n_abs: f64,
) -> Result<f64> {
    if !(n_abs > 0.0) {
        return Err(Error::domain(format!("n_abs must be > 0, got {n_abs}")));
    }
    Ok(E_CHARGE * transition_rate(drive, mat, temperature)? * n_abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub energy_ev: f64,
    pub temperature: f64,
    pub current: f64,
}

/// Photocurrent over an energy x temperature grid. Energies are the outer
/// loop; `a0_sq` is held fixed across the grid.
pub fn photocurrent_spectrum(
    energies_ev: &[f64],
    temperatures: &[f64],
    mat: &DetectorMaterial,
    a0_sq: f64,
    n_abs: f64,
) -> Result<Vec<SpectrumRow>> {
    if energies_ev.is_empty() || temperatures.is_empty() {
        return Err(Error::domain("photocurrent spectrum needs non-empty grids"));
    }
    let mut rows = Vec::with_capacity(energies_ev.len() * temperatures.len());
    for (i, &energy_ev) in energies_ev.iter().enumerate() {
        for (j, &temperature) in temperatures.iter().enumerate() {
            let at = |source: Error| Error::AtGridPoint {
                index: i * temperatures.len() + j,
                coords: format!("energy_ev={energy_ev}, T={temperature}"),
                source: Box::new(source),
            };
            let drive = OpticalDrive {
                omega_c: ev_to_omega(energy_ev).map_err(at)?,
                a0_sq,
            };
            let current = photocurrent(&drive, mat, temperature, n_abs).map_err(at)?;
            rows.push(SpectrumRow {
                energy_ev,
                temperature,
                current,
            });
        }
    }
    Ok(rows)
}
