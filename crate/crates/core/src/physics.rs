// SPDX-License-Identifier: Apache-2.0

//! Physical constants, unit conversions, thermal occupation and cavity drive.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// CODATA 2018 exact / recommended values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
    /// Free electron mass, kg.
    pub m0_electron: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        e_charge: 1.602_176_634e-19,
        m0_electron: 9.109_383_701_5e-31,
    };
}

pub const HBAR: f64 = PhysicalConstants::CODATA_2018.hbar;
pub const K_B: f64 = PhysicalConstants::CODATA_2018.k_b;
pub const E_CHARGE: f64 = PhysicalConstants::CODATA_2018.e_charge;
pub const M0_ELECTRON: f64 = PhysicalConstants::CODATA_2018.m0_electron;

/// One driven cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    /// Cavity angular frequency, rad/s.
    pub omega: f64,
    /// Amplitude decay rate (half-width), rad/s.
    pub kappa: f64,
    /// Pump angular frequency, rad/s.
    pub pump_omega: f64,
    /// Pump power, W.
    pub pump_power: f64,
}

impl ModeSpec {
    pub fn new(omega: f64, kappa: f64, pump_omega: f64, pump_power: f64) -> Result<Self> {
        let mode = ModeSpec {
            omega,
            kappa,
            pump_omega,
            pump_power,
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::domain(format!("mode omega must be > 0, got {}", self.omega)));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::domain(format!("mode kappa must be > 0, got {}", self.kappa)));
        }
        if !(self.pump_omega.is_finite() && self.pump_omega > 0.0) {
            return Err(Error::domain(format!(
                "pump omega must be > 0, got {}",
                self.pump_omega
            )));
        }
        if !(self.pump_power.is_finite() && self.pump_power >= 0.0) {
            return Err(Error::domain(format!(
                "pump power must be >= 0, got {}",
                self.pump_power
            )));
        }
        Ok(())
    }
}

/// Bose-Einstein mean photon number `1 / (exp(hbar omega / k_B T) - 1)`.
///
/// Exactly zero at `T = 0`; underflows gracefully to zero for large
/// `hbar omega / k_B T`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be > 0, got {omega}")));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(x.exp_m1().recip())
}

/// Drive amplitude `E = sqrt(2 kappa P / (hbar omega_pump))` in rad/s.
pub fn drive_amplitude(mode: &ModeSpec) -> Result<f64> {
    mode.validate()?;
    Ok((2.0 * mode.kappa * mode.pump_power / (HBAR * mode.pump_omega)).sqrt())
}

pub fn ev_to_omega(energy_ev: f64) -> Result<f64> {
    if !(energy_ev.is_finite() && energy_ev > 0.0) {
        return Err(Error::domain(format!("energy must be > 0 eV, got {energy_ev}")));
    }
    Ok(energy_ev * E_CHARGE / HBAR)
}

pub fn omega_to_ev(omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be > 0, got {omega}")));
    }
    Ok(omega * HBAR / E_CHARGE)
}

/// Photon energy in joules for an angular frequency.
pub(crate) fn photon_energy(omega: f64) -> f64 {
    HBAR * omega
}
