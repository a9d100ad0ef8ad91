// SPDX-License-Identifier: Apache-2.0

//! Mean-field steady state of the cross-Kerr coupled cavities.
//!
//! The noiseless steady-state equations are
//!
//! ```text
//! -(i Delta_c + kappa_c) alpha + i q |beta|^2 alpha + E_c = 0
//! -(i Delta_w + kappa_w) beta  + i q |alpha|^2 beta + E_w = 0
//! ```
//!
//! solved as the fixed point of
//! `alpha = E_c / (kappa_c + i (Delta_c - q |beta|^2))` and its partner,
//! with linear damping between iterates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::physics::{drive_amplitude, ModeSpec};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Moduli above which the linearization around the mean fields is taken as
/// valid.
pub const LINEARIZATION_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Optical cavity.
    pub oc: ModeSpec,
    /// Microwave LC cavity.
    pub mw: ModeSpec,
    /// Optical detuning, rad/s.
    pub delta_c: f64,
    /// Microwave detuning, rad/s.
    pub delta_w: f64,
    /// Cross-Kerr rate, rad/s.
    pub q_oc: f64,
    /// Bath temperature, K.
    pub temperature: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.oc.validate()?;
        self.mw.validate()?;
        if !(self.delta_c.is_finite() && self.delta_w.is_finite()) {
            return Err(Error::domain("detunings must be finite"));
        }
        if !(self.q_oc.is_finite() && self.q_oc >= 0.0) {
            return Err(Error::domain(format!("q_oc must be >= 0, got {}", self.q_oc)));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::domain(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Real, non-negative drive amplitudes from the pump powers.
    pub fn drives(&self) -> Result<Drives> {
        Ok(Drives {
            e_c: Complex64::new(drive_amplitude(&self.oc)?, 0.0),
            e_w: Complex64::new(drive_amplitude(&self.mw)?, 0.0),
        })
    }
}

/// Complex drive amplitudes, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drives {
    pub e_c: Complex64,
    pub e_w: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Weight kept from the previous iterate.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 10_000,
            damping: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub residual_a: Complex64,
    pub residual_b: Complex64,
    pub iterations: usize,
    pub drives: Drives,
}

impl SteadyState {
    pub fn linearization_valid(&self) -> bool {
        self.alpha.norm() > LINEARIZATION_THRESHOLD && self.beta.norm() > LINEARIZATION_THRESHOLD
    }
}

/// Linearization parameters around the mean fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// `Delta_c - q |beta|^2`.
    pub delta_c_eff: f64,
    /// `Delta_w - q |alpha|^2`.
    pub delta_w_eff: f64,
    /// Beam-splitter coupling `q alpha conj(beta)`.
    pub g_bs: Complex64,
    /// Two-mode-squeezing coupling `q alpha beta`.
    pub g_tm: Complex64,
}

/// Left-hand sides of both steady-state equations at `(alpha, beta)`.
pub fn residual(
    alpha: Complex64,
    beta: Complex64,
    params: &SystemParams,
    drives: &Drives,
) -> (Complex64, Complex64) {
    let q = params.q_oc;
    let ra = -(I * params.delta_c + params.oc.kappa) * alpha + I * q * alpha * beta.norm_sqr() + drives.e_c;
    let rb = -(I * params.delta_w + params.mw.kappa) * beta + I * q * beta * alpha.norm_sqr() + drives.e_w;
    (ra, rb)
}

fn certified(ra: Complex64, rb: Complex64, drives: &Drives, tol: f64) -> bool {
    ra.norm() <= tol * drives.e_c.norm().max(1.0) && rb.norm() <= tol * drives.e_w.norm().max(1.0)
}

pub fn solve_steady_state(params: &SystemParams, opts: &SolverOptions) -> Result<SteadyState> {
    solve_with_drives(params, &params.drives()?, opts)
}

/// Damped fixed-point solve starting from the decoupled solution.
pub fn solve_with_drives(
    params: &SystemParams,
    drives: &Drives,
    opts: &SolverOptions,
) -> Result<SteadyState> {
    params.validate()?;
    if !(opts.tol > 0.0) || opts.max_iter < 1 || !(0.0..1.0).contains(&opts.damping) {
        return Err(Error::domain(format!("invalid solver options {opts:?}")));
    }
    let (kc, kw, q) = (params.oc.kappa, params.mw.kappa, params.q_oc);
    let map_a = |beta: Complex64| drives.e_c / Complex64::new(kc, params.delta_c - q * beta.norm_sqr());
    let map_b = |alpha: Complex64| drives.e_w / Complex64::new(kw, params.delta_w - q * alpha.norm_sqr());

    let mut alpha = drives.e_c / Complex64::new(kc, params.delta_c);
    let mut beta = drives.e_w / Complex64::new(kw, params.delta_w);
    let (mut ra, mut rb) = residual(alpha, beta, params, drives);
    let mut iterations = 0;
    while !certified(ra, rb, drives, opts.tol) {
        if iterations == opts.max_iter {
            let last_residual = (ra.norm() / drives.e_c.norm().max(1.0))
                .max(rb.norm() / drives.e_w.norm().max(1.0));
            return Err(Error::NonConvergence {
                last_residual,
                iterations,
            });
        }
        let (next_a, next_b) = (map_a(beta), map_b(alpha));
        alpha = opts.damping * alpha + (1.0 - opts.damping) * next_a;
        beta = opts.damping * beta + (1.0 - opts.damping) * next_b;
        (ra, rb) = residual(alpha, beta, params, drives);
        iterations += 1;
    }
    Ok(SteadyState {
        alpha,
        beta,
        residual_a: ra,
        residual_b: rb,
        iterations,
        drives: *drives,
    })
}

pub fn effective_params(state: &SteadyState, params: &SystemParams) -> EffectiveParams {
    let q = params.q_oc;
    EffectiveParams {
        delta_c_eff: params.delta_c - q * state.beta.norm_sqr(),
        delta_w_eff: params.delta_w - q * state.alpha.norm_sqr(),
        g_bs: q * state.alpha * state.beta.conj(),
        g_tm: q * state.alpha * state.beta,
    }
}
