// SPDX-License-Identifier: Apache-2.0

// Shared by several test targets; not every target uses every helper.
#![allow(dead_code)]

use cavent_core::coventangle::{solve_lyapunov, symplectic_eigenvalue, CovarianceMatrix, EntanglementVerdict};
use cavent_core::lindyn::{complex_drift, diffusion, to_quadrature, QuadratureDrift};
use cavent_core::physics::{ModeSpec, HBAR};
use cavent_core::steadystate::{effective_params, solve_with_drives, Drives, SolverOptions, SteadyState, SystemParams};
use cavent_core::Result;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;

/// Everything the pipeline computes for one parameter set, with the
/// covariance kept (the sweep rows drop it).
pub struct Analysis {
    pub state: SteadyState,
    pub drift: QuadratureDrift,
    pub cov: CovarianceMatrix,
    pub verdict: EntanglementVerdict,
}

pub fn analyze_with(params: &SystemParams, drives: &Drives) -> Result<Analysis> {
    let state = solve_with_drives(params, drives, &SolverOptions::default())?;
    let drift = to_quadrature(&complex_drift(&effective_params(&state, params), params))?;
    let cov = solve_lyapunov(&drift, &diffusion(params)?)?;
    let verdict = symplectic_eigenvalue(&cov)?;
    Ok(Analysis { state, drift, cov, verdict })
}

pub fn analyze(params: &SystemParams) -> Result<Analysis> {
    analyze_with(params, &params.drives()?)
}

/// Pump power that puts `n` photons in a resonantly driven mode.
pub fn power_for_photons(omega: f64, kappa: f64, n: f64) -> f64 {
    n * HBAR * omega * kappa / 2.0
}

/// A moderately coupled operating point, in units where kappa is O(1e6),
/// with `q |alpha|^2` and `q |beta|^2` of order `shift * kappa`.
pub fn moderate_point(n_c: f64, n_w: f64, shift: f64, delta_c: f64, delta_w: f64, temperature: f64) -> SystemParams {
    let kappa = 2.0 * std::f64::consts::PI * 1e6;
    let (wc, ww) = (1.8e15, 2.0 * std::f64::consts::PI * 10e9);
    SystemParams {
        oc: ModeSpec::new(wc, kappa, wc, power_for_photons(wc, kappa, n_c)).unwrap(),
        mw: ModeSpec::new(ww, kappa, ww, power_for_photons(ww, kappa, n_w)).unwrap(),
        delta_c: delta_c * kappa,
        delta_w: delta_w * kappa,
        q_oc: shift * kappa / n_c.max(n_w),
        temperature,
    }
}

fn rot_block(re: f64, im: f64) -> Matrix2<f64> {
    Matrix2::new(re, im, -im, re)
}

/// Real 4x4 matrix with a prescribed spectrum, hidden behind a random
/// similarity `P = I + 0.4 R`. `reals` are the real parts of the two
/// eigenvalue pairs; each pair is complex (`re +- i im`) or two reals.
pub fn matrix_with_spectrum<R: Rng>(rng: &mut R, reals: [f64; 2]) -> Matrix4<f64> {
    let mut core = Matrix4::zeros();
    for (k, &re) in reals.iter().enumerate() {
        let block = if rng.gen_bool(0.5) {
            rot_block(re, rng.gen_range(0.2..3.0))
        } else {
            let other = re * rng.gen_range(1.0..2.0);
            Matrix2::new(re, rng.gen_range(-1.0..1.0), 0.0, other)
        };
        core.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&block);
    }
    let p = Matrix4::identity() + Matrix4::from_fn(|_, _| rng.gen_range(-0.4..0.4));
    let pinv = p.try_inverse().expect("I + 0.4 R is invertible for these draws");
    p * core * pinv
}

pub fn random_stable<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let reals = [-rng.gen_range(0.1..2.0), -rng.gen_range(0.1..2.0)];
    matrix_with_spectrum(rng, reals)
}

pub fn random_unstable<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let reals = [rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0)];
    matrix_with_spectrum(rng, reals)
}

/// Positive-definite diffusion `B B^T + 0.1 I`.
pub fn random_diffusion<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let b = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    b * b.transpose() + Matrix4::identity() * 0.1
}

/// Classical RK4 for `x' = f(x)` on complex pairs.
pub fn rk4_pair<F>(f: F, mut x: (Complex64, Complex64), dt: f64, steps: usize) -> (Complex64, Complex64)
where
    F: Fn((Complex64, Complex64)) -> (Complex64, Complex64),
{
    let add = |x: (Complex64, Complex64), k: (Complex64, Complex64), h: f64| (x.0 + k.0 * h, x.1 + k.1 * h);
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(add(x, k1, dt / 2.0));
        let k3 = f(add(x, k2, dt / 2.0));
        let k4 = f(add(x, k3, dt));
        x.0 += (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) * (dt / 6.0);
        x.1 += (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * (dt / 6.0);
    }
    x
}

/// Noiseless mean-field equations of motion integrated from vacuum to
/// `t_end`.
pub fn mean_field_ode(params: &SystemParams, drives: &Drives, t_end: f64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let (kc, kw, q) = (params.oc.kappa, params.mw.kappa, params.q_oc);
    let f = |(a, b): (Complex64, Complex64)| {
        (
            -(kc + i * params.delta_c) * a + i * q * b.norm_sqr() * a + drives.e_c,
            -(kw + i * params.delta_w) * b + i * q * a.norm_sqr() * b + drives.e_w,
        )
    };
    let rate = kc.max(kw) + params.delta_c.abs().max(params.delta_w.abs()) + q * 4.0 * (drives.e_c.norm() / kc).powi(2).max((drives.e_w.norm() / kw).powi(2));
    let dt = 0.02 / rate;
    let steps = (t_end / dt).ceil() as usize;
    let zero = Complex64::new(0.0, 0.0);
    rk4_pair(f, (zero, zero), t_end / steps as f64, steps)
}

/// Matrix exponential `exp(A t)` by RK4 on `X' = A X`.
pub fn propagate(a: &Matrix4<f64>, t: f64) -> Matrix4<f64> {
    let norm = a.norm();
    let steps = ((t * norm) / 0.05).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut x = Matrix4::identity();
    for _ in 0..steps {
        let k1 = a * x;
        let k2 = a * (x + k1 * (h / 2.0));
        let k3 = a * (x + k2 * (h / 2.0));
        let k4 = a * (x + k3 * h);
        x += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    x
}

pub fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.abs().max()
}
