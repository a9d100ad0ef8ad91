// SPDX-License-Identifier: Apache-2.0

//! Linearized fluctuation dynamics around the mean fields.
//!
//! In the ordered basis `(da, da^dag, db, db^dag)` the fluctuations obey
//!
//! ```text
//! d/dt da = -(kappa_c + i Delta_c_eff) da + i g_bs db + i g_tm db^dag + sqrt(2 kappa_c) a_in
//! d/dt db = -(kappa_w + i Delta_w_eff) db + i conj(g_bs) da + i g_tm da^dag + sqrt(2 kappa_w) b_in
//! ```
//!
//! with the daggered rows given by conjugation. The real quadrature form
//! uses `X = (a + a^dag)/sqrt(2)`, `P = -i (a - a^dag)/sqrt(2)`, so that the
//! vacuum variance is 1/2.

use nalgebra::{Matrix2, Matrix4, Schur};
use num_complex::Complex64;

use crate::physics::thermal_occupation;
use crate::steadystate::{EffectiveParams, SystemParams};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative bound on the imaginary residue of the basis change.
pub const BASIS_TOLERANCE: f64 = 1e-10;
/// Points with `max Re lambda` in `[-MARGINAL_FRACTION * |A|, 0)` are
/// flagged marginally stable.
pub const MARGINAL_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDrift {
    pub m: Matrix4<Complex64>,
}

impl ComplexDrift {
    /// Largest deviation from the conjugation symmetry between the plain and
    /// daggered rows of each mode block.
    pub fn conjugation_defect(&self) -> f64 {
        let m = &self.m;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let (r, c) = (2 * i, 2 * j);
                worst = worst
                    .max((m[(r + 1, c + 1)] - m[(r, c)].conj()).norm())
                    .max((m[(r + 1, c)] - m[(r, c + 1)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if self.m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::EigenFailure("non-finite complex drift entry".into()));
        }
        let schur = Schur::try_new(self.m, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::EigenFailure("complex Schur iteration did not converge".into()))?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::EigenFailure("complex Schur form not triangular".into()))?;
        Ok(ev.iter().copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureDrift {
    pub m: Matrix4<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix {
    pub d: Matrix4<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub marginally_stable: bool,
    pub max_real_part: f64,
    pub eigenvalues: Vec<Complex64>,
}

pub fn complex_drift(eff: &EffectiveParams, params: &SystemParams) -> ComplexDrift {
    let zero = Complex64::new(0.0, 0.0);
    let a = -(params.oc.kappa + I * eff.delta_c_eff);
    let b = -(params.mw.kappa + I * eff.delta_w_eff);
    let (gbs, gtm) = (eff.g_bs, eff.g_tm);
    #[rustfmt::skip]
    let m = Matrix4::new(
        a,                   zero,          I * gbs,             I * gtm,
        zero,                a.conj(),      -I * gtm.conj(),     -I * gbs.conj(),
        I * gbs.conj(),      I * gtm,       b,                   zero,
        -I * gtm.conj(),     -I * gbs,      zero,                b.conj(),
    );
    ComplexDrift { m }
}

fn mode_transform() -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one = Complex64::new(s, 0.0);
    let block = Matrix2::new(one, one, -I * s, I * s);
    let inv = Matrix2::new(one, I * s, one, -I * s);
    let mut t = Matrix4::zeros();
    let mut ti = Matrix4::zeros();
    for k in 0..2 {
        t.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&block);
        ti.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&inv);
    }
    (t, ti)
}

/// Similarity transform into the `(X_a, P_a, X_b, P_b)` basis.
pub fn to_quadrature(cd: &ComplexDrift) -> Result<QuadratureDrift> {
    let (t, ti) = mode_transform();
    let a = t * cd.m * ti;
    let scale = cd.m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residue = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let bound = BASIS_TOLERANCE * scale;
    if residue > bound {
        return Err(Error::BasisError { residue, bound });
    }
    Ok(QuadratureDrift { m: a.map(|z| z.re) })
}

/// Quadrature diffusion for independent thermal baths:
/// `diag(kappa_c (2 N_c + 1) x2, kappa_w (2 N_w + 1) x2)`.
pub fn diffusion(params: &SystemParams) -> Result<DiffusionMatrix> {
    params.validate()?;
    let nc = thermal_occupation(params.oc.omega, params.temperature)?;
    let nw = thermal_occupation(params.mw.omega, params.temperature)?;
    let dc = params.oc.kappa * (2.0 * nc + 1.0);
    let dw = params.mw.kappa * (2.0 * nw + 1.0);
    Ok(DiffusionMatrix {
        d: Matrix4::from_diagonal(&nalgebra::Vector4::new(dc, dc, dw, dw)),
    })
}

pub fn stability(qd: &QuadratureDrift) -> Result<StabilityReport> {
    if qd.m.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure("non-finite quadrature drift entry".into()));
    }
    let schur = Schur::try_new(qd.m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenFailure("real Schur iteration did not converge".into()))?;
    let eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let norm = qd.m.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let stable = max_real_part < 0.0;
    Ok(StabilityReport {
        stable,
        marginally_stable: stable && max_real_part >= -MARGINAL_FRACTION * norm,
        max_real_part,
        eigenvalues,
    })
}
