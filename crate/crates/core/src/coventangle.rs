// SPDX-License-Identifier: Apache-2.0

//! Stationary covariance of the quadrature fluctuations and the Gaussian
//! (PPT) entanglement verdict.
//!
//! The stationary covariance solves `A V + V A^T + D = 0`. Partitioning
//! `V = [[A, C], [C^T, B]]` into 2x2 blocks, the smallest symplectic
//! eigenvalue of the partial transpose is
//!
//! ```text
//! Sigma~  = det A + det B - 2 det C
//! eta~_-  = sqrt( (Sigma~ - sqrt(Sigma~^2 - 4 det V)) / 2 )
//! ```
//!
//! and the modes are entangled iff `2 eta~_- < 1` (vacuum variance 1/2), up
//! to a round-off margin.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};

use crate::lindyn::{stability, DiffusionMatrix, QuadratureDrift};
use crate::{Error, Result};

/// Absolute symmetry tolerance, scaled by `max(1, max|V|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Uncertainty-principle slack on the symplectic eigenvalues.
pub const PHYSICALITY_SLACK: f64 = 1e-9;
/// Lyapunov residual bound relative to `max|D|`.
pub const LYAPUNOV_RESIDUAL: f64 = 1e-9;
/// `2 eta` must fall this far below 1 to count as entangled; keeps
/// round-off on a product state from reading as entanglement.
pub const VERDICT_MARGIN: f64 = 1e-10;
/// Upper limit on refinement sweeps after the direct solve.
pub const REFINEMENT_STEPS: usize = 4;
/// Negative radicands below this (relative to `max(1, Sigma~^2)`) are clamped.
pub const RADICAND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub v: Matrix4<f64>,
}

impl CovarianceMatrix {
    pub fn vacuum() -> Self {
        CovarianceMatrix {
            v: Matrix4::identity() * 0.5,
        }
    }

    /// Blocks `(A, B, C)` of `[[A, C], [C^T, B]]`.
    pub fn blocks(&self) -> (Matrix2<f64>, Matrix2<f64>, Matrix2<f64>) {
        (
            self.v.fixed_view::<2, 2>(0, 0).into_owned(),
            self.v.fixed_view::<2, 2>(2, 2).into_owned(),
            self.v.fixed_view::<2, 2>(0, 2).into_owned(),
        )
    }

    fn scale(&self) -> f64 {
        self.v.abs().max().max(1.0)
    }

    pub fn asymmetry(&self) -> f64 {
        (self.v - self.v.transpose()).abs().max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementVerdict {
    pub eta_minus: f64,
    pub two_eta: f64,
    pub entangled: bool,
    pub sigma_tilde: f64,
    pub det_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub physical: bool,
    pub asymmetry: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
}

fn lyapunov_residual(a: &Matrix4<f64>, v: &Matrix4<f64>, d: &Matrix4<f64>) -> Matrix4<f64> {
    a * v + v * a.transpose() + d
}

/// Same residual evaluated in doubled precision (error-free products and
/// sums). With strongly detuned drifts `|A| |V|` can exceed `|D|` by ten
/// orders of magnitude, and the plain evaluation is then all round-off.
fn lyapunov_residual_accurate(a: &Matrix4<f64>, v: &Matrix4<f64>, d: &Matrix4<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| {
        let (mut sum, mut comp) = (d[(i, j)], 0.0);
        let mut add = |x: f64, y: f64| {
            let p = x * y;
            let p_err = x.mul_add(y, -p);
            let t = sum + p;
            let z = t - sum;
            let s_err = (sum - (t - z)) + (p - z);
            sum = t;
            comp += p_err + s_err;
        };
        for k in 0..4 {
            add(a[(i, k)], v[(k, j)]);
            add(v[(i, k)], a[(j, k)]);
        }
        sum + comp
    })
}

/// Dense Kronecker solve of `A V + V A^T + D = 0`, followed by iterative
/// refinement against an accurately evaluated residual.
pub fn solve_lyapunov(a: &QuadratureDrift, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let report = stability(a)?;
    if !report.stable {
        return Err(Error::UnstableSystem {
            max_real_part: report.max_real_part,
        });
    }
    let am = a.m;
    // vec is column-major: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V
    let mut k = SMatrix::<f64, 16, 16>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for p in 0..4 {
                // (I (x) A): block (j, j) holds A
                k[(j * 4 + i, j * 4 + p)] += am[(i, p)];
                // (A (x) I): block (j, p) holds A[j, p] I
                k[(j * 4 + i, p * 4 + i)] += am[(j, p)];
            }
        }
    }
    let lu = k.lu();
    let solve = |rhs: &Matrix4<f64>| -> Result<Matrix4<f64>> {
        let b = SVector::<f64, 16>::from_column_slice(rhs.as_slice());
        let x = lu
            .solve(&b)
            .ok_or(Error::IllConditioned {
                residual: f64::INFINITY,
                bound: LYAPUNOV_RESIDUAL,
            })?;
        Ok(Matrix4::from_column_slice(x.as_slice()))
    };
    let bound = LYAPUNOV_RESIDUAL * d.d.abs().max();
    let mut v = solve(&(-d.d))?;
    for _ in 0..REFINEMENT_STEPS {
        let r = lyapunov_residual_accurate(&am, &v, &d.d);
        if r.abs().max() < 1e-3 * bound {
            break;
        }
        v -= solve(&r)?;
    }

    let cov = CovarianceMatrix { v };
    let asym = cov.asymmetry();
    if asym > SYMMETRY_TOLERANCE * cov.scale() {
        return Err(Error::NonPhysical(format!(
            "Lyapunov solution asymmetric by {asym:.3e}"
        )));
    }
    let v = 0.5 * (v + v.transpose());
    let residual = lyapunov_residual_accurate(&am, &v, &d.d).abs().max();
    if residual >= bound && bound > 0.0 {
        return Err(Error::IllConditioned { residual, bound });
    }
    Ok(CovarianceMatrix { v })
}

fn frobenius(m: &Matrix4<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fixed-step RK4 integration of `dV/dt = A V + V A^T + D`, symmetrizing
/// after every step. Requires `dt < 0.1 / |A|_F`.
pub fn integrate_covariance(
    a: &QuadratureDrift,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be > 0, got {t_end}")));
    }
    let norm = frobenius(&a.m);
    let limit = if norm > 0.0 { 0.1 / norm } else { f64::INFINITY };
    if !(dt > 0.0 && dt < limit) {
        return Err(Error::StepSizeError { dt, limit });
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let rhs = |v: &Matrix4<f64>| lyapunov_residual(&a.m, v, &d.d);
    let mut v = v0.v;
    for _ in 0..steps {
        let k1 = rhs(&v);
        let k2 = rhs(&(v + k1 * (h / 2.0)));
        let k3 = rhs(&(v + k2 * (h / 2.0)));
        let k4 = rhs(&(v + k3 * h));
        v += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        v = 0.5 * (v + v.transpose());
    }
    Ok(CovarianceMatrix { v })
}

/// Both roots of `x^2 - s x + det = 0` as symplectic eigenvalues,
/// `(smaller, larger)`. The smaller root uses `2 det / (s + r)` to avoid
/// cancellation.
fn symplectic_pair(s: f64, det_v: f64, scale: f64) -> Result<(f64, f64)> {
    let radicand = s * s - 4.0 * det_v;
    if radicand < -RADICAND_TOLERANCE * (s * s).max(1.0) {
        return Err(Error::NonPhysical(format!(
            "negative radicand {radicand:.3e} (Sigma = {s:.6e}, det V = {det_v:.6e})"
        )));
    }
    let root = radicand.max(0.0).sqrt();
    let upper_sq = (s + root) / 2.0;
    let lower_sq = if s + root > 0.0 {
        2.0 * det_v / (s + root)
    } else {
        0.0
    };
    if lower_sq < -RADICAND_TOLERANCE * scale * scale {
        return Err(Error::NonPhysical(format!(
            "negative squared symplectic eigenvalue {lower_sq:.3e}"
        )));
    }
    Ok((lower_sq.max(0.0).sqrt(), upper_sq.max(0.0).sqrt()))
}

pub fn symplectic_eigenvalue(cov: &CovarianceMatrix) -> Result<EntanglementVerdict> {
    let (a, b, c) = cov.blocks();
    let sigma_tilde = a.determinant() + b.determinant() - 2.0 * c.determinant();
    let det_v = cov.v.determinant();
    let (eta_minus, _) = symplectic_pair(sigma_tilde, det_v, cov.scale())?;
    let two_eta = 2.0 * eta_minus;
    Ok(EntanglementVerdict {
        eta_minus,
        two_eta,
        entangled: two_eta < 1.0 - VERDICT_MARGIN,
        sigma_tilde,
        det_v,
    })
}

/// Symmetric, positive, and `V + (i/2) Omega >= 0`. The symplectic
/// eigenvalues are read off the spectrum of `Omega V` (`+-i nu_k`), which
/// stays well conditioned when both are close to 1/2.
pub fn physicality_check(cov: &CovarianceMatrix) -> PhysicalityReport {
    let asymmetry = cov.asymmetry();
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    let sym = 0.5 * (cov.v + cov.v.transpose());
    let mut nus: Vec<f64> = (omega * sym).complex_eigenvalues().iter().map(|z| z.im.abs()).collect();
    nus.sort_by(f64::total_cmp);
    let (nu_minus, nu_plus) = (nus[0], nus[3]);
    let positive = sym.symmetric_eigenvalues().min() > 0.0;
    let slack = PHYSICALITY_SLACK * cov.scale();
    let physical = asymmetry <= SYMMETRY_TOLERANCE * cov.scale()
        && positive
        && nu_minus >= 0.5 - slack;
    PhysicalityReport {
        physical,
        asymmetry,
        nu_minus,
        nu_plus,
    }
}
