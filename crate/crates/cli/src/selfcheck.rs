// SPDX-License-Identifier: Apache-2.0

//! `cavent check`: closed-form and time-domain oracles run against the
//! installed library.

use cavent_core::coventangle::{integrate_covariance, physicality_check, solve_lyapunov, symplectic_eigenvalue, CovarianceMatrix};
use cavent_core::ledger::Ledger;
use cavent_core::lindyn::{stability, DiffusionMatrix, QuadratureDrift};
use cavent_core::physics::thermal_occupation;
use cavent_core::sweep::{run_point, PointStatus};
use nalgebra::Matrix4;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, bound: f64) -> Check {
    Check {
        name,
        passed: worst <= bound,
        detail: format!("worst deviation {worst:.3e} (bound {bound:.0e})"),
    }
}

fn tmsv(r: f64) -> CovarianceMatrix {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    #[rustfmt::skip]
    let v = Matrix4::new(
        c,   0.0, s,   0.0,
        0.0, c,   0.0, -s,
        s,   0.0, c,   0.0,
        0.0, -s,  0.0, c,
    );
    CovarianceMatrix { v }
}

fn gaussian_states() -> Check {
    let mut worst: f64 = 0.0;
    let two_eta = |v: &CovarianceMatrix| symplectic_eigenvalue(v).map(|x| x.two_eta).unwrap_or(f64::NAN);
    worst = worst.max((two_eta(&CovarianceMatrix::vacuum()) - 1.0).abs());
    for n in [0.5, 1.0, 5.0] {
        let cov = CovarianceMatrix { v: Matrix4::identity() * (n + 0.5) };
        worst = worst.max((two_eta(&cov) - (2.0 * n + 1.0)).abs());
    }
    for r in [0.5, 1.0, 2.0] {
        let cov = tmsv(r);
        worst = worst.max((two_eta(&cov) - (-2.0 * r).exp()).abs());
        if !physicality_check(&cov).physical {
            worst = f64::INFINITY;
        }
    }
    check("gaussian closed forms (vacuum, thermal, squeezed vacuum)", worst, 1e-10)
}

/// Deterministic, well-separated stable test drifts.
fn test_drifts() -> Vec<Matrix4<f64>> {
    (0..8)
        .map(|k| {
            let k = k as f64;
            let shear = Matrix4::from_fn(|i, j| (1.3 * (i as f64) + 2.1 * (j as f64) + k).sin());
            Matrix4::identity() * -(0.6 + 0.2 * k) + shear * 0.35
        })
        .filter(|a| stability(&QuadratureDrift { m: *a }).is_ok_and(|s| s.stable))
        .collect()
}

fn lyapunov_vs_integrator() -> Check {
    let mut worst: f64 = 0.0;
    let drifts = test_drifts();
    for (k, a) in drifts.iter().enumerate() {
        let a = QuadratureDrift { m: *a };
        let b = Matrix4::from_fn(|i, j| ((i * 4 + j + k) as f64 * 0.7).cos());
        let d = DiffusionMatrix { d: b * b.transpose() + Matrix4::identity() * 0.1 };
        let (Ok(v), Ok(report)) = (solve_lyapunov(&a, &d), stability(&a)) else {
            return check("Lyapunov solve against RK4 integration", f64::INFINITY, 1e-6);
        };
        let t_end = 20.0 / -report.max_real_part;
        let dt = 0.05 / a.m.norm();
        let zero = CovarianceMatrix { v: Matrix4::zeros() };
        match integrate_covariance(&a, &d, &zero, t_end, dt) {
            Ok(vt) => worst = worst.max((vt.v - v.v).abs().max() / v.v.abs().max()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    if drifts.is_empty() {
        worst = f64::INFINITY;
    }
    check("Lyapunov solve against RK4 integration", worst, 1e-6)
}

fn decoupled_pipeline() -> Check {
    let mut worst: f64 = 0.0;
    for t in [0.0, 80.0, 298.0] {
        let mut l = Ledger::default();
        l.coupling.q_scale = 0.0;
        l.operating.temperature = t;
        let Ok(r) = run_point(&l) else {
            return check("decoupled pipeline gives a thermal product state", f64::INFINITY, 1e-9);
        };
        let nc = thermal_occupation(r.params.oc.omega, t).unwrap_or(f64::NAN);
        let nw = thermal_occupation(r.params.mw.omega, t).unwrap_or(f64::NAN);
        let want = 2.0 * nc.min(nw) + 1.0;
        worst = worst.max(r.two_eta.map_or(f64::INFINITY, |e| (e - want).abs()));
    }
    check("decoupled pipeline gives a thermal product state", worst, 1e-9)
}

fn default_point() -> Check {
    match run_point(&Ledger::default()) {
        Ok(r) => Check {
            name: "default operating point",
            passed: r.stable == r.two_eta.is_some() && r.status != PointStatus::NonConverged,
            detail: format!("status {}, 2 eta {:?}", r.status, r.two_eta),
        },
        Err(e) => Check {
            name: "default operating point",
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run_all() -> Vec<Check> {
    vec![gaussian_states(), lyapunov_vs_integrator(), decoupled_pipeline(), default_point()]
}
