// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use cavent_core::steadystate::SystemParams;
use cavent_core::sweep::{PointResult, PointStatus};
use cavent_core::Error;
use num_complex::Complex64;
use serde::Serialize;

/// `2 eta` within this distance of 1 is reported as the separability
/// boundary.
const BOUNDARY: f64 = 1e-9;

fn complex(z: Complex64) -> String {
    format!("{:.9e} {} {:.9e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

pub fn verdict(r: &PointResult) -> String {
    match (r.two_eta, r.entangled) {
        (Some(e), Some(true)) => format!("2η = {e:.6}, entangled"),
        (Some(e), _) if (e - 1.0).abs() <= BOUNDARY => format!("2η = {e:.6}, separable (boundary)"),
        (Some(e), _) => format!("2η = {e:.6}, separable"),
        (None, _) => match r.status {
            PointStatus::Unstable => format!(
                "no stationary state (max Re λ = {:+.6e} rad/s)",
                r.max_real_part.unwrap_or(f64::NAN)
            ),
            PointStatus::NonConverged => {
                format!("no steady state: mean-field iteration stopped after {} iterations", r.iterations)
            }
            PointStatus::IllConditioned => "no certified covariance: Lyapunov residual above bound".into(),
            PointStatus::NonPhysical => "no certified covariance: uncertainty relation violated".into(),
            PointStatus::Ok => "no verdict".into(),
        },
    }
}

pub fn point_report(r: &PointResult) -> String {
    let p = &r.params;
    let mut s = String::new();
    let _ = writeln!(s, "temperature          {} K", p.temperature);
    let _ = writeln!(s, "detunings            Delta_c = {:.6e} rad/s, Delta_w = {:.6e} rad/s", p.delta_c, p.delta_w);
    let _ = writeln!(s, "photocurrent         {:.6e} A", r.photocurrent);
    let _ = writeln!(s, "q_oc                 {:.6e} rad/s", r.q_oc);
    if r.status == PointStatus::NonConverged {
        let _ = writeln!(s, "steady state         not converged ({} iterations)", r.iterations);
    } else {
        let _ = writeln!(s, "alpha                {}", complex(r.alpha));
        let _ = writeln!(s, "beta                 {}", complex(r.beta));
        let _ = writeln!(
            s,
            "linearization        {}",
            if r.linearization_valid { "valid (|alpha|, |beta| > 10)" } else { "questionable (|alpha| or |beta| <= 10)" }
        );
    }
    if let Some(m) = r.max_real_part {
        let kind = if r.marginally_stable {
            "marginally stable"
        } else if m < 0.0 {
            "stable"
        } else {
            "unstable"
        };
        let _ = writeln!(s, "stability            {kind} (max Re λ = {m:+.6e} rad/s)");
        for (k, z) in r.eigenvalues.iter().enumerate() {
            let _ = writeln!(s, "  λ{}                 {}", k + 1, complex(*z));
        }
    }
    let _ = writeln!(s, "verdict              {}", verdict(r));
    s
}

#[derive(Serialize)]
struct PointRecord<'a> {
    status: String,
    verdict: String,
    q_oc: f64,
    photocurrent: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
    linearization_valid: bool,
    stable: bool,
    marginally_stable: bool,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_real_part: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entangled: Option<bool>,
    eigenvalues: Vec<[f64; 2]>,
    params: &'a SystemParams,
}

pub fn point_record(r: &PointResult) -> Result<String, Error> {
    let converged = r.status != PointStatus::NonConverged;
    let pair = |z: Complex64| [z.re, z.im];
    let rec = PointRecord {
        status: r.status.to_string(),
        verdict: verdict(r),
        q_oc: r.q_oc,
        photocurrent: r.photocurrent,
        alpha: if converged { pair(r.alpha) } else { [0.0; 2] },
        beta: if converged { pair(r.beta) } else { [0.0; 2] },
        linearization_valid: r.linearization_valid,
        stable: r.stable,
        marginally_stable: r.marginally_stable,
        iterations: r.iterations,
        max_real_part: r.max_real_part,
        two_eta: r.two_eta,
        entangled: r.entangled,
        eigenvalues: r.eigenvalues.iter().map(|z| pair(*z)).collect(),
        params: &r.params,
    };
    toml::to_string(&rec).map_err(|e| Error::Serialize(e.to_string()))
}
