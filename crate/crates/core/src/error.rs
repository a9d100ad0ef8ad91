// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::sweep::CalibrationRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady-state iteration did not converge after {iterations} iterations (last residual {last_residual:.3e})")]
    NonConvergence { last_residual: f64, iterations: usize },

    /// The quadrature drift picked up an imaginary part; the complex drift was
    /// not conjugation-symmetric.
    #[error("quadrature basis change left an imaginary residue {residue:.3e} (bound {bound:.3e})")]
    BasisError { residue: f64, bound: f64 },

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("drift matrix is not strictly stable (max Re lambda = {max_real_part:.6e}); no stationary state")]
    UnstableSystem { max_real_part: f64 },

    #[error("Lyapunov residual {residual:.3e} exceeds bound {bound:.3e}")]
    IllConditioned { residual: f64, bound: f64 },

    #[error("integration step {dt:.3e} s violates dt < {limit:.3e} s")]
    StepSizeError { dt: f64, limit: f64 },

    #[error("covariance matrix is not physical: {0}")]
    NonPhysical(String),

    #[error("calibration failed: no q_scale in the search range satisfies all criteria (nearest miss q_scale = {:.6e})", .nearest.q_scale)]
    CalibrationFailure { nearest: Box<CalibrationRecord> },

    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),

    #[error("at grid point {index} ({coords}): {source}")]
    AtGridPoint {
        index: usize,
        coords: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("serialization: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
