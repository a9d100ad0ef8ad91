// SPDX-License-Identifier: Apache-2.0

//! Optical/microwave cavity entanglement through an optoelectronic
//! (photodetector + varactor) cross-Kerr coupling.
//!
//! The pipeline for one operating point is
//!
//! 1. [`photodiode`]: interband absorption rate of the detector, which sets
//!    the cross-Kerr rate `q_oc` and the photocurrent;
//! 2. [`steadystate`]: mean fields `alpha = <a>`, `beta = <b>` of the driven,
//!    coupled cavities;
//! 3. [`lindyn`]: linearized fluctuation drift, thermal diffusion and the
//!    eigenvalue stability verdict;
//! 4. [`coventangle`]: stationary quadrature covariance (Lyapunov) and the
//!    smallest partially-transposed symplectic eigenvalue `2 eta`;
//! 5. [`sweep`]: composition of the above over parameter grids, CSV output
//!    and the calibration ledger.
//!
//! All frequencies are angular (rad/s) and all quantities SI unless a name
//! says otherwise (`*_ev`, `*_over_w`).

// Input guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coventangle;
pub mod error;
pub mod ledger;
pub mod lindyn;
pub mod photodiode;
pub mod physics;
pub mod steadystate;
pub mod sweep;

pub use error::{Error, Result};
