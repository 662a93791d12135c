//! Sum-rate capacity of an opportunistic time-sharing downlink assisted by a
//! reconfigurable intelligent surface (RIS).
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] — log-gamma, gamma ratios and the regularized lower
//!   incomplete gamma function with its inverse.
//! * [`channel`] — scenario geometry, link budget, steering vector and random
//!   channel realizations.
//! * [`ris_opt`] — closed-form reflection vector, per-user objective and
//!   opportunistic scheduling.
//! * [`analytics`] — moment-matched gamma and channel-hardening approximations,
//!   Gumbel constants, capacity integrals and SNR scaling laws.
//! * [`montecarlo`] — reproducible, parallel trial engine and sample statistics.
//! * [`experiments`] — figure sweeps and the validation report used by the CLI.

pub mod analytics;
pub mod channel;
mod error;
pub mod experiments;
pub mod montecarlo;
pub mod quadrature;
pub mod ris_opt;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
