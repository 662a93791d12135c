//! Closed-form statistics of the per-user composite channel power
//! `X_k = (|h_k| + σ_g √Q ‖f_k‖)²` and of its maximum over `K` users.
//!
//! Two surrogate laws for `X_k` are provided:
//!
//! * [`HardeningLaw`] replaces the reflected amplitude by its mean
//!   (valid when the reflection channel hardens, large `Q`);
//! * [`GammaLaw`] is a gamma law whose first two moments match those of `X_k`.
//!
//! Either law feeds the extreme-value (Gumbel) constants in [`gumbel`] and the
//! capacity integrals in [`capacity`].

pub mod capacity;
pub mod gumbel;
mod laws;
mod moments;

pub use capacity::{
    avg_receive_snr, ergodic_capacity_finite_k, ergodic_capacity_gumbel,
    hardening_snr_decomposition, snr_scaling_point, ScalingPoint, ScalingRegime, SnrDecomposition,
};
pub use gumbel::{
    gumbel_constants_approx1, gumbel_constants_approx2, gumbel_constants_hardening,
    gumbel_constants_numeric, GumbelParams,
};
pub use laws::{ChannelPowerLaw, ExponentialLaw, GammaLaw, HardeningLaw};
pub use moments::{moment_match, x_moments, GammaApproxParams, HardeningApproxParams, XMoments};

use crate::error::{Error, Result};

/// Smallest `x` in `[lo, hi]` with `f(x) ≥ target` for nondecreasing `f`,
/// bisected to f64 resolution. `hi` is doubled (relative to `lo`) until it
/// brackets the target.
pub(crate) fn bisect_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    mut lo: f64,
    scale: f64,
    what: &'static str,
) -> Result<f64> {
    let mut step = scale.max(f64::MIN_POSITIVE);
    let mut hi = lo + step;
    let mut expansions = 0;
    while f(hi) < target {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::RootNotBracketed { what });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
