//! Gumbel limit of the maximum of `K` i.i.d. channel powers.
//!
//! `b_K = F⁻¹(1 − 1/K)` and `a_K = 1 / (K f(b_K))`.

use crate::error::{domain, Result};
use crate::specfun::{inv_reg_lower_inc_gamma, log_gamma};
use crate::EULER_GAMMA;

use super::{bisect_increasing, ChannelPowerLaw, GammaApproxParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelParams {
    /// Scale `a_K`.
    pub a_k: f64,
    /// Location `b_K`.
    pub b_k: f64,
}

impl GumbelParams {
    pub fn cdf(&self, alpha: f64) -> f64 {
        (-(-(alpha - self.b_k) / self.a_k).exp()).exp()
    }

    pub fn pdf(&self, alpha: f64) -> f64 {
        let t = (alpha - self.b_k) / self.a_k;
        (-t - (-t).exp()).exp() / self.a_k
    }

    pub fn mean(&self) -> f64 {
        self.b_k + EULER_GAMMA * self.a_k
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        Err(domain("K", k as f64, "K >= 2"))
    } else {
        Ok(())
    }
}

/// Gumbel constants of an arbitrary law, with `b_K` found by bracketed
/// bisection on the cdf.
pub fn gumbel_constants_numeric<L: ChannelPowerLaw + ?Sized>(
    law: &L,
    k: usize,
) -> Result<GumbelParams> {
    check_k(k)?;
    let target = 1.0 - 1.0 / k as f64;
    let b_k = bisect_increasing(
        |a| law.cdf(a),
        target,
        law.support_start(),
        law.typical_scale(),
        "F(b_K) = 1 - 1/K",
    )?;
    Ok(GumbelParams {
        a_k: 1.0 / (k as f64 * law.pdf(b_k)),
        b_k,
    })
}

/// Closed-form constants of the hardening law for a given pinned reflected
/// amplitude `mean_z2`. Exact for that law.
pub fn gumbel_constants_hardening(k: usize, mean_z2: f64, sigma_h: f64) -> Result<GumbelParams> {
    check_k(k)?;
    let root_ln_k = (k as f64).ln().sqrt();
    Ok(GumbelParams {
        b_k: (mean_z2 + sigma_h * root_ln_k).powi(2),
        a_k: sigma_h * sigma_h + mean_z2 * sigma_h / root_ln_k,
    })
}

/// Hardening constants with the Stirling mean `σ_f σ_g Q` of the reflected
/// amplitude. `Q = 0` gives the RIS-unaided constants `(σ_h² ln K, σ_h²)`.
pub fn gumbel_constants_approx1(
    k: usize,
    q: usize,
    sigma_h: f64,
    sigma_f: f64,
    sigma_g: f64,
) -> Result<GumbelParams> {
    gumbel_constants_hardening(k, sigma_f * sigma_g * q as f64, sigma_h)
}

/// Closed-form constants of the moment-matched gamma law; `a_K` is formed in
/// the log domain.
pub fn gumbel_constants_approx2(k: usize, p: &GammaApproxParams) -> Result<GumbelParams> {
    check_k(k)?;
    let shape = p.shape();
    let scale = p.scale();
    let x = inv_reg_lower_inc_gamma(1.0 - 1.0 / k as f64, shape)?;
    let ln_a = scale.ln() + log_gamma(shape)? - (k as f64).ln() - (shape - 1.0) * x.ln() + x;
    Ok(GumbelParams {
        a_k: ln_a.exp(),
        b_k: scale * x,
    })
}
