//! Ergodic sum-rate capacity integrals, average receive SNR and its scaling
//! laws in `K` and `Q`.

use crate::error::{domain, Result};
use crate::quadrature::{integrate_with_breaks, DEFAULT_ABS_TOL, DEFAULT_MAX_SUBDIVISIONS};
use crate::ris_opt::sum_rate;
use crate::EULER_GAMMA;

use super::{gumbel_constants_approx1, ChannelPowerLaw, GumbelParams};

/// `∫₀^∞ log2(1 + P α) g(α) dα` with `g` the Gumbel pdf, truncated to
/// `[max(0, b − 20a), b + 50a]`.
pub fn ergodic_capacity_gumbel(g: &GumbelParams, p_tx: f64) -> Result<f64> {
    if g.a_k.is_nan() || g.a_k < 0.0 {
        return Err(domain("a_K", g.a_k, "a_K >= 0"));
    }
    if g.a_k == 0.0 {
        return Ok(sum_rate(p_tx, g.b_k.max(0.0)));
    }
    let (a, b) = (g.a_k, g.b_k);
    let lo = (b - 20.0 * a).max(0.0);
    let hi = b + 50.0 * a;
    if hi <= lo {
        return Ok(0.0);
    }
    let mut breaks: Vec<f64> = [
        lo,
        b - 3.0 * a,
        b - a,
        b,
        b + 2.0 * a,
        b + 6.0 * a,
        b + 15.0 * a,
        hi,
    ]
    .into_iter()
    .map(|x| x.clamp(lo, hi))
    .collect();
    breaks.dedup();
    let r = integrate_with_breaks(
        |alpha| sum_rate(p_tx, alpha) * g.pdf(alpha),
        &breaks,
        DEFAULT_ABS_TOL,
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(r.value)
}

/// `∫ log2(1 + P α) K f(α) F(α)^{K−1} dα` over the range where
/// `F ∈ [1e-12, 1 − 1e-12]`.
pub fn ergodic_capacity_finite_k<L: ChannelPowerLaw + ?Sized>(
    law: &L,
    k: usize,
    p_tx: f64,
) -> Result<f64> {
    if k < 1 {
        return Err(domain("K", k as f64, "K >= 1"));
    }
    let kf = k as f64;
    let lo = law.quantile(1e-12)?;
    let hi = law.quantile(1.0 - 1e-12)?;
    // Partition at quantiles of the maximum: P(max ≤ x) = F(x)^K.
    let mut breaks = vec![lo];
    for p_max in [1e-6, 0.05, 0.3, 0.6, 0.9, 0.99, 1.0 - 1e-6] {
        let p = f64::powf(p_max, 1.0 / kf);
        if p > 1e-12 && p < 1.0 - 1e-12 {
            breaks.push(law.quantile(p)?);
        }
    }
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let r = integrate_with_breaks(
        |alpha| {
            let f = law.pdf(alpha);
            if f == 0.0 {
                return 0.0;
            }
            let cdf = law.cdf(alpha);
            let weight = if k == 1 {
                f
            } else {
                kf * f * cdf.powf(kf - 1.0)
            };
            sum_rate(p_tx, alpha) * weight
        },
        &breaks,
        DEFAULT_ABS_TOL,
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(r.value)
}

/// `P_TX (b_K + C a_K)`, the mean of the Gumbel law scaled by the power.
pub fn avg_receive_snr(g: &GumbelParams, p_tx: f64) -> f64 {
    p_tx * (g.b_k + EULER_GAMMA * g.a_k)
}

/// Average receive SNR under channel hardening, split into the RIS-unaided
/// term, the `Q²` reflection term and the `Q` cross term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDecomposition {
    pub total: f64,
    pub no_ris_part: f64,
    pub q_squared_part: f64,
    pub cross_part: f64,
}

pub fn hardening_snr_decomposition(
    k: usize,
    q: usize,
    sigma_h: f64,
    sigma_f: f64,
    sigma_g: f64,
    p_tx: f64,
) -> Result<SnrDecomposition> {
    if k < 2 {
        return Err(domain("K", k as f64, "K >= 2"));
    }
    let ln_k = (k as f64).ln();
    let qf = q as f64;
    let s = sigma_f * sigma_g;
    let no_ris_part = p_tx * sigma_h * sigma_h * (EULER_GAMMA + ln_k);
    let q_squared_part = p_tx * s * s * qf * qf;
    let cross_part = p_tx * s * sigma_h * qf * (2.0 * ln_k + EULER_GAMMA) / ln_k.sqrt();
    Ok(SnrDecomposition {
        total: no_ris_part + q_squared_part + cross_part,
        no_ris_part,
        q_squared_part,
        cross_part,
    })
}

/// How `Q` grows with `K` in the SNR scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRegime {
    /// `Q = ⌈χ K⌉`; SNR normalized by `Q²`.
    QLinearInK,
    /// `Q = ⌈χ √ln K⌉`; SNR normalized by `ln K`.
    QSqrtLogK,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub k: usize,
    pub q: usize,
    pub avg_snr: f64,
    pub normalized: f64,
    pub limit: f64,
}

impl ScalingPoint {
    pub fn relative_gap(&self) -> f64 {
        (self.normalized - self.limit) / self.limit
    }
}

impl ScalingRegime {
    pub fn q_for(&self, k: usize, chi: f64) -> usize {
        let kf = k as f64;
        let raw = match self {
            ScalingRegime::QLinearInK => chi * kf,
            ScalingRegime::QSqrtLogK => chi * kf.ln().sqrt(),
        };
        // Guard against 30.000000000000004-style ceilings.
        let rounded = raw.round();
        if (raw - rounded).abs() <= 1e-9 * raw.abs().max(1.0) {
            rounded as usize
        } else {
            raw.ceil() as usize
        }
    }

    /// Predicted limit of the normalized SNR as `K → ∞`.
    pub fn limit(&self, chi: f64, sigma_h: f64, sigma_f: f64, sigma_g: f64, p_tx: f64) -> f64 {
        let s = sigma_f * sigma_g;
        match self {
            ScalingRegime::QLinearInK => p_tx * s * s,
            ScalingRegime::QSqrtLogK => {
                p_tx * ((s * chi + sigma_h).powi(2) + EULER_GAMMA * s * sigma_h * chi)
            }
        }
    }
}

/// Hardening-based average receive SNR at one `K` of a scaling sweep.
pub fn snr_scaling_point(
    regime: ScalingRegime,
    chi: f64,
    k: usize,
    sigma_h: f64,
    sigma_f: f64,
    sigma_g: f64,
    p_tx: f64,
) -> Result<ScalingPoint> {
    match regime {
        ScalingRegime::QLinearInK if chi.is_nan() || chi <= 0.0 => {
            return Err(domain("chi", chi, "chi > 0 when Q grows linearly in K"))
        }
        _ if !(chi >= 0.0 && chi.is_finite()) => return Err(domain("chi", chi, "chi >= 0")),
        _ => {}
    }
    let q = regime.q_for(k, chi);
    let g = gumbel_constants_approx1(k, q, sigma_h, sigma_f, sigma_g)?;
    let avg_snr = avg_receive_snr(&g, p_tx);
    let norm = match regime {
        ScalingRegime::QLinearInK => (q as f64).powi(2),
        ScalingRegime::QSqrtLogK => (k as f64).ln(),
    };
    Ok(ScalingPoint {
        k,
        q,
        avg_snr,
        normalized: avg_snr / norm,
        limit: regime.limit(chi, sigma_h, sigma_f, sigma_g, p_tx),
    })
}
