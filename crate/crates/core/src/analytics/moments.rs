use crate::channel::nakagami_refl_stats;
use crate::error::{domain, Error, Result};
use crate::specfun::log_gamma_ratio;

/// First two raw moments of `X_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XMoments {
    pub m1: f64,
    pub m2: f64,
}

impl XMoments {
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }
}

fn check_sigmas(sigma_h: f64, sigma_f: f64, sigma_g: f64, q: usize) -> Result<()> {
    for (name, v) in [
        ("sigma_h", sigma_h),
        ("sigma_f", sigma_f),
        ("sigma_g", sigma_g),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(name, v, "finite and >= 0"));
        }
    }
    if q < 1 {
        return Err(domain("Q", q as f64, "Q >= 1"));
    }
    Ok(())
}

/// `E[X_k]` and `E[X_k²]` from the Rayleigh moments of `|h_k|` and the chi
/// moments of `‖f_k‖`, with exact gamma ratios.
pub fn x_moments(sigma_h: f64, sigma_f: f64, sigma_g: f64, q: usize) -> Result<XMoments> {
    check_sigmas(sigma_h, sigma_f, sigma_g, q)?;
    let qf = q as f64;
    let r_half = log_gamma_ratio(qf, 0.5)?.exp();
    let r_three_half = log_gamma_ratio(qf, 1.5)?.exp();
    let s = sigma_f * sigma_g;
    let sqrt_q_pi = (qf * std::f64::consts::PI).sqrt();
    let h2 = sigma_h * sigma_h;

    let m1 = h2 + s * s * qf * qf + s * sigma_h * sqrt_q_pi * r_half;
    let m2 = 2.0 * h2 * h2
        + 3.0 * s * sigma_h * h2 * sqrt_q_pi * r_half
        + 6.0 * s * s * h2 * qf * qf
        + 2.0 * s * s * s * sigma_h * qf * sqrt_q_pi * r_three_half
        + s.powi(4) * qf.powi(3) * (qf + 1.0);
    Ok(XMoments { m1, m2 })
}

/// Shape `m̂` and scale `Ω̂` of the moment-matched surrogate. The surrogate
/// power `X̂` is gamma with shape `2m̂` and scale `Ω̂/m̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApproxParams {
    pub m_hat: f64,
    pub omega_hat: f64,
}

impl GammaApproxParams {
    pub fn shape(&self) -> f64 {
        2.0 * self.m_hat
    }

    pub fn scale(&self) -> f64 {
        self.omega_hat / self.m_hat
    }

    pub fn mean(&self) -> f64 {
        2.0 * self.omega_hat
    }

    pub fn second_moment(&self) -> f64 {
        2.0 * self.omega_hat * self.omega_hat * (2.0 * self.m_hat + 1.0) / self.m_hat
    }
}

/// Matches `E[X̂] = E[X]` and `E[X̂²] = E[X²]`.
pub fn moment_match(
    sigma_h: f64,
    sigma_f: f64,
    sigma_g: f64,
    q: usize,
) -> Result<GammaApproxParams> {
    let m = x_moments(sigma_h, sigma_f, sigma_g, q)?;
    let var = m.variance();
    if !(m.m1 > 0.0 && var > 0.0) {
        return Err(Error::NumericalDegeneracy(format!(
            "moment matching needs E[X] > 0 and E[X^2] > E[X]^2 (m1 = {}, m2 = {})",
            m.m1, m.m2
        )));
    }
    Ok(GammaApproxParams {
        m_hat: m.m1 * m.m1 / (2.0 * var),
        omega_hat: m.m1 / 2.0,
    })
}

/// Parameters of the hardening surrogate: the reflected amplitude is pinned
/// at its exact mean `E[σ_g √Q ‖f_k‖]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardeningApproxParams {
    pub mean_z2: f64,
    pub sigma_h_sq: f64,
}

impl HardeningApproxParams {
    pub fn new(sigma_h: f64, sigma_f: f64, sigma_g: f64, q: usize) -> Result<Self> {
        check_sigmas(sigma_h, sigma_f, sigma_g, q)?;
        if sigma_h == 0.0 {
            return Err(domain("sigma_h", sigma_h, "> 0"));
        }
        Ok(Self {
            mean_z2: nakagami_refl_stats(q, sigma_f, sigma_g)?.mean,
            sigma_h_sq: sigma_h * sigma_h,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_ratio_half;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn no_reflection_is_exponential() {
        let m = x_moments(1.7, 0.0, 0.4, 12).unwrap();
        let h2 = 1.7f64 * 1.7;
        assert!((m.m1 - h2).abs() < 1e-14);
        assert!((m.m2 - 2.0 * h2 * h2).abs() < 1e-13);
    }

    #[test]
    fn no_direct_path_single_atom() {
        let m = x_moments(0.0, 1.0, 1.0, 1).unwrap();
        assert_eq!(m.m1, 1.0);
        assert_eq!(m.m2, 2.0);
    }

    #[test]
    fn unit_sigmas_q4_closed_form() {
        let m = x_moments(1.0, 1.0, 1.0, 4).unwrap();
        let want = 1.0
            + 16.0
            + 2.0 * std::f64::consts::PI.sqrt() * (libm::lgamma(4.5) - libm::lgamma(4.0)).exp();
        assert!((m.m1 - want).abs() < 1e-12);
        assert!(m.m2 > m.m1 * m.m1);
    }

    #[test]
    fn unit_sigmas_q4_monte_carlo() {
        // X = (|h| + 2 ‖f‖)², h ~ CN(0,1), f ~ CN(0, I_4).
        let n = 10_000_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut normal = || -> f64 { rng.sample::<f64, _>(StandardNormal) * s };
        let (mut sum, mut sum2, mut sum4) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let h = normal().hypot(normal());
            let f: f64 = (0..8).map(|_| normal().powi(2)).sum::<f64>().sqrt();
            let x = (h + 2.0 * f).powi(2);
            sum += x;
            sum2 += x * x;
            sum4 += (x * x).powi(2);
        }
        let nf = n as f64;
        let (e1, e2) = (sum / nf, sum2 / nf);
        let se1 = ((e2 - e1 * e1) / nf).sqrt();
        let se2 = ((sum4 / nf - e2 * e2) / nf).sqrt();
        let m = x_moments(1.0, 1.0, 1.0, 4).unwrap();
        assert!((e1 - m.m1).abs() <= 3.0 * se1, "{e1} vs {}", m.m1);
        assert!((e2 - m.m2).abs() <= 3.0 * se2, "{e2} vs {}", m.m2);
    }

    #[test]
    fn moment_match_degenerate_reduction() {
        let sh = 0.8f64;
        let p = moment_match(sh, 0.0, 1.0, 30).unwrap();
        assert_eq!(p.m_hat, 0.5);
        assert_eq!(p.omega_hat, sh * sh / 2.0);
        assert_eq!(p.shape(), 1.0);
        assert!((p.scale() - sh * sh).abs() < 1e-16);
    }

    #[test]
    fn moment_match_round_trip() {
        for &(sh, sf, sg, q) in &[
            (1.0, 1.0, 1.0, 30),
            (0.3, 2.0, 0.1, 7),
            (2.0, 0.05, 3.0, 100),
        ] {
            let p = moment_match(sh, sf, sg, q).unwrap();
            let m = x_moments(sh, sf, sg, q).unwrap();
            assert!((p.mean() / m.m1 - 1.0).abs() < 1e-12);
            assert!((p.second_moment() / m.m2 - 1.0).abs() < 1e-12);
            // gamma mean = shape·scale, variance = shape·scale²
            assert!((p.shape() * p.scale() / m.m1 - 1.0).abs() < 1e-12);
            assert!((p.shape() * p.scale().powi(2) / m.variance() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_match_rejects_all_zero() {
        assert!(matches!(
            moment_match(0.0, 0.0, 1.0, 4),
            Err(Error::NumericalDegeneracy(_))
        ));
        assert!(x_moments(-1.0, 1.0, 1.0, 4).is_err());
        assert!(x_moments(1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn hardening_params_use_exact_mean() {
        let p = HardeningApproxParams::new(1.0, 0.5, 2.0, 30).unwrap();
        let want = 0.5 * 2.0 * 30f64.sqrt() * gamma_ratio_half(30).unwrap();
        assert!((p.mean_z2 - want).abs() < 1e-12);
        assert_eq!(p.sigma_h_sq, 1.0);
    }
}
