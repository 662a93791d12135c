use crate::error::{domain, Result};
use crate::specfun::{inv_reg_lower_inc_gamma, reg_lower_inc_gamma, unit_gamma_density};

use super::{bisect_increasing, GammaApproxParams, HardeningApproxParams};

/// A continuous law on `[support_start, ∞)` for the per-user channel power.
pub trait ChannelPowerLaw {
    fn cdf(&self, alpha: f64) -> f64;
    fn pdf(&self, alpha: f64) -> f64;

    fn support_start(&self) -> f64 {
        0.0
    }

    /// Order of magnitude of the law; seeds bracketing searches.
    fn typical_scale(&self) -> f64;

    /// Smallest `α` with `cdf(α) ≥ p`, by bisection.
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain("p", p, "0 <= p < 1"));
        }
        if p == 0.0 {
            return Ok(self.support_start());
        }
        bisect_increasing(
            |a| self.cdf(a),
            p,
            self.support_start(),
            self.typical_scale(),
            "cdf quantile",
        )
    }
}

/// Exponential law with the given mean: `|h|²` without an RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialLaw {
    pub mean: f64,
}

impl ChannelPowerLaw for ExponentialLaw {
    fn cdf(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            0.0
        } else {
            -(-alpha / self.mean).exp_m1()
        }
    }

    fn pdf(&self, alpha: f64) -> f64 {
        if alpha < 0.0 {
            0.0
        } else {
            (-alpha / self.mean).exp() / self.mean
        }
    }

    fn typical_scale(&self) -> f64 {
        self.mean
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain("p", p, "0 <= p < 1"));
        }
        Ok(-self.mean * (-p).ln_1p())
    }
}

/// Moment-matched gamma surrogate: shape `2m̂`, scale `Ω̂/m̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub params: GammaApproxParams,
}

impl GammaLaw {
    pub fn new(params: GammaApproxParams) -> Self {
        Self { params }
    }
}

impl ChannelPowerLaw for GammaLaw {
    fn cdf(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            return 0.0;
        }
        reg_lower_inc_gamma(alpha / self.params.scale(), self.params.shape()).unwrap_or(f64::NAN)
    }

    fn pdf(&self, alpha: f64) -> f64 {
        if alpha < 0.0 {
            return 0.0;
        }
        let theta = self.params.scale();
        unit_gamma_density(alpha / theta, self.params.shape()) / theta
    }

    fn typical_scale(&self) -> f64 {
        self.params.mean()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.params.scale() * inv_reg_lower_inc_gamma(p, self.params.shape())?)
    }
}

/// Hardening surrogate: `X = (|h| + μ)²` with `μ = E[Z^(2)]` deterministic.
///
/// Support starts at `μ²`, the square of the pinned reflected amplitude,
/// because `α = z²` maps `z > μ` onto `α > μ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardeningLaw {
    pub params: HardeningApproxParams,
}

impl HardeningLaw {
    pub fn new(params: HardeningApproxParams) -> Self {
        Self { params }
    }
}

impl ChannelPowerLaw for HardeningLaw {
    fn cdf(&self, alpha: f64) -> f64 {
        let mu = self.params.mean_z2;
        if alpha <= mu * mu {
            return 0.0;
        }
        let excess = alpha.sqrt() - mu;
        -(-excess * excess / self.params.sigma_h_sq).exp_m1()
    }

    fn pdf(&self, alpha: f64) -> f64 {
        let mu = self.params.mean_z2;
        if alpha <= mu * mu {
            return 0.0;
        }
        let root = alpha.sqrt();
        let excess = root - mu;
        let s2 = self.params.sigma_h_sq;
        excess / (s2 * root) * (-excess * excess / s2).exp()
    }

    fn support_start(&self) -> f64 {
        self.params.mean_z2 * self.params.mean_z2
    }

    fn typical_scale(&self) -> f64 {
        let mu = self.params.mean_z2;
        let s2 = self.params.sigma_h_sq;
        // E[(|h| + μ)²] − μ²
        s2 + mu * (std::f64::consts::PI * s2).sqrt()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain("p", p, "0 <= p < 1"));
        }
        let r = (-self.params.sigma_h_sq * (-p).ln_1p()).sqrt();
        Ok((self.params.mean_z2 + r).powi(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn gamma_law_examples() {
        let exp_like = GammaLaw::new(GammaApproxParams {
            m_hat: 0.5,
            omega_hat: 0.5,
        });
        assert_eq!(exp_like.cdf(0.0), 0.0);
        for &a in &[0.1, 1.0, 3.7] {
            assert!((exp_like.cdf(a) - (1.0 - (-a).exp())).abs() < 1e-14);
        }
        let erlang = GammaLaw::new(GammaApproxParams {
            m_hat: 1.0,
            omega_hat: 1.0,
        });
        for &a in &[0.1, 1.0, 3.7] {
            assert!((erlang.pdf(a) - a * (-a).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_pdf_integrates_to_one() {
        for &(m, o) in &[(0.5, 2.0), (1.0, 1.0), (5.46, 3.0), (50.0, 0.01)] {
            let law = GammaLaw::new(GammaApproxParams {
                m_hat: m,
                omega_hat: o,
            });
            let hi = law.quantile(1.0 - 1e-15).unwrap();
            let r = integrate(|a| law.pdf(a), 0.0, hi, 1e-11, 10_000).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "m={m}: {}", r.value);
        }
    }

    #[test]
    fn hardening_law_examples() {
        let law = HardeningLaw::new(HardeningApproxParams {
            mean_z2: 3.0,
            sigma_h_sq: 2.0,
        });
        assert_eq!(law.cdf(9.0), 0.0);
        assert_eq!(law.support_start(), 9.0);
        assert!(law.cdf(1e9) > 1.0 - 1e-15);
        let none = HardeningLaw::new(HardeningApproxParams {
            mean_z2: 0.0,
            sigma_h_sq: 2.0,
        });
        for &a in &[0.5, 2.0, 9.0] {
            assert!((none.cdf(a) - (1.0 - (-a / 2.0).exp())).abs() < 1e-15);
            assert!((none.pdf(a) - (-a / 2.0).exp() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hardening_pdf_is_cdf_derivative() {
        let law = HardeningLaw::new(HardeningApproxParams {
            mean_z2: 3.0,
            sigma_h_sq: 2.0,
        });
        for &a in &[9.5, 12.0, 20.0, 40.0] {
            let h = 1e-5;
            let fd = (law.cdf(a + h) - law.cdf(a - h)) / (2.0 * h);
            assert!((fd - law.pdf(a)).abs() < 1e-8);
        }
        let r = integrate(|a| law.pdf(a), 9.0, 400.0, 1e-12, 10_000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quantiles_invert_cdf() {
        let laws: Vec<Box<dyn ChannelPowerLaw>> = vec![
            Box::new(ExponentialLaw { mean: 2.5 }),
            Box::new(GammaLaw::new(GammaApproxParams {
                m_hat: 3.2,
                omega_hat: 4.0,
            })),
            Box::new(HardeningLaw::new(HardeningApproxParams {
                mean_z2: 3.0,
                sigma_h_sq: 2.0,
            })),
        ];
        for law in &laws {
            for &p in &[1e-9, 0.1, 0.5, 0.9, 1.0 - 1e-6] {
                let x = law.quantile(p).unwrap();
                assert!((law.cdf(x) - p).abs() < 1e-11, "p={p}");
            }
            assert!(law.quantile(1.0).is_err());
        }
    }
}
