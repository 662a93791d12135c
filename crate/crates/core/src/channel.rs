//! Scenario geometry, link budget and random channel realizations.
//!
//! Users form a cluster, so every user shares the large-scale statistics of
//! the cluster center. The BS→RIS channel is a deterministic line-of-sight
//! term `g = σ_g · a_RIS`; the direct channels `h_k` and reflection channels
//! `f_k` are circularly-symmetric complex Gaussian.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Gain calibration that reproduces the published RIS-unaided baseline
/// (25.26 bits/s/Hz at K = 10). It equals the 20 dB difference between the
/// RIS and UE antenna gains, i.e. the direct link evaluated with the RIS gain.
pub const CALIBRATED_GAIN: f64 = 100.0;

/// A 2-D point in meters.
pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub bs_position: Point,
    pub ris_position: Point,
    pub cluster_center: Point,
    /// Number of users `K`.
    pub users: usize,
    /// Meta-atoms along x.
    pub qx: usize,
    /// Meta-atoms along y.
    pub qy: usize,
    pub carrier_freq_hz: f64,
    /// Inter-element spacing over wavelength, `d_RIS / λ0`.
    pub spacing_ratio: f64,
    pub pathloss_exponent: f64,
    pub gain_ris_dbi: f64,
    pub gain_ue_dbi: f64,
    pub eirp_dbm: f64,
    pub noise_dbm: f64,
    /// `ϱ = σ_f² σ_g² / σ_h²` in dB.
    pub rho_db: f64,
    /// Azimuth at the RIS, radians in `[0, 2π)`.
    pub azimuth_rad: f64,
    /// Elevation at the RIS, radians in `[-π/2, π/2)`.
    pub elevation_rad: f64,
    /// Multiplies `σ_h²` (see [`CALIBRATED_GAIN`]).
    pub gain_calibration: f64,
    /// `false` models the RIS-unaided downlink (`σ_f² = 0`).
    pub ris_enabled: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            bs_position: [0.0, 0.0],
            ris_position: [10.0, 0.0],
            cluster_center: [40.0, -10.0],
            users: 10,
            qx: 6,
            qy: 5,
            carrier_freq_hz: 25e9,
            spacing_ratio: 0.25,
            pathloss_exponent: 1.6,
            gain_ris_dbi: 25.0,
            gain_ue_dbi: 5.0,
            eirp_dbm: 33.0,
            noise_dbm: -100.0,
            rho_db: 0.0,
            azimuth_rad: 0.0,
            elevation_rad: 0.0,
            gain_calibration: 1.0,
            ris_enabled: true,
        }
    }
}

impl ScenarioConfig {
    /// Total number of meta-atoms `Q = Qx · Qy`.
    pub fn q(&self) -> usize {
        self.qx * self.qy
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        if self.users < 1 {
            return bad("users (K) must be >= 1".into());
        }
        if self.qx < 1 || self.qy < 1 {
            return bad(format!(
                "qx, qy must be >= 1 (got {} x {})",
                self.qx, self.qy
            ));
        }
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("spacing_ratio", self.spacing_ratio),
            ("pathloss_exponent", self.pathloss_exponent),
            ("gain_calibration", self.gain_calibration),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and > 0 (got {v})"));
            }
        }
        let finite = [
            ("gain_ris_dbi", self.gain_ris_dbi),
            ("gain_ue_dbi", self.gain_ue_dbi),
            ("eirp_dbm", self.eirp_dbm),
            ("noise_dbm", self.noise_dbm),
            ("rho_db", self.rho_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite (got {v})"));
            }
        }
        if !(0.0..2.0 * PI).contains(&self.azimuth_rad) {
            return bad(format!("azimuth_rad {} outside [0, 2π)", self.azimuth_rad));
        }
        if !(-PI / 2.0..PI / 2.0).contains(&self.elevation_rad) {
            return bad(format!(
                "elevation_rad {} outside [-π/2, π/2)",
                self.elevation_rad
            ));
        }
        for p in [self.bs_position, self.ris_position, self.cluster_center] {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return bad("positions must be finite".into());
            }
        }
        Ok(())
    }

    pub fn with_users(mut self, users: usize) -> Self {
        self.users = users;
        self
    }

    /// Sets `Q` as a `Q × 1` array. Capacity results only depend on `Q`.
    pub fn with_q(mut self, q: usize) -> Self {
        self.qx = q;
        self.qy = 1;
        self
    }

    pub fn with_rho_db(mut self, rho_db: f64) -> Self {
        self.rho_db = rho_db;
        self
    }

    pub fn without_ris(mut self) -> Self {
        self.ris_enabled = false;
        self
    }

    /// Directional cosines `(u_x, u_y)` of the RIS signature.
    pub fn directional_cosines(&self) -> (f64, f64) {
        let (st, (sp, cp)) = (self.azimuth_rad.sin(), self.elevation_rad.sin_cos());
        (st * cp, st * sp)
    }
}

/// Draws `(azimuth, elevation)` uniformly on `[0, 2π) × [-π/2, π/2)`.
pub fn draw_steering_angles<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let az = rng.random_range(0.0..2.0 * PI);
    let el = rng.random_range(-PI / 2.0..PI / 2.0);
    (az, el)
}

/// Per-trial random stream: ChaCha8 keyed by the master seed, with the trial
/// index selecting one of its 2^64 independent streams.
pub fn trial_stream(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Large-scale statistics derived from a [`ScenarioConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedLinkStats {
    pub sigma_h_sq: f64,
    pub sigma_g_sq: f64,
    pub sigma_f_sq: f64,
    /// Transmit power normalized by the noise power.
    pub p_tx: f64,
    pub u_x: f64,
    pub u_y: f64,
}

impl DerivedLinkStats {
    pub fn sigma_h(&self) -> f64 {
        self.sigma_h_sq.sqrt()
    }
    pub fn sigma_g(&self) -> f64 {
        self.sigma_g_sq.sqrt()
    }
    pub fn sigma_f(&self) -> f64 {
        self.sigma_f_sq.sqrt()
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `G · d^{-η} · λ0² / (4π)²` with `G` in dBi.
pub fn link_variance(
    gain_dbi: f64,
    distance_m: f64,
    pathloss_exponent: f64,
    wavelength: f64,
) -> f64 {
    let spread = wavelength / (4.0 * PI);
    db_to_linear(gain_dbi) * distance_m.powf(-pathloss_exponent) * spread * spread
}

pub fn derive_link_stats(cfg: &ScenarioConfig) -> Result<DerivedLinkStats> {
    cfg.validate()?;
    let d_g = distance(cfg.bs_position, cfg.ris_position);
    if d_g == 0.0 {
        return Err(Error::ZeroDistance {
            what: "BS and RIS positions",
        });
    }
    let d_h = distance(cfg.bs_position, cfg.cluster_center);
    if d_h == 0.0 {
        return Err(Error::ZeroDistance {
            what: "BS and cluster center",
        });
    }
    let lambda = cfg.wavelength();
    let sigma_g_sq = link_variance(cfg.gain_ris_dbi, d_g, cfg.pathloss_exponent, lambda);
    let sigma_h_sq =
        cfg.gain_calibration * link_variance(cfg.gain_ue_dbi, d_h, cfg.pathloss_exponent, lambda);
    let sigma_f_sq = if cfg.ris_enabled {
        db_to_linear(cfg.rho_db) * sigma_h_sq / sigma_g_sq
    } else {
        0.0
    };
    let (u_x, u_y) = cfg.directional_cosines();
    Ok(DerivedLinkStats {
        sigma_h_sq,
        sigma_g_sq,
        sigma_f_sq,
        p_tx: db_to_linear(cfg.eirp_dbm - cfg.noise_dbm),
        u_x,
        u_y,
    })
}

/// RIS signature `a_x ⊗ a_y`; entry `p·Qy + q` is
/// `exp(j 2π (d/λ) (p u_x + q u_y))`.
pub fn steering_vector(
    qx: usize,
    qy: usize,
    u_x: f64,
    u_y: f64,
    spacing_ratio: f64,
) -> Result<Vec<Complex64>> {
    if u_x.abs() > 1.0 || u_x.is_nan() {
        return Err(domain("u_x", u_x, "|u_x| <= 1"));
    }
    if u_y.abs() > 1.0 || u_y.is_nan() {
        return Err(domain("u_y", u_y, "|u_y| <= 1"));
    }
    let k = 2.0 * PI * spacing_ratio;
    let mut out = Vec::with_capacity(qx * qy);
    for p in 0..qx {
        for q in 0..qy {
            let phase = k * (p as f64 * u_x + q as f64 * u_y);
            out.push(Complex64::from_polar(1.0, phase));
        }
    }
    Ok(out)
}

/// One draw of all small-scale channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Direct channels `h_k`, length `K`.
    pub h: Vec<Complex64>,
    /// Reflection channels, row-major `K × Q`.
    pub f: Vec<Complex64>,
    /// BS→RIS channel `σ_g a_RIS`, length `Q`.
    pub g: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn users(&self) -> usize {
        self.h.len()
    }

    pub fn q(&self) -> usize {
        self.g.len()
    }

    pub fn f_row(&self, k: usize) -> &[Complex64] {
        let q = self.q();
        &self.f[k * q..(k + 1) * q]
    }

    /// `diag(f_k*) g`.
    pub fn reflected(&self, k: usize) -> Vec<Complex64> {
        self.f_row(k)
            .iter()
            .zip(&self.g)
            .map(|(f, g)| f.conj() * g)
            .collect()
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, std_per_dim: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_dim, im * std_per_dim)
}

/// Draws `h` first and then `f`, so runs that differ only in the reflection
/// statistics see the same direct channels for a given stream.
pub fn draw_realization<R: Rng + ?Sized>(
    stats: &DerivedLinkStats,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let k = cfg.users;
    let q = cfg.q();
    let sd_h = (stats.sigma_h_sq / 2.0).sqrt();
    let sd_f = (stats.sigma_f_sq / 2.0).sqrt();
    let h = (0..k).map(|_| complex_gaussian(rng, sd_h)).collect();
    let f = (0..k * q).map(|_| complex_gaussian(rng, sd_f)).collect();
    let sigma_g = stats.sigma_g();
    let g = steering_vector(cfg.qx, cfg.qy, stats.u_x, stats.u_y, cfg.spacing_ratio)?
        .into_iter()
        .map(|a| a * sigma_g)
        .collect();
    Ok(ChannelRealization { h, f, g })
}

/// Mean and variance of the reflected amplitude `Z = σ_g √Q ‖f_k‖`
/// (Nakagami with `m = Q`, `Ω = σ_f² σ_g² Q²`), exact and Stirling forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiReflStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_stirling: f64,
    pub variance_stirling: f64,
}

pub fn nakagami_refl_stats(q: usize, sigma_f: f64, sigma_g: f64) -> Result<NakagamiReflStats> {
    let ratio = specfun::gamma_ratio_half(q)?;
    let qf = q as f64;
    let s = sigma_f * sigma_g;
    Ok(NakagamiReflStats {
        mean: s * qf.sqrt() * ratio,
        variance: s * s * qf * qf * (1.0 - ratio * ratio / qf),
        mean_stirling: s * qf,
        variance_stirling: s * s * qf / 4.0,
    })
}
