//! Scenario files: flat `key = value` TOML. Every key is optional; missing
//! keys keep the [`ScenarioConfig::default`] value, unknown keys are an error.
//!
//! ```toml
//! # positions in meters
//! bs_position = [0.0, 0.0]
//! ris_position = [10.0, 0.0]
//! cluster_center = [40.0, -10.0]
//! users = 10
//! qx = 6
//! qy = 5
//! carrier_freq_hz = 25e9
//! spacing_ratio = 0.25
//! pathloss_exponent = 1.6
//! gain_ris_dbi = 25.0
//! gain_ue_dbi = 5.0
//! eirp_dbm = 33.0
//! noise_dbm = -100.0
//! rho_db = 0.0
//! gain_calibration = 100.0
//! # azimuth_rad / elevation_rad: drawn once from the master seed if absent
//! ```

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::channel::{draw_steering_angles, Point, ScenarioConfig};
use crate::error::{Error, Result};

/// ChaCha stream reserved for the one-per-scenario steering angle draw.
const ANGLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    bs_position: Option<Point>,
    ris_position: Option<Point>,
    cluster_center: Option<Point>,
    users: Option<usize>,
    qx: Option<usize>,
    qy: Option<usize>,
    carrier_freq_hz: Option<f64>,
    spacing_ratio: Option<f64>,
    pathloss_exponent: Option<f64>,
    gain_ris_dbi: Option<f64>,
    gain_ue_dbi: Option<f64>,
    eirp_dbm: Option<f64>,
    noise_dbm: Option<f64>,
    rho_db: Option<f64>,
    azimuth_rad: Option<f64>,
    elevation_rad: Option<f64>,
    gain_calibration: Option<f64>,
    ris_enabled: Option<bool>,
}

/// Parses scenario text. Angles missing from the file are drawn once from
/// `master_seed`.
pub fn parse_scenario(text: &str, master_seed: u64) -> Result<ScenarioConfig> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
    resolve(file, master_seed)
}

pub fn load_scenario(path: &Path, master_seed: u64) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
    parse_scenario(&text, master_seed)
}

/// Defaults with steering angles drawn from `master_seed`.
pub fn default_scenario(master_seed: u64) -> ScenarioConfig {
    resolve(ScenarioFile::default(), master_seed).expect("defaults are valid")
}

fn resolve(file: ScenarioFile, master_seed: u64) -> Result<ScenarioConfig> {
    let d = ScenarioConfig::default();
    let (az, el) = match (file.azimuth_rad, file.elevation_rad) {
        (Some(a), Some(e)) => (a, e),
        (a, e) => {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(ANGLE_STREAM);
            let (da, de) = draw_steering_angles(&mut rng);
            (a.unwrap_or(da), e.unwrap_or(de))
        }
    };
    let cfg = ScenarioConfig {
        bs_position: file.bs_position.unwrap_or(d.bs_position),
        ris_position: file.ris_position.unwrap_or(d.ris_position),
        cluster_center: file.cluster_center.unwrap_or(d.cluster_center),
        users: file.users.unwrap_or(d.users),
        qx: file.qx.unwrap_or(d.qx),
        qy: file.qy.unwrap_or(d.qy),
        carrier_freq_hz: file.carrier_freq_hz.unwrap_or(d.carrier_freq_hz),
        spacing_ratio: file.spacing_ratio.unwrap_or(d.spacing_ratio),
        pathloss_exponent: file.pathloss_exponent.unwrap_or(d.pathloss_exponent),
        gain_ris_dbi: file.gain_ris_dbi.unwrap_or(d.gain_ris_dbi),
        gain_ue_dbi: file.gain_ue_dbi.unwrap_or(d.gain_ue_dbi),
        eirp_dbm: file.eirp_dbm.unwrap_or(d.eirp_dbm),
        noise_dbm: file.noise_dbm.unwrap_or(d.noise_dbm),
        rho_db: file.rho_db.unwrap_or(d.rho_db),
        azimuth_rad: az,
        elevation_rad: el,
        gain_calibration: file.gain_calibration.unwrap_or(d.gain_calibration),
        ris_enabled: file.ris_enabled.unwrap_or(d.ris_enabled),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical text form of a resolved scenario (all keys, fixed order).
pub fn to_scenario_text(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario serializes")
}

/// First 16 hex digits of the SHA-256 of [`to_scenario_text`].
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let digest = Sha256::digest(to_scenario_text(cfg).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
