//! Reproducible Monte Carlo trial engine.
//!
//! Trial `t` always draws from `trial_stream(master_seed, t)`, and per-trial
//! results are reduced in trial order, so the output does not depend on the
//! number of workers or on scheduling.

use rayon::prelude::*;

use crate::channel::{derive_link_stats, draw_realization, trial_stream, ScenarioConfig};
use crate::error::{Error, Result};
use crate::ris_opt::{schedule, sum_rate};

pub const DEFAULT_SAMPLE_CAP: usize = 1_000_000;
const CHUNK: usize = 8192;

/// Streaming mean/variance with a compensated (Neumaier) sum for the mean and
/// Welford's update for the variance. Updates must be applied in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    sum: f64,
    comp: f64,
    welford_mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        let delta = x - self.welford_mean;
        self.welford_mean += delta / self.n as f64;
        self.m2 += delta * (x - self.welford_mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        (self.sum + self.comp) / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean(),
            std_error: self.std_error(),
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatchResult {
    /// `α_opt` per trial, in trial order, up to the sample cap.
    pub alpha_samples: Vec<f64>,
    /// Mean of `log2(1 + P α_opt)` in bits/s/Hz.
    pub capacity: Estimate,
    /// Mean receive SNR `P α_opt` (linear).
    pub snr: Estimate,
    pub n_trials: u64,
    pub master_seed: u64,
    pub p_tx: f64,
}

impl TrialBatchResult {
    /// Per-trial capacities recomputed from the stored samples.
    pub fn capacity_samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.alpha_samples.iter().map(|&a| sum_rate(self.p_tx, a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub sample_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: None,
            sample_cap: DEFAULT_SAMPLE_CAP,
        }
    }
}

pub fn run_trials(
    cfg: &ScenarioConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<TrialBatchResult> {
    run_trials_with(cfg, n_trials, master_seed, &RunOptions::default())
}

pub fn run_trials_with(
    cfg: &ScenarioConfig,
    n_trials: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<TrialBatchResult> {
    if n_trials == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let stats = derive_link_stats(cfg)?;
    let trial = |t: u64| -> Result<f64> {
        let mut rng = trial_stream(master_seed, t);
        let real = draw_realization(&stats, cfg, &mut rng)?;
        Ok(schedule(&real).alpha_opt)
    };

    let body = || -> Result<TrialBatchResult> {
        let mut alpha_samples = Vec::with_capacity(opts.sample_cap.min(n_trials as usize));
        let mut cap_stats = RunningStats::default();
        let mut snr_stats = RunningStats::default();
        let mut start = 0u64;
        while start < n_trials {
            let end = (start + CHUNK as u64).min(n_trials);
            let chunk: Vec<f64> = (start..end)
                .into_par_iter()
                .map(trial)
                .collect::<Result<_>>()?;
            for alpha in chunk {
                cap_stats.push(sum_rate(stats.p_tx, alpha));
                snr_stats.push(stats.p_tx * alpha);
                if alpha_samples.len() < opts.sample_cap {
                    alpha_samples.push(alpha);
                }
            }
            start = end;
        }
        Ok(TrialBatchResult {
            alpha_samples,
            capacity: cap_stats.estimate(),
            snr: snr_stats.estimate(),
            n_trials,
            master_seed,
            p_tx: stats.p_tx,
        })
    };

    match opts.workers {
        None => body(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Experiment(format!("thread pool: {e}")))?
            .install(body),
    }
}

/// Raw first and second sample moments with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub m1: f64,
    pub m2: f64,
    pub m1_std_error: f64,
    pub m2_std_error: f64,
    pub n: usize,
}

pub fn empirical_moments(samples: &[f64]) -> Result<SampleMoments> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let first: RunningStats = samples.iter().copied().collect();
    let second: RunningStats = samples.iter().map(|x| x * x).collect();
    Ok(SampleMoments {
        m1: first.mean(),
        m2: second.mean(),
        m1_std_error: first.std_error(),
        m2_std_error: second.std_error(),
        n: samples.len(),
    })
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n(x) − F(x)|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d)
}
