//! Figure sweeps, SNR scaling tables and the validation report.
//!
//! Every Monte Carlo run in a sweep uses the same master seed, so grid points
//! share common random numbers (trial `t` sees the same direct channels at
//! every `Q` and `ϱ`). The RIS-unaided baseline is run on the same streams,
//! which makes `ΔC̄` a paired difference.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytics::{
    avg_receive_snr, ergodic_capacity_gumbel, gumbel_constants_approx1, gumbel_constants_approx2,
    gumbel_constants_numeric, hardening_snr_decomposition, moment_match, snr_scaling_point,
    GammaLaw, ScalingRegime,
};
use crate::channel::{derive_link_stats, nakagami_refl_stats, DerivedLinkStats, ScenarioConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{
    empirical_moments, run_trials_with, RunOptions, RunningStats, TrialBatchResult,
};
use crate::ris_opt::{
    evaluate_objective, optimal_reflection, QuadraticObjective, ReflectionVector,
};
use crate::scenario::config_hash;
use crate::specfun::{gamma_ratio_half, inv_reg_lower_inc_gamma, reg_lower_inc_gamma};
use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shown in the validation report: the hardening law's support.
pub const SUPPORT_NOTE: &str = "note: the hardening (Approximation 1) cdf \
1 - exp(-(sqrt(a) - E[Z2])^2 / sigma_h^2) is used for a > E[Z2]^2, the squared mean \
reflected amplitude, because a = z^2 maps z > E[Z2] onto a > E[Z2]^2; a threshold of \
E[Z2] itself would not start the cdf at 0.";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3,
    Validate,
    SnrScaling,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::Validate => "validate",
            ExperimentKind::SnrScaling => "snr-scaling",
        }
    }

    pub fn default_grid(&self) -> Vec<usize> {
        match self {
            ExperimentKind::Fig1 => vec![2, 5, 10, 20, 50, 100],
            ExperimentKind::Fig2 | ExperimentKind::Fig3 => vec![5, 10, 20, 30, 50, 75, 100],
            ExperimentKind::SnrScaling => vec![10, 100, 1_000, 10_000, 100_000, 1_000_000],
            ExperimentKind::Validate => vec![],
        }
    }
}

pub const DEFAULT_RHO_DB: [f64; 5] = [-10.0, -5.0, 0.0, 5.0, 10.0];
pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 2023;
/// `K` of the capacity-versus-`Q` figures.
pub const FIG_Q_USERS: usize = 10;
/// `Q` of the capacity-versus-`K` figure.
pub const FIG1_Q: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// `K` grid for fig1 and snr-scaling, `Q` grid for fig2/fig3.
    pub grid: Vec<usize>,
    pub rho_db: Vec<f64>,
    pub n_trials: u64,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub regime: ScalingRegime,
    pub chi: f64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            grid: kind.default_grid(),
            rho_db: DEFAULT_RHO_DB.to_vec(),
            n_trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            workers: None,
            regime: ScalingRegime::QLinearInK,
            chi: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Experiment(m));
        if self.kind != ExperimentKind::Validate {
            if self.grid.is_empty() {
                return bad("grid must be nonempty".into());
            }
            if self.grid.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!("grid must be strictly increasing: {:?}", self.grid));
            }
        }
        match self.kind {
            ExperimentKind::Fig1 | ExperimentKind::SnrScaling if self.grid[0] < 2 => {
                return bad("K grid values must be >= 2".into())
            }
            ExperimentKind::Fig2 | ExperimentKind::Fig3 if self.grid[0] < 1 => {
                return bad("Q grid values must be >= 1".into())
            }
            _ => {}
        }
        if matches!(
            self.kind,
            ExperimentKind::Fig1 | ExperimentKind::Fig2 | ExperimentKind::Fig3
        ) {
            if self.rho_db.is_empty() {
                return bad("rho list must be nonempty".into());
            }
            if self.rho_db.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!(
                    "rho list must be strictly increasing: {:?}",
                    self.rho_db
                ));
            }
        }
        if self.n_trials == 0 {
            return bad("n_trials must be >= 1".into());
        }
        Ok(())
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            workers: self.workers,
            ..Default::default()
        }
    }
}

/// A CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
}

/// `%.12g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.*e}", digits - 1, x);
    // Rounding may bump the exponent (9.99…→10); read it back from `sci`.
    let exp_rounded: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(exp);
    if exp_rounded < -5 || exp_rounded >= digits as i32 {
        let (mant, e) = sci.split_once('e').expect("scientific");
        let mant = trim_zeros(mant);
        let e: i32 = e.parse().expect("exponent");
        format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp_rounded).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => f.write_str(&format_sig(*v, 12)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[idx] {
                    Cell::Int(v) => v as f64,
                    Cell::Num(v) => v,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {comment}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Plot-ready `(x, y, series)` triples: one series per `y` column and
    /// distinct value of `group` (if any).
    pub fn plot_triples(&self, x: &str, ys: &[&str], group: Option<&str>) -> Result<String> {
        let missing = |c: &str| Error::Experiment(format!("no column {c}"));
        let xs = self.column(x).ok_or_else(|| missing(x))?;
        let groups = match group {
            Some(g) => Some(self.column(g).ok_or_else(|| missing(g))?),
            None => None,
        };
        let mut out = String::from("x,y,series\n");
        for y in ys {
            let vals = self.column(y).ok_or_else(|| missing(y))?;
            for (i, (xv, yv)) in xs.iter().zip(&vals).enumerate() {
                let series = match (&groups, group) {
                    (Some(g), Some(name)) => format!("{y}[{name}={}]", format_sig(g[i], 12)),
                    _ => y.to_string(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    format_sig(*xv, 12),
                    format_sig(*yv, 12),
                    series
                );
            }
        }
        Ok(out)
    }
}

/// Comment line recorded at the top of every CSV.
pub fn csv_comment(spec: &ExperimentSpec, cfg: &ScenarioConfig) -> String {
    format!(
        "riscap {VERSION} experiment={} cfg_hash={} master_seed={} n_trials={}",
        spec.kind.name(),
        config_hash(cfg),
        spec.master_seed,
        spec.n_trials
    )
}

fn sigmas(stats: &DerivedLinkStats) -> (f64, f64, f64) {
    (stats.sigma_h(), stats.sigma_f(), stats.sigma_g())
}

/// Gumbel capacity with moment-matched gamma constants.
pub fn analytic_capacity_approx2(cfg: &ScenarioConfig) -> Result<f64> {
    let stats = derive_link_stats(cfg)?;
    let (sh, sf, sg) = sigmas(&stats);
    let p = moment_match(sh, sf, sg, cfg.q())?;
    ergodic_capacity_gumbel(&gumbel_constants_approx2(cfg.users, &p)?, stats.p_tx)
}

/// Gumbel capacity with hardening constants (Stirling mean `σ_f σ_g Q`).
pub fn analytic_capacity_approx1(cfg: &ScenarioConfig) -> Result<f64> {
    let stats = derive_link_stats(cfg)?;
    let (sh, sf, sg) = sigmas(&stats);
    ergodic_capacity_gumbel(
        &gumbel_constants_approx1(cfg.users, cfg.q(), sh, sf, sg)?,
        stats.p_tx,
    )
}

/// Gumbel capacity of the RIS-unaided downlink: `b_K = σ_h² ln K`, `a_K = σ_h²`.
pub fn analytic_capacity_no_ris(cfg: &ScenarioConfig) -> Result<f64> {
    let stats = derive_link_stats(cfg)?;
    ergodic_capacity_gumbel(
        &gumbel_constants_approx1(cfg.users, 0, stats.sigma_h(), 0.0, 0.0)?,
        stats.p_tx,
    )
}

fn paired_difference(ris: &TrialBatchResult, base: &TrialBatchResult) -> (f64, f64) {
    let mean = ris.capacity.mean - base.capacity.mean;
    let complete = ris.alpha_samples.len() as u64 == ris.n_trials
        && base.alpha_samples.len() as u64 == base.n_trials;
    let stderr = if complete && ris.n_trials >= 2 {
        let diffs: RunningStats = ris
            .capacity_samples()
            .zip(base.capacity_samples())
            .map(|(a, b)| a - b)
            .collect();
        diffs.std_error()
    } else {
        ris.capacity.std_error.hypot(base.capacity.std_error)
    };
    (mean, stderr)
}

/// `ΔC̄ = C̄(Q = 30) − C̄(no RIS)` versus `K`, Monte Carlo and Gumbel
/// (moment-matched) analysis.
pub fn run_fig1(base: &ScenarioConfig, spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let opts = spec.run_options();
    let mut table = Table::new(&["k", "rho_db", "mc_delta", "mc_stderr", "analytic_delta"]);
    for &k in &spec.grid {
        let cfg_k = base.clone().with_users(k).with_q(FIG1_Q);
        let no_ris = cfg_k.clone().without_ris();
        let base_mc = run_trials_with(&no_ris, spec.n_trials, spec.master_seed, &opts)?;
        let base_an = analytic_capacity_no_ris(&no_ris)?;
        for &rho in &spec.rho_db {
            let cfg = cfg_k.clone().with_rho_db(rho);
            let mc = run_trials_with(&cfg, spec.n_trials, spec.master_seed, &opts)?;
            let (delta, se) = paired_difference(&mc, &base_mc);
            let an = analytic_capacity_approx2(&cfg)? - base_an;
            table.rows.push(vec![
                Cell::Int(k as u64),
                Cell::Num(rho),
                Cell::Num(delta),
                Cell::Num(se),
                Cell::Num(an),
            ]);
        }
    }
    Ok(table)
}

fn run_capacity_vs_q(
    base: &ScenarioConfig,
    spec: &ExperimentSpec,
    analytic: fn(&ScenarioConfig) -> Result<f64>,
) -> Result<Table> {
    spec.validate()?;
    let opts = spec.run_options();
    let mut table = Table::new(&[
        "q",
        "rho_db",
        "mc_capacity",
        "mc_stderr",
        "analytic_capacity",
        "abs_error",
        "no_ris_mc",
        "no_ris_analytic",
    ]);
    let cfg_k = base.clone().with_users(FIG_Q_USERS);
    let no_ris = cfg_k.clone().without_ris();
    let ref_mc = run_trials_with(&no_ris, spec.n_trials, spec.master_seed, &opts)?;
    let ref_an = analytic_capacity_no_ris(&no_ris)?;
    for &q in &spec.grid {
        for &rho in &spec.rho_db {
            let cfg = cfg_k.clone().with_q(q).with_rho_db(rho);
            let mc = run_trials_with(&cfg, spec.n_trials, spec.master_seed, &opts)?;
            let an = analytic(&cfg)?;
            table.rows.push(vec![
                Cell::Int(q as u64),
                Cell::Num(rho),
                Cell::Num(mc.capacity.mean),
                Cell::Num(mc.capacity.std_error),
                Cell::Num(an),
                Cell::Num((mc.capacity.mean - an).abs()),
                Cell::Num(ref_mc.capacity.mean),
                Cell::Num(ref_an),
            ]);
        }
    }
    Ok(table)
}

/// `C̄` versus `Q` at `K = 10` against the hardening analysis.
pub fn run_fig2(base: &ScenarioConfig, spec: &ExperimentSpec) -> Result<Table> {
    run_capacity_vs_q(base, spec, analytic_capacity_approx1)
}

/// `C̄` versus `Q` at `K = 10` against the moment-matched analysis.
pub fn run_fig3(base: &ScenarioConfig, spec: &ExperimentSpec) -> Result<Table> {
    run_capacity_vs_q(base, spec, analytic_capacity_approx2)
}

/// Hardening-based average receive SNR over the `K` grid, normalized by the
/// regime's growth (`Q²` or `ln K`), next to its predicted limit.
pub fn run_snr_scaling(base: &ScenarioConfig, spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let stats = derive_link_stats(base)?;
    let (sh, sf, sg) = sigmas(&stats);
    let mut table = Table::new(&[
        "k",
        "q",
        "avg_snr",
        "normalized_snr",
        "limit",
        "relative_gap",
    ]);
    for &k in &spec.grid {
        let pt = snr_scaling_point(spec.regime, spec.chi, k, sh, sf, sg, stats.p_tx)?;
        table.rows.push(vec![
            Cell::Int(k as u64),
            Cell::Int(pt.q as u64),
            Cell::Num(pt.avg_snr),
            Cell::Num(pt.normalized),
            Cell::Num(pt.limit),
            Cell::Num(pt.relative_gap()),
        ]);
    }
    Ok(table)
}

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<34} measured={:<14} tolerance={}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                format_sig(c.measured, 6),
                format_sig(c.tolerance, 6)
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{SUPPORT_NOTE}");
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        );
        out
    }
}

struct Checker {
    scale: f64,
    checks: Vec<Check>,
}

impl Checker {
    fn check(&mut self, name: &'static str, measured: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        self.checks.push(Check {
            name,
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }
}

fn rand_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Runs reduced versions of the library's invariant suites. Tolerances are
/// multiplied by `tolerance_scale` (1 for a normal run).
pub fn run_validate(
    base: &ScenarioConfig,
    spec: &ExperimentSpec,
    tolerance_scale: f64,
) -> Result<ValidationReport> {
    spec.validate()?;
    let mut ck = Checker {
        scale: tolerance_scale,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.master_seed);
    let opts = spec.run_options();

    // Incomplete gamma inverse round trip.
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let y = rng.random_range(1e-6..1.0 - 1e-6);
        let a = rng.random_range(0.5..200.0);
        let x = inv_reg_lower_inc_gamma(y, a)?;
        worst = worst.max((reg_lower_inc_gamma(x, a)? - y).abs());
    }
    ck.check("incgamma_inverse_round_trip", worst, 1e-10);

    let mut worst: f64 = 0.0;
    let mut prev = gamma_ratio_half(1)?;
    for q in 1..5000usize {
        let next = gamma_ratio_half(q + 1)?;
        let want = prev * (q as f64 + 0.5) / q as f64;
        worst = worst.max(((next - want) / want).abs());
        prev = next;
    }
    ck.check("gamma_ratio_recurrence", worst, 1e-12);

    // Closed-form reflection against random feasible vectors.
    let (mut excess, mut decomposition): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    for i in 0..50 {
        let q = [1usize, 2, 4, 8][i % 4];
        let obj = QuadraticObjective::new(
            rand_complex(&mut rng),
            (0..q).map(|_| rand_complex(&mut rng)).collect(),
        );
        let best = evaluate_objective(&obj, &optimal_reflection(&obj, q)?)?;
        decomposition = decomposition.max(((best - obj.optimum()) / obj.optimum()).abs());
        for _ in 0..2000 {
            let g = ReflectionVector::normalized((0..q).map(|_| rand_complex(&mut rng)).collect())?;
            excess = excess.max(evaluate_objective(&obj, &g)? - best);
        }
    }
    ck.check("reflection_optimality_excess", excess.max(0.0), 1e-10);
    ck.check("reflection_decomposition", decomposition, 1e-10);

    // Moments of X_k against the closed form.
    let n = spec.n_trials.max(20_000);
    let cfg = base.clone().with_users(1).with_q(30).with_rho_db(0.0);
    let stats = derive_link_stats(&cfg)?;
    let (sh, sf, sg) = sigmas(&stats);
    let r = run_trials_with(&cfg, n, spec.master_seed, &opts)?;
    let emp = empirical_moments(&r.alpha_samples)?;
    let m = crate::analytics::x_moments(sh, sf, sg, 30)?;
    ck.check(
        "x_mean_z_score",
        ((emp.m1 - m.m1) / emp.m1_std_error).abs(),
        3.0,
    );
    ck.check(
        "x_second_moment_z_score",
        ((emp.m2 - m.m2) / emp.m2_std_error).abs(),
        3.0,
    );

    let p = moment_match(sh, 0.0, sg, 30)?;
    ck.check(
        "degenerate_moment_match",
        (p.m_hat - 0.5).abs() + (p.omega_hat / (sh * sh / 2.0) - 1.0).abs(),
        1e-12,
    );

    let mut worst: f64 = 0.0;
    let pm = moment_match(sh, sf, sg, 30)?;
    for k in [10usize, 100, 1000] {
        let closed = gumbel_constants_approx2(k, &pm)?;
        let numeric = gumbel_constants_numeric(&GammaLaw::new(pm), k)?;
        worst = worst
            .max(((closed.b_k - numeric.b_k) / numeric.b_k).abs())
            .max(((closed.a_k - numeric.a_k) / numeric.a_k).abs());
    }
    ck.check("gumbel_closed_vs_numeric", worst, 1e-8);

    let ns = nakagami_refl_stats(256, 1.0, 1.0)?;
    ck.check(
        "hardening_ratio_q256",
        (ns.variance / ns.mean.powi(2) * 4.0 * 256.0 - 1.0).abs(),
        0.01,
    );

    let d = hardening_snr_decomposition(10, 30, sh, sf, sg, stats.p_tx)?;
    let direct = avg_receive_snr(&gumbel_constants_approx1(10, 30, sh, sf, sg)?, stats.p_tx);
    ck.check(
        "snr_decomposition_identity",
        (d.total / direct - 1.0).abs(),
        1e-9,
    );

    // Worker-count independence.
    let small = base.clone().with_users(4).with_q(6);
    let one = run_trials_with(
        &small,
        2000,
        spec.master_seed,
        &RunOptions {
            workers: Some(1),
            ..opts
        },
    )?;
    let two = run_trials_with(
        &small,
        2000,
        spec.master_seed,
        &RunOptions {
            workers: Some(2),
            ..opts
        },
    )?;
    let mismatches = one
        .alpha_samples
        .iter()
        .zip(&two.alpha_samples)
        .filter(|(a, b)| a.to_bits() != b.to_bits())
        .count();
    ck.check("determinism_mismatches", mismatches as f64, 0.0);

    // Monte Carlo against the moment-matched Gumbel capacity (K = 10, Q = 30).
    let cfg = base.clone().with_users(10).with_q(30).with_rho_db(0.0);
    let mc = run_trials_with(&cfg, spec.n_trials, spec.master_seed, &opts)?;
    let an = analytic_capacity_approx2(&cfg)?;
    let gap = (mc.capacity.mean - an).abs();
    ck.check(
        "capacity_mc_vs_approx2_bits",
        gap,
        (3.0 * mc.capacity.std_error).max(0.5),
    );

    Ok(ValidationReport { checks: ck.checks })
}
