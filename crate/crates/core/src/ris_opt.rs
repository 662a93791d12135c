//! Closed-form reflection design and opportunistic user selection.
//!
//! For user `k` the composite channel power is
//! `|h|² + 2 Re{βᴴγ} + γᴴ B γ` with `β = h v`, `B = v vᴴ` and
//! `v = diag(f*) g`. Under `‖γ‖² = Q` it is maximised by
//! `γ = √Q (h/|h|) v/‖v‖`, reaching `(|h| + √Q ‖v‖)²`.

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Relative tolerance on `‖γ‖² = Q`.
const PASSIVITY_TOL: f64 = 1e-9;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// The vector `γ` entering the objective. Its entries are the conjugates of
/// the per-atom reflection coefficients (see [`ReflectionVector::coefficients`]).
/// Always satisfies the lossless global-passivity constraint `‖γ‖² = Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionVector(Vec<Complex64>);

impl ReflectionVector {
    pub fn new(gamma: Vec<Complex64>) -> Result<Self> {
        let q = gamma.len() as f64;
        let energy: f64 = gamma.iter().map(|c| c.norm_sqr()).sum();
        if gamma.is_empty() || ((energy - q) / q).abs() > PASSIVITY_TOL {
            return Err(Error::NumericalDegeneracy(format!(
                "reflection vector energy {energy} violates ||gamma||^2 = Q = {q}"
            )));
        }
        Ok(Self(gamma))
    }

    /// Rescales an arbitrary non-zero vector onto `‖γ‖² = Q`.
    pub fn normalized(gamma: Vec<Complex64>) -> Result<Self> {
        let n = norm(&gamma);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NumericalDegeneracy(
                "cannot normalize zero vector".into(),
            ));
        }
        let scale = (gamma.len() as f64).sqrt() / n;
        Ok(Self(gamma.into_iter().map(|c| c * scale).collect()))
    }

    /// `√Q e_1`, used when no reflected path exists.
    pub fn canonical(q: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); q];
        v[0] = Complex64::new((q as f64).sqrt(), 0.0);
        Self(v)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Per-atom coefficients `γ_q` (the diagonal of `Γ`).
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.0.iter().map(|c| c.conj()).collect()
    }
}

/// Quadratic objective of one user, stored through its rank-one factor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    pub h: Complex64,
    /// `diag(f*) g`.
    pub v: Vec<Complex64>,
}

impl QuadraticObjective {
    pub fn new(h: Complex64, v: Vec<Complex64>) -> Self {
        Self { h, v }
    }

    pub fn for_user(real: &ChannelRealization, k: usize) -> Self {
        Self {
            h: real.h[k],
            v: real.reflected(k),
        }
    }

    pub fn v_norm(&self) -> f64 {
        norm(&self.v)
    }

    /// `(|h| + √Q ‖v‖)²`, the optimum value.
    pub fn optimum(&self) -> f64 {
        let q = self.v.len() as f64;
        (self.h.norm() + q.sqrt() * self.v_norm()).powi(2)
    }
}

/// `γ = √Q (h/|h|) v/‖v‖`, with `h/|h| := 1` when `h = 0`.
pub fn optimal_reflection(obj: &QuadraticObjective, q: usize) -> Result<ReflectionVector> {
    if obj.v.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: obj.v.len(),
        });
    }
    let vn = obj.v_norm();
    if vn == 0.0 {
        return Err(Error::DegenerateReflection);
    }
    let hn = obj.h.norm();
    let phase = if hn == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        obj.h / hn
    };
    let scale = phase * ((q as f64).sqrt() / vn);
    Ok(ReflectionVector(obj.v.iter().map(|v| v * scale).collect()))
}

/// `|h|² + 2 Re{βᴴγ} + |vᴴγ|²`.
pub fn evaluate_objective(obj: &QuadraticObjective, gamma: &ReflectionVector) -> Result<f64> {
    if obj.v.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: obj.v.len(),
            got: gamma.len(),
        });
    }
    // vᴴγ
    let proj: Complex64 = obj
        .v
        .iter()
        .zip(gamma.as_slice())
        .map(|(v, g)| v.conj() * g)
        .sum();
    // βᴴγ = h* vᴴγ
    let cross = (obj.h.conj() * proj).re;
    Ok(obj.h.norm_sqr() + 2.0 * cross + proj.norm_sqr())
}

/// `c_k = h_k + gᴴ Γ* f_k`, evaluated from the channel definition.
pub fn composite_channel(
    real: &ChannelRealization,
    k: usize,
    gamma: &ReflectionVector,
) -> Complex64 {
    // Γ* = diag(γ_q*), and γ_q* is the stored entry.
    let reflected: Complex64 = real
        .g
        .iter()
        .zip(gamma.as_slice())
        .zip(real.f_row(k))
        .map(|((g, gm), f)| g.conj() * gm * f)
        .sum();
    real.h[k] + reflected
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulingOutcome {
    /// Zero-based index of the scheduled user.
    pub k_max: usize,
    pub alpha_opt: f64,
    pub gamma_opt: ReflectionVector,
}

/// Per-user optimum `(|h_k| + √Q ‖diag(f_k*) g‖)²`.
pub fn user_gains(real: &ChannelRealization) -> impl Iterator<Item = f64> + '_ {
    let sqrt_q = (real.q() as f64).sqrt();
    (0..real.users()).map(move |k| {
        let vn: f64 = real
            .f_row(k)
            .iter()
            .zip(&real.g)
            .map(|(f, g)| (f.conj() * g).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (real.h[k].norm() + sqrt_q * vn).powi(2)
    })
}

/// Best user and its composite power, without building `γ`.
pub fn best_user(real: &ChannelRealization) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, a) in user_gains(real).enumerate() {
        // strict: ties keep the lowest index
        if a > best.1 {
            best = (k, a);
        }
    }
    best
}

/// Opportunistic time sharing: serve the user with the largest optimised
/// composite channel power.
pub fn schedule(real: &ChannelRealization) -> SchedulingOutcome {
    let (k_max, alpha_opt) = best_user(real);
    let obj = QuadraticObjective::for_user(real, k_max);
    let gamma_opt = match optimal_reflection(&obj, real.q()) {
        Ok(g) => g,
        Err(_) => ReflectionVector::canonical(real.q()),
    };
    SchedulingOutcome {
        k_max,
        alpha_opt,
        gamma_opt,
    }
}

/// `log2(1 + P_TX α)` in bits/s/Hz.
pub fn sum_rate(p_tx: f64, alpha: f64) -> f64 {
    (p_tx * alpha).ln_1p() / std::f64::consts::LN_2
}
