//! Post-hoc verification of abstract descent conditions on recorded traces:
//! sufficient decrease, relative subgradient error, finite length,
//! neighborhood containment, growth-condition sampling, and convergence-rate
//! classification by KL exponent.

use std::fmt::Write as _;

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ProxalError, Result};
use crate::trace::IterationTrace;

/// Steps below this are treated as zero when forming decrease ratios.
const ZERO_STEP: f64 = 1e-14;

/// Largest `a` such that `F(z^k) - F(z^{k+1}) >= a ||x^{k+1} - x^k||^2`
/// holds along the whole recorded trace (infimum of the per-iteration
/// ratios, restricted to nonzero steps). A positive value certifies the
/// sufficient-decrease condition; `+inf` means every step was zero.
pub fn check_h1(trace: &IterationTrace) -> Result<f64> {
    let records = trace.records();
    if records.len() < 2 || records.iter().any(|r| r.lyapunov.is_none()) {
        return Err(ProxalError::usage(
            "check_h1 needs at least two records with Lyapunov values",
        ));
    }
    let mut inf = f64::INFINITY;
    for j in 1..records.len() {
        let step = records[j].step_norm;
        if step < ZERO_STEP {
            continue;
        }
        let drop = records[j - 1].lyapunov.unwrap() - records[j].lyapunov.unwrap();
        inf = inf.min(drop / (step * step));
    }
    Ok(inf)
}

/// Smallest `b` with `||w^k|| <= (b/2)(||x^{k-1} - x^{k-2}|| + ||x^k - x^{k-1}||)`
/// at every recorded subgradient; `+inf` when subgradient data is missing or
/// a nonzero subgradient coincides with zero steps.
pub fn check_h2(trace: &IterationTrace) -> f64 {
    let records = trace.records();
    let mut sup = f64::NEG_INFINITY;
    let mut seen = false;
    for j in 1..records.len() {
        let Some(w) = records[j].subgrad_norm else {
            continue;
        };
        seen = true;
        let denom = records[j - 1].step_norm + records[j].step_norm;
        if denom < ZERO_STEP {
            if w > 1e-12 {
                return f64::INFINITY;
            }
            sup = sup.max(0.0);
        } else {
            sup = sup.max(2.0 * w / denom);
        }
    }
    if seen {
        sup.max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Total path length `Σ ||x^k - x^{k-1}||` plus a tail-decay flag: true iff
/// the last-quarter partial sum is below 10% of the total.
pub fn check_finite_length(trace: &IterationTrace) -> (f64, bool) {
    let steps: Vec<f64> = trace.records().iter().skip(1).map(|r| r.step_norm).collect();
    let total: f64 = steps.iter().sum();
    if steps.is_empty() || total <= 0.0 {
        return (total, true);
    }
    let tail_len = steps.len().div_ceil(4);
    let tail: f64 = steps[steps.len() - tail_len..].iter().sum();
    (total, tail < 0.1 * total)
}

/// First iteration whose doubled-space state `z^k = (x^k, x^{k-1})` leaves
/// the ball of radius `r` around `(center, center)`, or `None` if the whole
/// trace stays inside. Requires the trace to have stored full iterates.
pub fn check_containment(
    trace: &IterationTrace,
    center: &DVector<f64>,
    r: f64,
) -> Result<Option<usize>> {
    let iterates = trace
        .iterates()
        .ok_or_else(|| ProxalError::usage("check_containment needs recorded iterates"))?;
    for (k, x) in iterates.iter().enumerate() {
        if x.len() != center.len() {
            return Err(ProxalError::usage("containment center dimension mismatch"));
        }
        let prev = if k == 0 { &iterates[0] } else { &iterates[k - 1] };
        let d2 = (x - center).norm_squared() + (prev - center).norm_squared();
        if d2.sqrt() > r {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Sampling probe of the growth condition
/// `F(y) >= F(z*) - (a/16) ||y_2 - z_2*||^2` for `y_2` outside the
/// `delta`-ball around `z_2*`. A `true` result is evidence, not a proof.
/// Deterministic per seed; the accepted sample set does not depend on `a`,
/// so the outcome is monotone in `a`.
pub fn sample_growth_condition(
    f: &dyn Fn(&DVector<f64>) -> f64,
    z_star: &DVector<f64>,
    a: f64,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> bool {
    assert!(z_star.len() % 2 == 0, "z lives in the doubled space");
    let n = z_star.len() / 2;
    let f_star = f(z_star);
    let slack = 1e-12 * (1.0 + f_star.abs());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = 2.0 * delta;
    for _ in 0..n_samples {
        let mut y = z_star.clone();
        let mut tail_norm2;
        loop {
            tail_norm2 = 0.0;
            for i in 0..z_star.len() {
                let g: f64 = StandardNormal.sample(&mut rng);
                y[i] = z_star[i] + spread * g;
                if i >= n {
                    let d = y[i] - z_star[i];
                    tail_norm2 += d * d;
                }
            }
            if tail_norm2.sqrt() > delta {
                break;
            }
        }
        if f(&y) < f_star - (a / 16.0) * tail_norm2 - slack {
            return false;
        }
    }
    true
}

/// Convergence-rate class in terms of the KL exponent `theta` of the
/// underlying function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateClass {
    /// `theta = 1`: the limit is reached in finitely many iterations.
    Finite,
    /// `theta in [1/2, 1)`: geometric decay of the residuals.
    Linear,
    /// `theta in (0, 1/2)`: residuals decay like `k^{1/(2 theta - 1)}`.
    Sublinear { theta: f64 },
}

impl RateClass {
    pub fn theta_estimate(&self) -> Option<f64> {
        match self {
            RateClass::Finite => Some(1.0),
            RateClass::Linear => None,
            RateClass::Sublinear { theta } => Some(*theta),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RateClass::Finite => "finite".to_string(),
            RateClass::Linear => "linear".to_string(),
            RateClass::Sublinear { theta } => format!("sublinear(theta={theta:.4})"),
        }
    }
}

/// Classify a non-negative, non-increasing residual sequence.
///
/// Returns `None` when the sequence is not monotone within slack or carries
/// too little information. Fitting uses the last half of the iterations
/// whose residual sits above the noise floor; the geometric and power decay
/// models are both fit and the better explanation wins, which keeps slowly
/// varying power tails from masquerading as geometric ones.
pub fn classify_rate(residuals: &[f64]) -> Option<RateClass> {
    if residuals.len() < 4 {
        return None;
    }
    let scale = residuals[0].abs().max(1.0);
    let slack = 1e-12 * scale;
    for w in residuals.windows(2) {
        if w[1] > w[0] + slack || w[1] < -slack {
            return None;
        }
    }
    let floor = 100.0 * f64::EPSILON * scale;

    // Finite convergence: the sequence reaches the limit exactly and stays
    // there. Exact zeros are required so that a geometric tail dipping below
    // the noise floor is not mislabeled.
    let trailing_zeros = residuals
        .iter()
        .rev()
        .take_while(|&&r| r.abs() <= 1e-300)
        .count();
    if trailing_zeros >= 3 {
        return Some(RateClass::Finite);
    }

    let above: Vec<(usize, f64)> = residuals
        .iter()
        .enumerate()
        .filter(|&(k, &r)| k >= 1 && r > floor)
        .map(|(k, &r)| (k, r))
        .collect();
    if above.len() < 4 {
        return None;
    }
    let window = &above[above.len() / 2..];
    if window.len() < 3 {
        return None;
    }

    let xs_lin: Vec<f64> = window.iter().map(|&(k, _)| k as f64).collect();
    let xs_pow: Vec<f64> = window.iter().map(|&(k, _)| (k as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, r)| r.ln()).collect();

    let (slope_lin, r2_lin) = linear_fit(&xs_lin, &ys)?;
    let (slope_pow, r2_pow) = linear_fit(&xs_pow, &ys)?;

    if r2_lin >= 0.99 && r2_lin >= r2_pow && slope_lin < 0.0 {
        return Some(RateClass::Linear);
    }
    // Invert the sublinear exponent relation s = 1/(2 theta - 1).
    let s = slope_pow;
    let theta = ((1.0 + s) / (2.0 * s)).clamp(1e-6, 0.5 - 1e-6);
    Some(RateClass::Sublinear { theta })
}

/// Least-squares slope and R^2 of `y` against `x`; `None` if degenerate.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    Some((slope, 1.0 - ss_res / syy))
}

/// Classify the decay of the trace objective toward `f_limit`.
pub fn fit_kl_exponent(trace: &IterationTrace, f_limit: f64) -> Option<RateClass> {
    let residuals: Vec<f64> = trace
        .records()
        .iter()
        .map(|r| r.objective - f_limit)
        .collect();
    classify_rate(&residuals)
}

/// Outcome of a containment probe.
#[derive(Debug, Clone)]
pub struct ContainmentCheck {
    pub radius: f64,
    pub violated_at: Option<usize>,
}

/// Aggregated certificate values for one trace.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `None` when the trace has no Lyapunov column.
    pub h1_max_a: Option<f64>,
    pub h2_min_b: f64,
    pub finite_length_sum: f64,
    pub tail_decay: bool,
    pub containment: Option<ContainmentCheck>,
    pub rate_class: Option<RateClass>,
    pub theta_estimate: Option<f64>,
}

impl CertificateReport {
    /// Flat key-value block appended to benchmark reports.
    pub fn to_text_block(&self) -> String {
        let mut out = String::new();
        match self.h1_max_a {
            Some(a) => {
                let _ = writeln!(out, "h1_max_a: {a}");
            }
            None => {
                let _ = writeln!(out, "h1_max_a: n/a");
            }
        }
        let _ = writeln!(out, "h2_min_b: {}", self.h2_min_b);
        let _ = writeln!(out, "finite_length_sum: {}", self.finite_length_sum);
        let _ = writeln!(out, "tail_decay: {}", self.tail_decay);
        match &self.containment {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "containment: radius={} violated_at={}",
                    c.radius,
                    c.violated_at
                        .map(|k| k.to_string())
                        .unwrap_or_else(|| "none".to_string())
                );
            }
            None => {
                let _ = writeln!(out, "containment: n/a");
            }
        }
        match &self.rate_class {
            Some(rc) => {
                let _ = writeln!(out, "rate_class: {}", rc.label());
            }
            None => {
                let _ = writeln!(out, "rate_class: unclassified");
            }
        }
        match self.theta_estimate {
            Some(t) => {
                let _ = writeln!(out, "theta_estimate: {t}");
            }
            None => {
                let _ = writeln!(out, "theta_estimate: n/a");
            }
        }
        out
    }
}

/// Run every trace-level certificate.
///
/// Rate classification prefers the Lyapunov column (the function the descent
/// theory is stated for); the limit value is estimated by the column minimum.
pub fn certify_trace(trace: &IterationTrace) -> CertificateReport {
    let h1 = check_h1(trace).ok();
    let h2 = check_h2(trace);
    let (len_sum, tail_decay) = check_finite_length(trace);
    let series: Vec<f64> = if trace.records().iter().all(|r| r.lyapunov.is_some()) {
        trace.records().iter().map(|r| r.lyapunov.unwrap()).collect()
    } else {
        trace.records().iter().map(|r| r.objective).collect()
    };
    let rate = series
        .iter()
        .cloned()
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.min(v))))
        .and_then(|limit| {
            let residuals: Vec<f64> = series.iter().map(|v| v - limit).collect();
            classify_rate(&residuals)
        });
    CertificateReport {
        h1_max_a: h1,
        h2_min_b: h2,
        finite_length_sum: len_sum,
        tail_decay,
        containment: None,
        rate_class: rate,
        theta_estimate: rate.and_then(|r| r.theta_estimate()),
    }
}
