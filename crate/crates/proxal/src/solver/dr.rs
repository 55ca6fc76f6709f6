//! Douglas–Rachford splitting for the two-set feasibility problem
//! `min 0.5 dist(y, S1)^2 + indicator_{S2}(y)`, following the non-convex
//! splitting scheme of Li & Pong with an optional heuristic step-size
//! schedule.

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};
use crate::sets::SetProjection;
use crate::trace::{IterationTrace, RunStatus, TraceRecord};

use super::{diverged, ResidualFn, SolverConfig, DIVERGENCE_NORM};

/// Largest step-size parameter covered by the convergence guarantee when the
/// smooth part has a 1-Lipschitz gradient: `sqrt(3/2) - 1`.
pub const DR_GAMMA_SAFE: f64 = 0.224_744_871_391_589_05;

/// Heuristic schedule: start from `gamma_mult * gamma` and halve (never below
/// `0.9999 gamma`) whenever `||y^k - y^{k-1}|| > t / k`.
#[derive(Debug, Clone)]
pub struct DrHeuristic {
    pub gamma_mult: f64,
    pub t: f64,
}

impl Default for DrHeuristic {
    fn default() -> Self {
        DrHeuristic {
            gamma_mult: 150.0,
            t: 75.0,
        }
    }
}

/// One splitting pass per iteration:
///
/// ```text
/// y <- prox_{gamma f}(x)          f = 0.5 dist(., S1)^2
/// z <- P_{S2}(2y - x)
/// x <- x + z - y
/// ```
///
/// For the half-squared-distance to a convex set the first prox has the
/// closed form `y = x + gamma/(1+gamma) (P_{S1}(x) - x)`. The recorded
/// iterate is `z` (always inside `S2`).
pub fn douglas_rachford_run(
    p_smooth: &dyn SetProjection,
    p_constraint: &dyn SetProjection,
    gamma: f64,
    heuristic: Option<DrHeuristic>,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    douglas_rachford_run_with(p_smooth, p_constraint, gamma, heuristic, cfg, x0, None)
}

#[allow(clippy::too_many_arguments)]
pub fn douglas_rachford_run_with(
    p_smooth: &dyn SetProjection,
    p_constraint: &dyn SetProjection,
    gamma: f64,
    heuristic: Option<DrHeuristic>,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    if gamma <= 0.0 {
        return Err(ProxalError::usage("gamma must be positive"));
    }
    let gamma_floor = 0.9999 * gamma;
    let mut gamma_k = match &heuristic {
        Some(h) => h.gamma_mult * gamma,
        None => gamma,
    };

    let start = Instant::now();
    let mut trace = IterationTrace::new(cfg.record_iterates);
    let mut x = x0.clone();
    let mut y_prev: Option<DVector<f64>> = None;

    let res0 = residual_fn.map(|r| r(&x));
    trace.push(
        TraceRecord {
            objective: res0.map(|r| 0.5 * r * r).unwrap_or(0.0),
            lyapunov: None,
            step_norm: 0.0,
            subgrad_norm: None,
            residual: res0,
            time_s: start.elapsed().as_secs_f64(),
        },
        cfg.record_iterates.then_some(&x),
    );
    if let Some(r) = res0 {
        if r <= cfg.tol {
            trace.status = RunStatus::Converged;
            return Ok(trace);
        }
    }

    for k in 1..=cfg.max_iters {
        let ps = p_smooth.project(&x);
        let y = &x + (ps - &x) * (gamma_k / (1.0 + gamma_k));
        let reflected = &y * 2.0 - &x;
        let z = p_constraint.project(&reflected);
        let x_next = &x + &z - &y;

        if let (Some(h), Some(yp)) = (&heuristic, &y_prev) {
            if (&y - yp).norm() > h.t / k as f64 {
                gamma_k = (gamma_k / 2.0).max(gamma_floor);
            }
        }

        let step_norm = (&x_next - &x).norm();
        let residual = residual_fn.map(|r| r(&z));
        let objective = match residual {
            Some(r) => 0.5 * r * r,
            None => 0.5 * (&z - &y).norm_squared(),
        };

        trace.push(
            TraceRecord {
                objective,
                lyapunov: None,
                step_norm,
                subgrad_norm: None,
                residual,
                time_s: start.elapsed().as_secs_f64(),
            },
            cfg.record_iterates.then_some(&z),
        );

        if diverged(objective) || x_next.norm() > DIVERGENCE_NORM {
            trace.status = RunStatus::Diverged;
            return Ok(trace);
        }
        let converged = match residual {
            Some(r) => r <= cfg.tol,
            None => step_norm <= cfg.tol,
        };
        y_prev = Some(y);
        x = x_next;
        if converged {
            trace.status = RunStatus::Converged;
            return Ok(trace);
        }
    }
    trace.status = RunStatus::MaxIters;
    Ok(trace)
}
