//! Plain, averaged, and relaxed alternating projection iterations.

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};
use crate::sets::SetProjection;
use crate::trace::{IterationTrace, RunStatus, TraceRecord};

use super::{diverged, ResidualFn, SolverConfig, DIVERGENCE_NORM};

struct ProjectionLoop<'a> {
    cfg: &'a SolverConfig,
    residual_fn: Option<ResidualFn<'a>>,
    trace: IterationTrace,
    start: Instant,
}

impl<'a> ProjectionLoop<'a> {
    fn new(cfg: &'a SolverConfig, residual_fn: Option<ResidualFn<'a>>) -> Self {
        ProjectionLoop {
            cfg,
            residual_fn,
            trace: IterationTrace::new(cfg.record_iterates),
            start: Instant::now(),
        }
    }

    /// Record the state `x^k` and decide whether to stop. `objective` is the
    /// problem-specific merit recorded for plotting (half squared distance to
    /// the partner set unless a residual metric supersedes it).
    fn observe(&mut self, k: usize, x: &DVector<f64>, x_prev: &DVector<f64>, objective: f64) -> bool {
        let step_norm = (x - x_prev).norm();
        let residual = self.residual_fn.map(|r| r(x));
        self.trace.push(
            TraceRecord {
                objective,
                lyapunov: None,
                step_norm,
                subgrad_norm: None,
                residual,
                time_s: self.start.elapsed().as_secs_f64(),
            },
            self.cfg.record_iterates.then_some(x),
        );
        if diverged(objective) || x.norm() > DIVERGENCE_NORM {
            self.trace.status = RunStatus::Diverged;
            return true;
        }
        let converged = match residual {
            Some(r) => r <= self.cfg.tol,
            None => k > 0 && step_norm <= self.cfg.tol,
        };
        if converged {
            self.trace.status = RunStatus::Converged;
            return true;
        }
        if k == self.cfg.max_iters {
            self.trace.status = RunStatus::MaxIters;
            return true;
        }
        false
    }

    fn into_trace(self) -> IterationTrace {
        self.trace
    }
}

/// Alternating projections `X <- P1(P2(X))`.
pub fn alternating_projection_run(
    p1: &dyn SetProjection,
    p2: &dyn SetProjection,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    alternating_projection_run_with(p1, p2, cfg, x0, None)
}

pub fn alternating_projection_run_with(
    p1: &dyn SetProjection,
    p2: &dyn SetProjection,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    let mut state = ProjectionLoop::new(cfg, residual_fn);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    for k in 0..=cfg.max_iters {
        let mid = p2.project(&x);
        let objective = 0.5 * (&x - &mid).norm_squared();
        if state.observe(k, &x, &x_prev, objective) {
            break;
        }
        let x_next = p1.project(&mid);
        x_prev = x;
        x = x_next;
    }
    Ok(state.into_trace())
}

/// Averaged projections `X <- (P1(X) + P2(X)) / 2`.
pub fn averaged_projection_run(
    p1: &dyn SetProjection,
    p2: &dyn SetProjection,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    averaged_projection_run_with(p1, p2, cfg, x0, None)
}

pub fn averaged_projection_run_with(
    p1: &dyn SetProjection,
    p2: &dyn SetProjection,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    let mut state = ProjectionLoop::new(cfg, residual_fn);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    for k in 0..=cfg.max_iters {
        let q1 = p1.project(&x);
        let q2 = p2.project(&x);
        let objective = 0.5 * ((&x - &q1).norm_squared() + (&x - &q2).norm_squared());
        if state.observe(k, &x, &x_prev, objective) {
            break;
        }
        let x_next = (q1 + q2) * 0.5;
        x_prev = x;
        x = x_next;
    }
    Ok(state.into_trace())
}

/// Relaxed alternating projections with optional inertia:
/// `X <- P_target((1 - alpha) X + alpha P_relax(X) + beta (X - X_prev))`.
///
/// `p_target` is the (possibly non-convex) set projected onto last;
/// `p_relax` must be convex for the global guarantee. Requires
/// `beta in [0, 1/2)` and `alpha in (0, 1 - 2 beta)`.
pub fn relaxed_alternating_projection_run(
    p_target: &dyn SetProjection,
    p_relax: &dyn SetProjection,
    alpha: f64,
    beta: f64,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    relaxed_alternating_projection_run_with(p_target, p_relax, alpha, beta, cfg, x0, None)
}

#[allow(clippy::too_many_arguments)]
pub fn relaxed_alternating_projection_run_with(
    p_target: &dyn SetProjection,
    p_relax: &dyn SetProjection,
    alpha: f64,
    beta: f64,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    if !(0.0..0.5).contains(&beta) {
        return Err(ProxalError::usage("relaxed projection requires beta in [0, 1/2)"));
    }
    if !cfg.allow_inadmissible && (alpha <= 0.0 || alpha >= 1.0 - 2.0 * beta) {
        return Err(ProxalError::usage(format!(
            "relaxed projection requires alpha in (0, {}), got {alpha}",
            1.0 - 2.0 * beta
        )));
    }
    let mut state = ProjectionLoop::new(cfg, residual_fn);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    for k in 0..=cfg.max_iters {
        let relax = p_relax.project(&x);
        let objective = 0.5 * (&x - &relax).norm_squared();
        if state.observe(k, &x, &x_prev, objective) {
            break;
        }
        let blended = &x * (1.0 - alpha) + relax * alpha + (&x - &x_prev) * beta;
        let x_next = p_target.project(&blended);
        x_prev = x;
        x = x_next;
    }
    Ok(state.into_trace())
}
