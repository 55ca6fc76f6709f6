//! Inertial averaged and alternating proximal minimization.
//!
//! Both methods are Heavy-ball / inertial proximal gradient applied to
//! Moreau-envelope objectives, rewritten so that only proximal mappings of
//! the original functions are evaluated.

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};
use crate::oracle::{Convexity, ProxOracle};
use crate::trace::{IterationTrace, RunStatus, TraceRecord};

use super::{analysis_kappa, step_size_bound, diverged, ResidualFn, SolverConfig, DIVERGENCE_NORM};

/// `x_{k+1} = (1 - alpha/lambda) x_k + (alpha / (M lambda)) Σ prox_lambda f_i(x_k)
///  + beta (x_k - x_{k-1})`.
///
/// This is the Heavy-ball method on `h = Σ_i M_lambda f_i` with the `1/M`
/// scaling folded into the update; the trace objective records `h`.
/// Requires `alpha < 2 (1 - beta) lambda`.
pub fn inertial_averaged_prox_run(
    oracles: &[std::sync::Arc<dyn ProxOracle>],
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    inertial_averaged_prox_run_with(oracles, cfg, x0, None)
}

pub fn inertial_averaged_prox_run_with(
    oracles: &[std::sync::Arc<dyn ProxOracle>],
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    if oracles.is_empty() {
        return Err(ProxalError::usage("need at least one prox oracle"));
    }
    if cfg.lambda <= 0.0 {
        return Err(ProxalError::usage("lambda must be positive"));
    }
    if !cfg.allow_inadmissible && cfg.alpha >= 2.0 * (1.0 - cfg.beta) * cfg.lambda {
        return Err(ProxalError::usage(format!(
            "alpha = {} violates the bound 2 (1 - beta) lambda = {}",
            cfg.alpha,
            2.0 * (1.0 - cfg.beta) * cfg.lambda
        )));
    }

    let m = oracles.len() as f64;
    let start = Instant::now();
    let mut trace = IterationTrace::new(cfg.record_iterates);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();

    for k in 0..=cfg.max_iters {
        let mut objective = 0.0;
        let mut prox_sum = DVector::zeros(x.len());
        for g in oracles {
            let p = g.prox(cfg.lambda, &x)?;
            objective += g.eval(&p) + (&x - &p).norm_squared() / (2.0 * cfg.lambda);
            prox_sum += p;
        }
        // grad of Σ M_lambda f_i at x.
        let grad = (&x * m - &prox_sum) / cfg.lambda;
        let grad_norm = grad.norm();
        let step_norm = (&x - &x_prev).norm();
        let residual = residual_fn.map(|r| r(&x));

        trace.push(
            TraceRecord {
                objective,
                lyapunov: None,
                step_norm,
                subgrad_norm: Some(grad_norm),
                residual,
                time_s: start.elapsed().as_secs_f64(),
            },
            cfg.record_iterates.then_some(&x),
        );

        if diverged(objective) || x.norm() > DIVERGENCE_NORM {
            trace.status = RunStatus::Diverged;
            break;
        }
        let converged = match residual {
            Some(r) => r <= cfg.tol,
            None => k > 0 && step_norm <= cfg.tol && grad_norm <= cfg.tol,
        };
        if converged {
            trace.status = RunStatus::Converged;
            break;
        }
        if k == cfg.max_iters {
            trace.status = RunStatus::MaxIters;
            break;
        }

        let ratio = cfg.alpha / (m * cfg.lambda);
        let x_next = &x * (1.0 - cfg.alpha / cfg.lambda)
            + prox_sum * ratio
            + (&x - &x_prev) * cfg.beta;
        x_prev = x;
        x = x_next;
    }

    let kappa = cfg.kappa.unwrap_or_else(|| {
        analysis_kappa(Convexity::Convex, cfg.alpha, cfg.beta, 1.0 / cfg.lambda)
    });
    trace.fill_lyapunov(kappa);
    Ok(trace)
}

/// `x_{k+1} ∈ prox_{alpha g}((1 - alpha/lambda) x_k
///  + (alpha/lambda) prox_lambda f(x_k) + beta (x_k - x_{k-1}))`.
///
/// This is the inertial proximal gradient method on `h = g + M_lambda f`
/// with the envelope gradient expressed through `prox_lambda f`; admissible
/// `(alpha, beta)` follow the step-size table with `L = 1/lambda` and the
/// convexity class of `g`.
pub fn inertial_alternating_prox_run(
    g: &dyn ProxOracle,
    f: &dyn ProxOracle,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    inertial_alternating_prox_run_with(g, f, cfg, x0, None)
}

pub fn inertial_alternating_prox_run_with(
    g: &dyn ProxOracle,
    f: &dyn ProxOracle,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    if cfg.lambda <= 0.0 {
        return Err(ProxalError::usage("lambda must be positive"));
    }
    let l = 1.0 / cfg.lambda;
    if !cfg.allow_inadmissible {
        let bound = step_size_bound(g.convexity(), cfg.beta, l)?;
        if cfg.alpha <= 0.0 || cfg.alpha >= bound {
            return Err(ProxalError::usage(format!(
                "alpha = {} violates the admissible bound {:.6} (L = 1/lambda)",
                cfg.alpha, bound
            )));
        }
    }

    let start = Instant::now();
    let mut trace = IterationTrace::new(cfg.record_iterates);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    // Prox argument that produced the current x, for the subgradient residual.
    let mut prox_arg_prev: Option<DVector<f64>> = None;

    for k in 0..=cfg.max_iters {
        let p = f.prox(cfg.lambda, &x)?;
        let envelope = f.eval(&p) + (&x - &p).norm_squared() / (2.0 * cfg.lambda);
        let objective = g.eval(&x) + envelope;
        let env_grad = (&x - &p) / cfg.lambda;
        let step_norm = (&x - &x_prev).norm();
        let subgrad_norm = prox_arg_prev
            .as_ref()
            .map(|w| (&env_grad + (w - &x) / cfg.alpha).norm());
        let residual = residual_fn.map(|r| r(&x));

        trace.push(
            TraceRecord {
                objective,
                lyapunov: None,
                step_norm,
                subgrad_norm,
                residual,
                time_s: start.elapsed().as_secs_f64(),
            },
            cfg.record_iterates.then_some(&x),
        );

        if diverged(objective) || x.norm() > DIVERGENCE_NORM {
            trace.status = RunStatus::Diverged;
            break;
        }
        let converged = match residual {
            Some(r) => r <= cfg.tol,
            None => {
                k > 0 && step_norm <= cfg.tol && subgrad_norm.map(|s| s <= cfg.tol).unwrap_or(true)
            }
        };
        if converged {
            trace.status = RunStatus::Converged;
            break;
        }
        if k == cfg.max_iters {
            trace.status = RunStatus::MaxIters;
            break;
        }

        let w = &x - &env_grad * cfg.alpha + (&x - &x_prev) * cfg.beta;
        let x_next = g.prox(cfg.alpha, &w)?;
        prox_arg_prev = Some(w);
        x_prev = x;
        x = x_next;
    }

    let kappa = cfg
        .kappa
        .unwrap_or_else(|| analysis_kappa(g.convexity(), cfg.alpha, cfg.beta, l));
    trace.fill_lyapunov(kappa);
    Ok(trace)
}
