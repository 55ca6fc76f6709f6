//! Inertial proximal gradient iteration and the Heavy-ball special case.

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};
use crate::oracle::{CompositeProblem, Convexity, SmoothOracle};
use crate::trace::{IterationTrace, RunStatus, TraceRecord};

use super::{
    analysis_kappa, diverged, step_size_bound, validate_constant_step, ResidualFn, SolverConfig,
    DIVERGENCE_NORM,
};

/// One update of the inertial proximal gradient method:
/// `y = x_k + beta (x_k - x_km1)`, then the prox of `g` at step `alpha`
/// applied to `y - alpha grad f(x_k)`.
pub fn ipiano_step(
    p: &CompositeProblem,
    cfg: &SolverConfig,
    x_k: &DVector<f64>,
    x_km1: &DVector<f64>,
) -> Result<DVector<f64>> {
    if x_k.len() != p.dimension || x_km1.len() != p.dimension {
        return Err(ProxalError::usage("ipiano_step: dimension mismatch"));
    }
    validate_constant_step(cfg, p.g.convexity(), p.f.lipschitz_hint())?;
    let grad = p.f.grad(x_k);
    let y = x_k + (x_k - x_km1) * cfg.beta;
    let w = &y - grad * cfg.alpha;
    p.g.prox(cfg.alpha, &w)
}

/// Accept the smallest probed `L` satisfying the descent lemma
/// `f(x_next) <= f(x) + <grad f(x), x_next - x> + (L/2) ||x_next - x||^2`,
/// increasing `L` by `eta_up` on rejection. Returns
/// `(l_accepted, alpha, w, x_next, f_next)` where `w` is the prox argument.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn backtracked_step(
    p: &CompositeProblem,
    cfg: &SolverConfig,
    class: Convexity,
    x: &DVector<f64>,
    x_prev: &DVector<f64>,
    fx: f64,
    gfx: &DVector<f64>,
    l_start: f64,
) -> Result<(f64, f64, DVector<f64>, DVector<f64>, f64)> {
    let bt = cfg.backtracking.as_ref().expect("backtracking enabled");
    let inertia = (x - x_prev) * cfg.beta;
    let mut l = l_start;
    let mut last = None;
    for _ in 0..bt.max_probes.max(1) {
        let alpha = bt.alpha_safety * step_size_bound(class, cfg.beta, l)?;
        let w = x + &inertia - gfx * alpha;
        let x_next = p.g.prox(alpha, &w)?;
        let f_next = p.f.eval(&x_next);
        let d = &x_next - x;
        let quad = fx + gfx.dot(&d) + 0.5 * l * d.norm_squared();
        // Rounding slack must scale with the values involved; an absolute
        // floor would blind the probe near a minimizer.
        if f_next <= quad + 1e-12 * quad.abs().max(fx.abs()) {
            return Ok((l, alpha, w, x_next, f_next));
        }
        last = Some((l, alpha, w, x_next, f_next));
        l *= bt.eta_up;
    }
    // Probe budget exhausted; use the last candidate rather than aborting.
    Ok(last.expect("at least one probe"))
}

/// Run the inertial proximal gradient method from `x0`.
///
/// Without a residual metric the run stops when both the step norm and the
/// subgradient-residual norm fall to `tol`; with one (see
/// [`ipiano_run_with`]) it stops when the metric reaches `tol`. With
/// backtracking enabled the local Lipschitz constant is probed each
/// iteration and `alpha` is re-derived from the admissible bound.
pub fn ipiano_run(
    p: &CompositeProblem,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    ipiano_run_with(p, cfg, x0, None)
}

pub fn ipiano_run_with(
    p: &CompositeProblem,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    if x0.len() != p.dimension {
        return Err(ProxalError::usage("ipiano_run: x0 dimension mismatch"));
    }
    if !p.g.eval(x0).is_finite() {
        return Err(ProxalError::usage(
            "ipiano_run: x0 must lie in the domain of g",
        ));
    }
    let class = p.g.convexity();
    let l_hint = p.f.lipschitz_hint();
    if cfg.backtracking.is_none() {
        validate_constant_step(cfg, class, l_hint)?;
    }

    let start = Instant::now();
    let mut trace = IterationTrace::new(cfg.record_iterates);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();

    let obj0 = p.f.eval(&x) + p.g.eval(&x);
    trace.push(
        TraceRecord {
            objective: obj0,
            lyapunov: None,
            step_norm: 0.0,
            subgrad_norm: None,
            residual: residual_fn.map(|r| r(&x)),
            time_s: start.elapsed().as_secs_f64(),
        },
        cfg.record_iterates.then_some(&x),
    );

    let mut l_local = cfg
        .backtracking
        .as_ref()
        .map(|bt| l_hint.unwrap_or(bt.l_init));
    let mut l_max_accepted = l_local.unwrap_or(0.0);

    for _k in 1..=cfg.max_iters {
        let (fx, gfx) = p.f.value_grad(&x);
        let (alpha, w, x_next, f_next) = if let Some(bt) = cfg.backtracking.as_ref() {
            let (l_acc, alpha, w, x_next, f_next) =
                backtracked_step(p, cfg, class, &x, &x_prev, fx, &gfx, l_local.unwrap())?;
            l_max_accepted = l_max_accepted.max(l_acc);
            l_local = Some((l_acc * bt.eta_down).max(1e-12));
            (alpha, w, x_next, f_next)
        } else {
            let alpha = cfg.alpha;
            let y = &x + (&x - &x_prev) * cfg.beta;
            let w = &y - &gfx * alpha;
            let x_next = p.g.prox(alpha, &w)?;
            let f_next = p.f.eval(&x_next);
            (alpha, w, x_next, f_next)
        };

        // Prox optimality turns the step into a subgradient of h at x_next.
        let subgrad = p.f.grad(&x_next) + (&w - &x_next) / alpha;
        let subgrad_norm = subgrad.norm();
        let objective = f_next + p.g.eval(&x_next);
        let step_norm = (&x_next - &x).norm();
        let residual = residual_fn.map(|r| r(&x_next));

        trace.push(
            TraceRecord {
                objective,
                lyapunov: None,
                step_norm,
                subgrad_norm: Some(subgrad_norm),
                residual,
                time_s: start.elapsed().as_secs_f64(),
            },
            cfg.record_iterates.then_some(&x_next),
        );

        if diverged(objective) || x_next.norm() > DIVERGENCE_NORM {
            trace.status = RunStatus::Diverged;
            return finish(trace, cfg, class, l_hint, l_max_accepted);
        }
        let converged = match residual {
            Some(r) => r <= cfg.tol,
            None => step_norm <= cfg.tol && subgrad_norm <= cfg.tol,
        };
        x_prev = x;
        x = x_next;
        if converged {
            trace.status = RunStatus::Converged;
            return finish(trace, cfg, class, l_hint, l_max_accepted);
        }
    }
    trace.status = RunStatus::MaxIters;
    finish(trace, cfg, class, l_hint, l_max_accepted)
}

fn finish(
    mut trace: IterationTrace,
    cfg: &SolverConfig,
    class: Convexity,
    l_hint: Option<f64>,
    l_max_accepted: f64,
) -> Result<IterationTrace> {
    let kappa = cfg.kappa.unwrap_or_else(|| {
        if let Some(bt) = cfg.backtracking.as_ref() {
            // Most conservative per-iteration weight seen during the run.
            match step_size_bound(class, cfg.beta, l_max_accepted.max(1e-12)) {
                Ok(bound) => {
                    analysis_kappa(class, bt.alpha_safety * bound, cfg.beta, l_max_accepted)
                }
                Err(_) => 1.0,
            }
        } else if let Some(l) = l_hint {
            analysis_kappa(class, cfg.alpha, cfg.beta, l)
        } else {
            1.0
        }
    });
    trace.fill_lyapunov(kappa);
    Ok(trace)
}

/// Heavy-ball method `x_{k+1} = x_k - alpha grad f(x_k) + beta (x_k - x_{k-1})`,
/// implemented directly (not by delegating to the proximal path) so the two
/// routes can be cross-checked.
pub fn heavy_ball_run(
    f: &dyn SmoothOracle,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
) -> Result<IterationTrace> {
    heavy_ball_run_with(f, cfg, x0, None)
}

pub fn heavy_ball_run_with(
    f: &dyn SmoothOracle,
    cfg: &SolverConfig,
    x0: &DVector<f64>,
    residual_fn: Option<ResidualFn>,
) -> Result<IterationTrace> {
    let l_hint = f.lipschitz_hint();
    if cfg.backtracking.is_none() {
        validate_constant_step(cfg, Convexity::Convex, l_hint)?;
    }

    let start = Instant::now();
    let mut trace = IterationTrace::new(cfg.record_iterates);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();

    trace.push(
        TraceRecord {
            objective: f.eval(&x),
            lyapunov: None,
            step_norm: 0.0,
            subgrad_norm: None,
            residual: residual_fn.map(|r| r(&x)),
            time_s: start.elapsed().as_secs_f64(),
        },
        cfg.record_iterates.then_some(&x),
    );

    let mut l_local = cfg
        .backtracking
        .as_ref()
        .map(|bt| l_hint.unwrap_or(bt.l_init));
    let mut l_max_accepted = l_local.unwrap_or(0.0);

    for _k in 1..=cfg.max_iters {
        let (fx, gfx) = f.value_grad(&x);
        let (x_next, f_next) = if let Some(bt) = cfg.backtracking.as_ref() {
            let mut l = l_local.unwrap();
            let mut accepted = None;
            for _ in 0..bt.max_probes.max(1) {
                let alpha = bt.alpha_safety * step_size_bound(Convexity::Convex, cfg.beta, l)?;
                let x_next = &x - &gfx * alpha + (&x - &x_prev) * cfg.beta;
                let f_next = f.eval(&x_next);
                let d = &x_next - &x;
                let quad = fx + gfx.dot(&d) + 0.5 * l * d.norm_squared();
                accepted = Some((x_next, f_next));
                if f_next <= quad + 1e-12 * quad.abs().max(fx.abs()) {
                    break;
                }
                accepted = None;
                l *= bt.eta_up;
                if l > 1e300 {
                    break;
                }
            }
            let (x_next, f_next) = match accepted {
                Some(pair) => pair,
                None => {
                    let alpha =
                        bt.alpha_safety * step_size_bound(Convexity::Convex, cfg.beta, l)?;
                    let x_next = &x - &gfx * alpha + (&x - &x_prev) * cfg.beta;
                    let f_next = f.eval(&x_next);
                    (x_next, f_next)
                }
            };
            l_max_accepted = l_max_accepted.max(l);
            l_local = Some((l * bt.eta_down).max(1e-12));
            (x_next, f_next)
        } else {
            let x_next = &x - &gfx * cfg.alpha + (&x - &x_prev) * cfg.beta;
            (x_next.clone(), f.eval(&x_next))
        };

        let subgrad_norm = f.grad(&x_next).norm();
        let step_norm = (&x_next - &x).norm();
        let residual = residual_fn.map(|r| r(&x_next));

        trace.push(
            TraceRecord {
                objective: f_next,
                lyapunov: None,
                step_norm,
                subgrad_norm: Some(subgrad_norm),
                residual,
                time_s: start.elapsed().as_secs_f64(),
            },
            cfg.record_iterates.then_some(&x_next),
        );

        if diverged(f_next) || x_next.norm() > DIVERGENCE_NORM {
            trace.status = RunStatus::Diverged;
            return finish_hb(trace, cfg, l_hint, l_max_accepted);
        }
        let converged = match residual {
            Some(r) => r <= cfg.tol,
            None => step_norm <= cfg.tol && subgrad_norm <= cfg.tol,
        };
        x_prev = x;
        x = x_next;
        if converged {
            trace.status = RunStatus::Converged;
            return finish_hb(trace, cfg, l_hint, l_max_accepted);
        }
    }
    trace.status = RunStatus::MaxIters;
    finish_hb(trace, cfg, l_hint, l_max_accepted)
}

fn finish_hb(
    mut trace: IterationTrace,
    cfg: &SolverConfig,
    l_hint: Option<f64>,
    l_max_accepted: f64,
) -> Result<IterationTrace> {
    let kappa = cfg.kappa.unwrap_or_else(|| {
        if let Some(bt) = cfg.backtracking.as_ref() {
            match step_size_bound(Convexity::Convex, cfg.beta, l_max_accepted.max(1e-12)) {
                Ok(bound) => analysis_kappa(
                    Convexity::Convex,
                    bt.alpha_safety * bound,
                    cfg.beta,
                    l_max_accepted,
                ),
                Err(_) => 1.0,
            }
        } else if let Some(l) = l_hint {
            analysis_kappa(Convexity::Convex, cfg.alpha, cfg.beta, l)
        } else {
            1.0
        }
    });
    trace.fill_lyapunov(kappa);
    Ok(trace)
}
