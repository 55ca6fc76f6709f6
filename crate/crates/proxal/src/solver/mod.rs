//! Iterative methods: inertial proximal gradient (constant step and
//! backtracking), Heavy-ball, inertial averaged/alternating proximal
//! minimization, plain/relaxed/averaged/alternating projections, and a
//! Douglas–Rachford baseline for two-set feasibility.

mod dr;
mod inertial;
mod ipiano;
mod projection;

pub use dr::{douglas_rachford_run, douglas_rachford_run_with, DrHeuristic, DR_GAMMA_SAFE};
pub use inertial::{
    inertial_alternating_prox_run, inertial_alternating_prox_run_with,
    inertial_averaged_prox_run, inertial_averaged_prox_run_with,
};
pub use ipiano::{heavy_ball_run, heavy_ball_run_with, ipiano_run, ipiano_run_with, ipiano_step};
pub use projection::{
    alternating_projection_run, alternating_projection_run_with, averaged_projection_run,
    averaged_projection_run_with, relaxed_alternating_projection_run,
    relaxed_alternating_projection_run_with,
};

use crate::error::{ProxalError, Result};
use crate::oracle::Convexity;

/// Iterates whose norm exceeds this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// `+inf` is a legitimate extended objective value (an iterate outside
/// `dom g`); only NaN and `-inf` signal a broken run.
pub(crate) fn diverged(objective: f64) -> bool {
    objective.is_nan() || objective == f64::NEG_INFINITY
}

/// Problem-specific residual metric recorded in traces; when present it also
/// drives the stopping rule (`residual <= tol`).
pub type ResidualFn<'a> = &'a (dyn Fn(&nalgebra::DVector<f64>) -> f64 + Sync);

/// Descent-lemma probe parameters for the local Lipschitz estimate.
#[derive(Debug, Clone)]
pub struct Backtracking {
    pub eta_up: f64,
    pub eta_down: f64,
    pub l_init: f64,
    pub max_probes: usize,
    /// Fraction of the admissible step-size bound used once a local `L` is
    /// accepted.
    pub alpha_safety: f64,
}

impl Default for Backtracking {
    fn default() -> Self {
        Backtracking {
            eta_up: 2.0,
            eta_down: 0.5,
            l_init: 1.0,
            max_probes: 50,
            alpha_safety: 0.99,
        }
    }
}

/// Step-size and run-control parameters shared by all solvers.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Moreau/prox scale used by the inertial averaged/alternating methods.
    pub lambda: f64,
    /// Lyapunov weight for the recorded trace; `None` derives it from the
    /// step-size analysis when possible and falls back to 1.
    pub kappa: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
    pub backtracking: Option<Backtracking>,
    pub seed: u64,
    /// Store full iterates for containment checks (memory-heavy).
    pub record_iterates: bool,
    /// Skip the admissibility validation; used for heuristic parameter
    /// choices that are known to violate the step-size bounds.
    pub allow_inadmissible: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 0.1,
            beta: 0.0,
            lambda: 1.0,
            kappa: None,
            max_iters: 1000,
            tol: 1e-12,
            backtracking: None,
            seed: 0,
            record_iterates: false,
            allow_inadmissible: false,
        }
    }
}

impl SolverConfig {
    pub fn with_alpha_beta(alpha: f64, beta: f64) -> Self {
        SolverConfig {
            alpha,
            beta,
            ..Default::default()
        }
    }
}

/// Admissible step-size bound for the inertial proximal gradient method:
/// `2(1-beta)/L` for convex `g`, `2(1-beta)/(L-m)` for `m`-semi-convex `g`,
/// `(1-2beta)/L` for non-convex `g`.
pub fn step_size_bound(class: Convexity, beta: f64, l: f64) -> Result<f64> {
    if l <= 0.0 {
        return Err(ProxalError::usage("Lipschitz constant must be positive"));
    }
    let bound = match class {
        Convexity::Convex => {
            if !(0.0..1.0).contains(&beta) {
                return Err(ProxalError::usage("convex g requires beta in [0, 1)"));
            }
            2.0 * (1.0 - beta) / l
        }
        Convexity::SemiConvex(m) => {
            if !(0.0..1.0).contains(&beta) {
                return Err(ProxalError::usage("semi-convex g requires beta in [0, 1)"));
            }
            if l <= m {
                return Err(ProxalError::usage(
                    "semi-convex modulus must satisfy m < L",
                ));
            }
            2.0 * (1.0 - beta) / (l - m)
        }
        Convexity::Nonconvex => {
            if !(0.0..0.5).contains(&beta) {
                return Err(ProxalError::usage("non-convex g requires beta in [0, 1/2)"));
            }
            (1.0 - 2.0 * beta) / l
        }
    };
    Ok(bound)
}

pub(crate) fn validate_constant_step(
    cfg: &SolverConfig,
    class: Convexity,
    l_hint: Option<f64>,
) -> Result<()> {
    if cfg.alpha <= 0.0 {
        return Err(ProxalError::usage("alpha must be positive"));
    }
    if cfg.allow_inadmissible {
        return Ok(());
    }
    if let Some(l) = l_hint {
        let bound = step_size_bound(class, cfg.beta, l)?;
        if cfg.alpha >= bound {
            return Err(ProxalError::usage(format!(
                "alpha = {} violates the admissible bound {:.6} for this problem class",
                cfg.alpha, bound
            )));
        }
    }
    Ok(())
}

/// Lyapunov weight from the inertial proximal-gradient analysis.
///
/// The per-iteration inequality
/// `h(x^{k+1}) + delta ||x^{k+1}-x^k||^2 <= h(x^k) + (beta/2alpha) ||x^k-x^{k-1}||^2`
/// makes `h + kappa ||.||^2` decrease by a positive multiple of the squared
/// step for every `kappa` in `(beta/(2 alpha), delta)`; the midpoint keeps a
/// margin on both sides. Falls back to 1 when the parameters sit outside the
/// certified region.
pub fn analysis_kappa(class: Convexity, alpha: f64, beta: f64, l: f64) -> f64 {
    let delta = match class {
        Convexity::Nonconvex => (1.0 - alpha * l - beta) / (2.0 * alpha),
        Convexity::Convex => (2.0 - alpha * l - beta) / (2.0 * alpha),
        Convexity::SemiConvex(m) => (2.0 - alpha * (l - m) - beta) / (2.0 * alpha),
    };
    let lower = beta / (2.0 * alpha);
    let kappa = 0.5 * (delta + lower);
    if kappa.is_finite() && kappa > 0.0 && delta > lower {
        kappa
    } else {
        1.0
    }
}
