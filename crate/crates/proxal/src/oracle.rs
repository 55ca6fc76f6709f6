//! Problem abstraction for composite objectives `h = f + g`.
//!
//! `f` is smooth with (locally) Lipschitz gradient, `g` is proper, lower
//! semi-continuous and "simple" in the sense that its proximal mapping can be
//! evaluated to global optimality. Indicator functions are first class: `g`
//! evaluates to `f64::INFINITY` outside its domain and finite arithmetic with
//! that sentinel saturates.
//!
//! Oracles must be immutable after construction so that several solver runs
//! can share them concurrently.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};

/// Convexity class of a prox oracle, used to pick step-size bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convexity {
    Convex,
    /// `g - (m/2)||x||^2` is convex for the given modulus `m` (negative for
    /// weakly convex functions).
    SemiConvex(f64),
    Nonconvex,
}

/// A differentiable function with optional Lipschitz information.
pub trait SmoothOracle: Send + Sync {
    fn eval(&self, x: &DVector<f64>) -> f64;

    fn grad(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Value and gradient at the same point; override when both share work.
    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (self.eval(x), self.grad(x))
    }

    /// Lipschitz constant of the gradient, if one is known.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }
}

/// An extended-real-valued function with an exactly solvable prox subproblem.
///
/// `prox(step, v)` returns one global minimizer of
/// `w ↦ g(w) + ||w - v||^2 / (2 step)`; for set-valued proximal mappings any
/// deterministic selection is acceptable.
pub trait ProxOracle: Send + Sync {
    fn eval(&self, x: &DVector<f64>) -> f64;

    fn prox(&self, step: f64, v: &DVector<f64>) -> Result<DVector<f64>>;

    fn convexity(&self) -> Convexity;
}

/// The composite problem `min h(x) = f(x) + g(x)`.
#[derive(Clone)]
pub struct CompositeProblem {
    pub f: Arc<dyn SmoothOracle>,
    pub g: Arc<dyn ProxOracle>,
    pub dimension: usize,
}

impl CompositeProblem {
    pub fn new(f: Arc<dyn SmoothOracle>, g: Arc<dyn ProxOracle>, dimension: usize) -> Self {
        CompositeProblem { f, g, dimension }
    }
}

/// `h(x) = f(x) + g(x)`, `+inf` outside `dom g`.
pub fn composite_value(p: &CompositeProblem, x: &DVector<f64>) -> Result<f64> {
    if x.len() != p.dimension {
        return Err(ProxalError::usage(format!(
            "composite_value: point has length {}, problem dimension is {}",
            x.len(),
            p.dimension
        )));
    }
    let gx = p.g.eval(x);
    if gx.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(p.f.eval(x) + gx)
}

/// The function `(x, y) ↦ h(x) + kappa ||x - y||^2` on the doubled space,
/// certified to decrease along inertial iterations.
pub struct Lyapunov {
    pub problem: CompositeProblem,
    pub kappa: f64,
}

impl Lyapunov {
    pub fn new(problem: CompositeProblem, kappa: f64) -> Self {
        assert!(kappa > 0.0, "kappa must be positive");
        Lyapunov { problem, kappa }
    }
}

/// `H(x, y) = h(x) + kappa ||x - y||^2`.
pub fn lyapunov_value(h: &Lyapunov, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(ProxalError::usage(format!(
            "lyapunov_value: x has length {}, y has length {}",
            x.len(),
            y.len()
        )));
    }
    let base = composite_value(&h.problem, x)?;
    Ok(base + h.kappa * (x - y).norm_squared())
}

/// Subgradient of `h` at the output of an inertial proximal-gradient step.
///
/// If `x_next` minimizes `g(w) + ||w - (y - step * grad f(x_grad))||^2 / (2 step)`,
/// the optimality condition yields
/// `(y - step * grad f(x_grad) - x_next) / step ∈ ∂g(x_next)`, so
/// `v = grad f(x_next) + (y - step * grad f(x_grad) - x_next) / step ∈ ∂h(x_next)`.
/// Its norm feeds the relative-error certificate of recorded traces.
pub fn ipiano_subgradient_residual(
    p: &CompositeProblem,
    step: f64,
    y_extrap: &DVector<f64>,
    x_grad_point: &DVector<f64>,
    x_next: &DVector<f64>,
) -> Result<DVector<f64>> {
    if step <= 0.0 {
        return Err(ProxalError::usage(format!(
            "ipiano_subgradient_residual: step must be positive, got {step}"
        )));
    }
    if y_extrap.len() != p.dimension || x_grad_point.len() != p.dimension || x_next.len() != p.dimension {
        return Err(ProxalError::usage(
            "ipiano_subgradient_residual: dimension mismatch".to_string(),
        ));
    }
    let grad_next = p.f.grad(x_next);
    let grad_at = p.f.grad(x_grad_point);
    let mut v = grad_next;
    v.zip_zip_apply(y_extrap, &grad_at, |vi, yi, gi| {
        *vi += (yi - step * gi) / step;
    });
    v.zip_apply(x_next, |vi, xi| *vi -= xi / step);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::{FnSmooth, L1Norm, PointIndicator, ZeroProx};

    fn half_sq() -> Arc<dyn SmoothOracle> {
        Arc::new(FnSmooth::new(
            |x: &DVector<f64>| 0.5 * x.norm_squared(),
            |x: &DVector<f64>| x.clone(),
            Some(1.0),
        ))
    }

    fn zero_smooth() -> Arc<dyn SmoothOracle> {
        Arc::new(FnSmooth::new(
            |_: &DVector<f64>| 0.0,
            |x: &DVector<f64>| DVector::zeros(x.len()),
            Some(0.0),
        ))
    }

    #[test]
    fn composite_value_quadratic() {
        let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 2);
        let v = composite_value(&p, &DVector::from_vec(vec![3.0, 4.0])).unwrap();
        assert_eq!(v, 12.5);
    }

    #[test]
    fn composite_value_indicator_outside() {
        let p = CompositeProblem::new(
            zero_smooth(),
            Arc::new(PointIndicator::new(DVector::zeros(1))),
            1,
        );
        let v = composite_value(&p, &DVector::from_vec(vec![1.0])).unwrap();
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn composite_value_l1() {
        let p = CompositeProblem::new(half_sq(), Arc::new(L1Norm), 2);
        let v = composite_value(&p, &DVector::from_vec(vec![1.0, -1.0])).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn composite_value_dimension_mismatch() {
        let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 2);
        assert!(composite_value(&p, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn lyapunov_on_diagonal_equals_objective() {
        // h(x) = ||x||^2, x = y = (1): H(x, x) = h(x) = 1 exactly.
        let sq = Arc::new(FnSmooth::new(
            |x: &DVector<f64>| x.norm_squared(),
            |x: &DVector<f64>| x * 2.0,
            Some(2.0),
        ));
        let p = CompositeProblem::new(sq, Arc::new(ZeroProx), 1);
        let h = Lyapunov::new(p, 1.0);
        let x = DVector::from_vec(vec![1.0]);
        assert_eq!(lyapunov_value(&h, &x, &x).unwrap(), 1.0);
    }

    #[test]
    fn lyapunov_pure_penalty() {
        let p = CompositeProblem::new(zero_smooth(), Arc::new(ZeroProx), 1);
        let h = Lyapunov::new(p, 2.0);
        let v = lyapunov_value(&h, &DVector::zeros(1), &DVector::from_vec(vec![3.0])).unwrap();
        assert_eq!(v, 18.0);
    }

    #[test]
    fn lyapunov_linear_objective() {
        let lin = Arc::new(FnSmooth::new(
            |x: &DVector<f64>| x[0],
            |x: &DVector<f64>| {
                let mut g = DVector::zeros(x.len());
                g[0] = 1.0;
                g
            },
            None,
        ));
        let p = CompositeProblem::new(lin, Arc::new(ZeroProx), 1);
        let h = Lyapunov::new(p, 0.5);
        let v = lyapunov_value(&h, &DVector::from_vec(vec![2.0]), &DVector::zeros(1)).unwrap();
        assert_eq!(v, 4.0);
    }

    // Exact gradient step on a unit-curvature quadratic lands on the
    // stationary point, so the residual must vanish.
    #[test]
    fn subgradient_residual_exact_step() {
        let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
        let v = ipiano_subgradient_residual(
            &p,
            1.0,
            &DVector::from_vec(vec![2.0]),
            &DVector::from_vec(vec![2.0]),
            &DVector::from_vec(vec![0.0]),
        )
        .unwrap();
        assert_eq!(v[0], 0.0);
    }

    // Soft-threshold closed form: prox of |.| at 2 with step 1 is 1, and the
    // optimality residual is the subgradient sign(1) = 1.
    #[test]
    fn subgradient_residual_soft_threshold() {
        let p = CompositeProblem::new(zero_smooth(), Arc::new(L1Norm), 1);
        let prox = p.g.prox(1.0, &DVector::from_vec(vec![2.0])).unwrap();
        assert_eq!(prox[0], 1.0);
        let v = ipiano_subgradient_residual(
            &p,
            1.0,
            &DVector::from_vec(vec![2.0]),
            &DVector::from_vec(vec![2.0]),
            &prox,
        )
        .unwrap();
        assert_eq!(v[0], 1.0);
    }

    #[test]
    fn subgradient_residual_half_step() {
        let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
        let v = ipiano_subgradient_residual(
            &p,
            0.5,
            &DVector::from_vec(vec![2.0]),
            &DVector::from_vec(vec![2.0]),
            &DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subgradient_residual_rejects_nonpositive_step() {
        let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
        let x = DVector::zeros(1);
        assert!(ipiano_subgradient_residual(&p, 0.0, &x, &x, &x).is_err());
        assert!(ipiano_subgradient_residual(&p, -1.0, &x, &x, &x).is_err());
    }
}
