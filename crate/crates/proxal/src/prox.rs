//! Concrete proximal mappings and Moreau envelopes.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};
use crate::oracle::{Convexity, ProxOracle, SmoothOracle};
use crate::sets::SetProjection;

/// `g ≡ 0`; its prox is the identity.
pub struct ZeroProx;

impl ProxOracle for ZeroProx {
    fn eval(&self, _x: &DVector<f64>) -> f64 {
        0.0
    }

    fn prox(&self, _step: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(v.clone())
    }

    fn convexity(&self) -> Convexity {
        Convexity::Convex
    }
}

/// `g(x) = ||x||_1`; prox is the soft-threshold.
pub struct L1Norm;

impl ProxOracle for L1Norm {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|v| v.abs()).sum()
    }

    fn prox(&self, step: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(v.map(|vi| vi.signum() * (vi.abs() - step).max(0.0)))
    }

    fn convexity(&self) -> Convexity {
        Convexity::Convex
    }
}

/// Indicator of the single point `{p}`.
pub struct PointIndicator {
    point: DVector<f64>,
}

impl PointIndicator {
    pub fn new(point: DVector<f64>) -> Self {
        PointIndicator { point }
    }
}

impl ProxOracle for PointIndicator {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        if (x - &self.point).norm() <= 1e-12 * (1.0 + self.point.norm()) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, _step: f64, _v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.point.clone())
    }

    fn convexity(&self) -> Convexity {
        Convexity::Convex
    }
}

/// Indicator of a closed set given by its projection; the prox of an
/// indicator is the projection for every step size.
pub struct SetIndicator {
    set: Arc<dyn SetProjection>,
    convexity: Convexity,
    /// Relative membership tolerance for `eval`.
    tol: f64,
}

impl SetIndicator {
    pub fn new(set: Arc<dyn SetProjection>, convexity: Convexity) -> Self {
        SetIndicator {
            set,
            convexity,
            tol: 1e-9,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl ProxOracle for SetIndicator {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        let p = self.set.project(x);
        if (x - p).norm() <= self.tol * (1.0 + x.norm()) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, _step: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.set.project(v))
    }

    fn convexity(&self) -> Convexity {
        self.convexity
    }
}

/// Smooth oracle from closures.
pub struct FnSmooth<E, G> {
    eval: E,
    grad: G,
    lipschitz: Option<f64>,
}

impl<E, G> FnSmooth<E, G>
where
    E: Fn(&DVector<f64>) -> f64 + Send + Sync,
    G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    pub fn new(eval: E, grad: G, lipschitz: Option<f64>) -> Self {
        FnSmooth {
            eval,
            grad,
            lipschitz,
        }
    }
}

impl<E, G> SmoothOracle for FnSmooth<E, G>
where
    E: Fn(&DVector<f64>) -> f64 + Send + Sync,
    G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.eval)(x)
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.grad)(x)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz
    }
}

/// Prox oracle from closures.
pub struct FnProx<E, P> {
    eval: E,
    prox: P,
    convexity: Convexity,
}

impl<E, P> FnProx<E, P>
where
    E: Fn(&DVector<f64>) -> f64 + Send + Sync,
    P: Fn(f64, &DVector<f64>) -> Result<DVector<f64>> + Send + Sync,
{
    pub fn new(eval: E, prox: P, convexity: Convexity) -> Self {
        FnProx {
            eval,
            prox,
            convexity,
        }
    }
}

impl<E, P> ProxOracle for FnProx<E, P>
where
    E: Fn(&DVector<f64>) -> f64 + Send + Sync,
    P: Fn(f64, &DVector<f64>) -> Result<DVector<f64>> + Send + Sync,
{
    fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.eval)(x)
    }

    fn prox(&self, step: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        (self.prox)(step, v)
    }

    fn convexity(&self) -> Convexity {
        self.convexity
    }
}

/// `f(x) = 0.5 Σ d_i (x_i - c_i)^2`, a separable quadratic with gradient
/// Lipschitz constant `max d_i`.
pub struct DiagQuadratic {
    pub diag: DVector<f64>,
    pub center: DVector<f64>,
}

impl DiagQuadratic {
    pub fn new(diag: DVector<f64>, center: DVector<f64>) -> Self {
        assert_eq!(diag.len(), center.len());
        DiagQuadratic { diag, center }
    }
}

impl SmoothOracle for DiagQuadratic {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        let mut acc = 0.0;
        for i in 0..x.len() {
            let d = x[i] - self.center[i];
            acc += 0.5 * self.diag[i] * d * d;
        }
        acc
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| self.diag[i] * (x[i] - self.center[i]))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.diag.iter().cloned().fold(0.0f64, f64::max))
    }
}

/// Scales a smooth oracle by a positive factor.
pub struct ScaledSmooth {
    pub factor: f64,
    pub inner: Arc<dyn SmoothOracle>,
}

impl SmoothOracle for ScaledSmooth {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        self.factor * self.inner.eval(x)
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.inner.grad(x) * self.factor
    }

    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (v, g) = self.inner.value_grad(x);
        (self.factor * v, g * self.factor)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.inner.lipschitz_hint().map(|l| l * self.factor)
    }
}

/// Sum of smooth oracles.
pub struct SumSmooth {
    pub terms: Vec<Arc<dyn SmoothOracle>>,
}

impl SmoothOracle for SumSmooth {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        for t in &self.terms {
            g += t.grad(x);
        }
        g
    }

    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut val = 0.0;
        let mut g = DVector::zeros(x.len());
        for t in &self.terms {
            let (v, gi) = t.value_grad(x);
            val += v;
            g += gi;
        }
        (val, g)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|t| t.lipschitz_hint())
            .try_fold(0.0, |acc, l| l.map(|l| acc + l))
    }
}

/// Validity regime of the Moreau gradient formula.
#[derive(Debug, Clone)]
pub enum EnvelopeRegime {
    /// Convex base: the formula holds globally and the gradient is
    /// `1/lambda`-Lipschitz.
    Convex,
    /// Prox-regular base: the formula is only asserted inside a
    /// caller-declared trust ball; the library does not estimate the
    /// prox-regularity modulus.
    ProxRegularLocal {
        center: DVector<f64>,
        radius: f64,
    },
}

/// The Moreau envelope `M(x) = inf_w base(w) + ||w - x||^2 / (2 lambda)`.
pub struct MoreauEnvelope {
    pub base: Arc<dyn ProxOracle>,
    pub lambda: f64,
    pub regime: EnvelopeRegime,
}

impl MoreauEnvelope {
    pub fn new(base: Arc<dyn ProxOracle>, lambda: f64, regime: EnvelopeRegime) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(ProxalError::usage("Moreau scale lambda must be positive"));
        }
        Ok(MoreauEnvelope {
            base,
            lambda,
            regime,
        })
    }

    fn check_regime(&self, x: &DVector<f64>) -> Result<()> {
        if let EnvelopeRegime::ProxRegularLocal { center, radius } = &self.regime {
            if (x - center).norm() > *radius {
                return Err(ProxalError::usage(
                    "Moreau gradient requested outside the declared trust ball",
                ));
            }
        }
        Ok(())
    }
}

/// Envelope value `base(p) + ||p - x||^2 / (2 lambda)` with `p = prox(lambda, x)`.
pub fn moreau_value(env: &MoreauEnvelope, x: &DVector<f64>) -> Result<f64> {
    let p = env.base.prox(env.lambda, x)?;
    Ok(env.base.eval(&p) + (x - &p).norm_squared() / (2.0 * env.lambda))
}

/// Envelope gradient `(x - prox(lambda, x)) / lambda`.
///
/// For a prox-regular base this formula is only valid inside the declared
/// trust ball; at a fixed point of the prox the gradient vanishes.
pub fn moreau_grad(env: &MoreauEnvelope, x: &DVector<f64>) -> Result<DVector<f64>> {
    env.check_regime(x)?;
    let p = env.base.prox(env.lambda, x)?;
    Ok((x - p) / env.lambda)
}

impl SmoothOracle for MoreauEnvelope {
    /// Panics if the base prox is empty or `x` leaves the declared trust
    /// ball; both are caller bugs per the prox-boundedness contract.
    fn eval(&self, x: &DVector<f64>) -> f64 {
        moreau_value(self, x).expect("Moreau envelope evaluation failed")
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        moreau_grad(self, x).expect("Moreau gradient failed")
    }

    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        self.check_regime(x).expect("Moreau gradient failed");
        let p = self
            .base
            .prox(self.lambda, x)
            .expect("Moreau envelope evaluation failed");
        let diff = x - &p;
        (
            self.base.eval(&p) + diff.norm_squared() / (2.0 * self.lambda),
            diff / self.lambda,
        )
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(1.0 / self.lambda)
    }
}
