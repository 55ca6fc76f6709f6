//! Low-rank matrix feasibility benchmark: find `X` with `A(X) = B` and
//! `rank(X) <= R`, where `A(X) = (<A_1, X>, ..., <A_D, X>)` for random dense
//! measurement matrices. Instances are generated so that a rank-`R` solution
//! exists, and every method configuration of the benchmark suite is wired
//! here.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ProxalError, Result};
use crate::oracle::{CompositeProblem, Convexity};
use crate::prox::SetIndicator;
use crate::sets::{
    flatten, project_rank, unflatten, AffineMeasurementSet, HalfSquaredDistance, RankSet,
};
use crate::solver::{
    alternating_projection_run_with, averaged_projection_run_with, douglas_rachford_run_with,
    heavy_ball_run_with, ipiano_run_with, relaxed_alternating_projection_run_with, Backtracking,
    DrHeuristic, SolverConfig, DR_GAMMA_SAFE,
};
use crate::trace::IterationTrace;

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// A random feasibility instance with a known rank-`R` solution.
pub struct FeasibilityInstance {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub measurements: usize,
    pub seed: u64,
    pub affine: Arc<AffineMeasurementSet>,
    pub rank_set: Arc<RankSet>,
    x_star: DMatrix<f64>,
}

/// Deterministic instance generation: operator entries, then the rank-`R`
/// ground truth `X* = U V^T`, are drawn i.i.d. standard normal from a
/// ChaCha8 stream seeded with `seed`, in that fixed order.
pub fn gen_instance(
    seed: u64,
    n: usize,
    m: usize,
    rank: usize,
    measurements: usize,
) -> Result<FeasibilityInstance> {
    if n == 0 || m == 0 || rank == 0 || rank > n.min(m) {
        return Err(ProxalError::usage(format!(
            "invalid dimensions: N={n}, M={m}, R={rank} (need 1 <= R <= min(N, M))"
        )));
    }
    if measurements == 0 || measurements >= n * m {
        return Err(ProxalError::usage(format!(
            "measurement count D={measurements} must satisfy 1 <= D < N*M = {}",
            n * m
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops_flat = DMatrix::zeros(measurements, n * m);
    for i in 0..measurements {
        for j in 0..n * m {
            ops_flat[(i, j)] = std_normal(&mut rng);
        }
    }
    let u = DMatrix::from_fn(n, rank, |_, _| std_normal(&mut rng));
    let v = DMatrix::from_fn(m, rank, |_, _| std_normal(&mut rng));
    let x_star = &u * v.transpose();
    let rhs = &ops_flat * flatten(&x_star);
    let affine = AffineMeasurementSet::from_flat(ops_flat, n, m, rhs)?;
    Ok(FeasibilityInstance {
        n,
        m,
        rank,
        measurements,
        seed,
        affine: Arc::new(affine),
        rank_set: Arc::new(RankSet::new(rank, n, m)?),
        x_star,
    })
}

impl FeasibilityInstance {
    pub fn ground_truth(&self) -> &DMatrix<f64> {
        &self.x_star
    }

    pub fn rhs(&self) -> &DVector<f64> {
        self.affine.rhs()
    }

    /// Forward measurement `A(X)`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        self.affine.apply(x)
    }

    /// Adjoint `A*(y) = Σ y_i A_i`.
    pub fn apply_adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        self.affine.adjoint(y)
    }

    /// Benchmark metric: `||A(P_rank(X)) - B||`, i.e. the measurement
    /// residual after projecting the iterate onto the rank constraint.
    pub fn residual(&self, x: &DMatrix<f64>) -> f64 {
        let projected = project_rank(&self.rank_set, x);
        (self.affine.apply(&projected) - self.affine.rhs()).norm()
    }

    pub fn residual_flat(&self, x: &DVector<f64>) -> f64 {
        self.residual(&unflatten(x, self.n, self.m))
    }

    /// Residual shortcut for iterates already inside the rank set.
    fn residual_on_rank_member(&self, x: &DVector<f64>) -> f64 {
        (self.affine.apply_flat(x) - self.affine.rhs()).norm()
    }
}

/// The ten benchmark method configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodName {
    Altproj,
    Avrgproj,
    Dr,
    Dr75,
    GlobAltproj,
    GlobIpianoAltproj,
    GlobIpianoAltprojBt,
    HeurIpianoAltproj,
    LocHeavyballAvrgprojBt,
    LocIpianoAltprojBt,
}

impl MethodName {
    pub const ALL: [MethodName; 10] = [
        MethodName::Altproj,
        MethodName::Avrgproj,
        MethodName::Dr,
        MethodName::Dr75,
        MethodName::GlobAltproj,
        MethodName::GlobIpianoAltproj,
        MethodName::GlobIpianoAltprojBt,
        MethodName::HeurIpianoAltproj,
        MethodName::LocHeavyballAvrgprojBt,
        MethodName::LocIpianoAltprojBt,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodName::Altproj => "altproj",
            MethodName::Avrgproj => "avrgproj",
            MethodName::Dr => "dr",
            MethodName::Dr75 => "dr-75",
            MethodName::GlobAltproj => "glob-altproj",
            MethodName::GlobIpianoAltproj => "glob-ipiano-altproj",
            MethodName::GlobIpianoAltprojBt => "glob-ipiano-altproj-bt",
            MethodName::HeurIpianoAltproj => "heur-ipiano-altproj",
            MethodName::LocHeavyballAvrgprojBt => "loc-heavyball-avrgproj-bt",
            MethodName::LocIpianoAltprojBt => "loc-ipiano-altproj-bt",
        }
    }

    /// Methods that start from a perturbed ground truth rather than zero.
    pub fn is_local(&self) -> bool {
        matches!(
            self,
            MethodName::LocHeavyballAvrgprojBt | MethodName::LocIpianoAltprojBt
        )
    }
}

impl std::str::FromStr for MethodName {
    type Err = ProxalError;

    fn from_str(s: &str) -> Result<Self> {
        MethodName::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| {
                ProxalError::usage(format!(
                    "unknown method '{s}'; valid: {}",
                    MethodName::ALL
                        .iter()
                        .map(|m| m.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }
}

impl std::fmt::Display for MethodName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Knobs shared by all benchmark runs.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub max_iters: usize,
    /// Stopping precision relative to the initial residual.
    pub rel_tol: f64,
    /// Safety fraction of the admissible step-size bound.
    pub alpha_safety: f64,
    /// Override the per-method inertia where one applies.
    pub beta_override: Option<f64>,
    /// Enables the theoretically infeasible heuristic configuration.
    pub unsafe_heuristic: bool,
    /// `||X0 - X*|| / ||X*||` for locally started methods.
    pub loc_start_ratio: f64,
    pub record_iterates: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            max_iters: 1000,
            rel_tol: 1e-12,
            alpha_safety: 0.99,
            beta_override: None,
            unsafe_heuristic: false,
            loc_start_ratio: 0.1,
            record_iterates: false,
        }
    }
}

/// Inspectable configuration of a wired method.
#[derive(Debug, Clone)]
pub struct MethodSetup {
    pub name: MethodName,
    pub beta: f64,
    /// Fixed step size, when the method uses one.
    pub alpha: Option<f64>,
    /// Douglas–Rachford step parameter, when applicable.
    pub gamma: Option<f64>,
    pub backtracking: bool,
    pub objective: &'static str,
}

/// A method bound to one instance, ready to run.
pub struct ConfiguredMethod<'a> {
    pub setup: MethodSetup,
    runner: Box<dyn Fn() -> Result<IterationTrace> + Sync + Send + 'a>,
}

impl<'a> ConfiguredMethod<'a> {
    pub fn run(&self) -> Result<IterationTrace> {
        (self.runner)()
    }
}

/// Starting point for locally convergent methods: the ground truth plus
/// scaled Gaussian noise at the configured relative distance. The noise
/// stream is derived from the instance seed, offset to keep it disjoint
/// from instance generation.
fn local_start(inst: &FeasibilityInstance, ratio: f64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed.wrapping_add(0x6c6f63));
    let g = DMatrix::from_fn(inst.n, inst.m, |_, _| std_normal(&mut rng));
    let sigma = ratio * inst.x_star.norm() / g.norm();
    &inst.x_star + g * sigma
}

/// Wire one named method configuration to an instance.
pub fn make_method<'a>(
    name: MethodName,
    inst: &'a FeasibilityInstance,
    opts: &BenchOptions,
) -> Result<ConfiguredMethod<'a>> {
    let dim = inst.n * inst.m;
    let x0_global = DVector::zeros(dim);
    let base_cfg = SolverConfig {
        max_iters: opts.max_iters,
        record_iterates: opts.record_iterates,
        ..Default::default()
    };
    let abs_tol = |x0: &DVector<f64>| opts.rel_tol * inst.residual_flat(x0).max(f64::MIN_POSITIVE);
    let bt = Backtracking {
        alpha_safety: opts.alpha_safety,
        ..Default::default()
    };

    match name {
        MethodName::Altproj => {
            let cfg = SolverConfig {
                tol: abs_tol(&x0_global),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta: 0.0,
                    alpha: None,
                    gamma: None,
                    backtracking: false,
                    objective: "X <- P_rank(P_affine(X))",
                },
                runner: Box::new(move || {
                    alternating_projection_run_with(
                        inst.rank_set.as_ref(),
                        inst.affine.as_ref(),
                        &cfg,
                        &x0_global,
                        Some(&|x| inst.residual_on_rank_member(x)),
                    )
                }),
            })
        }
        MethodName::Avrgproj => {
            let cfg = SolverConfig {
                tol: abs_tol(&x0_global),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta: 0.0,
                    alpha: None,
                    gamma: None,
                    backtracking: false,
                    objective: "X <- (P_affine(X) + P_rank(X)) / 2",
                },
                runner: Box::new(move || {
                    averaged_projection_run_with(
                        inst.affine.as_ref(),
                        inst.rank_set.as_ref(),
                        &cfg,
                        &x0_global,
                        Some(&|x| inst.residual_flat(x)),
                    )
                }),
            })
        }
        MethodName::Dr | MethodName::Dr75 => {
            let heuristic = (name == MethodName::Dr75).then(DrHeuristic::default);
            let cfg = SolverConfig {
                tol: abs_tol(&x0_global),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta: 0.0,
                    alpha: None,
                    gamma: Some(DR_GAMMA_SAFE),
                    backtracking: false,
                    objective: "DR on 0.5 dist(., affine)^2 + indicator(rank)",
                },
                runner: Box::new(move || {
                    douglas_rachford_run_with(
                        inst.affine.as_ref(),
                        inst.rank_set.as_ref(),
                        DR_GAMMA_SAFE,
                        heuristic.clone(),
                        &cfg,
                        &x0_global,
                        Some(&|x| inst.residual_on_rank_member(x)),
                    )
                }),
            })
        }
        MethodName::GlobAltproj => {
            let alpha = opts.alpha_safety;
            let cfg = SolverConfig {
                tol: abs_tol(&x0_global),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta: 0.0,
                    alpha: Some(alpha),
                    gamma: None,
                    backtracking: false,
                    objective: "X <- P_rank((1-a) X + a P_affine(X))",
                },
                runner: Box::new(move || {
                    relaxed_alternating_projection_run_with(
                        inst.rank_set.as_ref(),
                        inst.affine.as_ref(),
                        alpha,
                        0.0,
                        &cfg,
                        &x0_global,
                        Some(&|x| inst.residual_on_rank_member(x)),
                    )
                }),
            })
        }
        MethodName::GlobIpianoAltproj
        | MethodName::GlobIpianoAltprojBt
        | MethodName::HeurIpianoAltproj => {
            if name == MethodName::HeurIpianoAltproj && !opts.unsafe_heuristic {
                return Err(ProxalError::usage(
                    "heur-ipiano-altproj is theoretically infeasible; enable it explicitly \
                     with the unsafe-heuristic option",
                ));
            }
            let problem = CompositeProblem::new(
                Arc::new(HalfSquaredDistance::new(inst.affine.clone())),
                Arc::new(SetIndicator::new(inst.rank_set.clone(), Convexity::Nonconvex)),
                dim,
            );
            let (beta, alpha, backtracking, unsafe_cfg) = match name {
                MethodName::GlobIpianoAltproj => {
                    let beta = opts.beta_override.unwrap_or(0.45);
                    (beta, opts.alpha_safety * (1.0 - 2.0 * beta), None, false)
                }
                MethodName::GlobIpianoAltprojBt => {
                    (opts.beta_override.unwrap_or(0.45), 0.0, Some(bt), false)
                }
                _ => (opts.beta_override.unwrap_or(0.75), 1.0, None, true),
            };
            let cfg = SolverConfig {
                alpha,
                beta,
                tol: abs_tol(&x0_global),
                backtracking: backtracking.clone(),
                allow_inadmissible: unsafe_cfg,
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta,
                    alpha: backtracking.is_none().then_some(alpha),
                    gamma: None,
                    backtracking: backtracking.is_some(),
                    objective: "min 0.5 dist(X, affine)^2 over the rank set",
                },
                runner: Box::new(move || {
                    ipiano_run_with(
                        &problem,
                        &cfg,
                        &x0_global,
                        Some(&|x| inst.residual_on_rank_member(x)),
                    )
                }),
            })
        }
        MethodName::LocIpianoAltprojBt => {
            let problem = CompositeProblem::new(
                Arc::new(HalfSquaredDistance::new(inst.rank_set.clone())),
                Arc::new(SetIndicator::new(inst.affine.clone(), Convexity::Convex)),
                dim,
            );
            let beta = opts.beta_override.unwrap_or(0.75);
            // The iterates live in the affine set, so the start is projected
            // onto it after the local perturbation.
            let x0 = inst
                .affine
                .project_flat(&flatten(&local_start(inst, opts.loc_start_ratio)))?;
            let cfg = SolverConfig {
                beta,
                tol: abs_tol(&x0),
                backtracking: Some(bt),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta,
                    alpha: None,
                    gamma: None,
                    backtracking: true,
                    objective: "min 0.5 dist(X, rank)^2 over the affine set",
                },
                runner: Box::new(move || {
                    ipiano_run_with(&problem, &cfg, &x0, Some(&|x| inst.residual_flat(x)))
                }),
            })
        }
        MethodName::LocHeavyballAvrgprojBt => {
            use crate::prox::{ScaledSmooth, SumSmooth};
            let objective = SumSmooth {
                terms: vec![
                    Arc::new(ScaledSmooth {
                        factor: 2.0,
                        inner: Arc::new(HalfSquaredDistance::new(inst.affine.clone())),
                    }),
                    Arc::new(ScaledSmooth {
                        factor: 2.0,
                        inner: Arc::new(HalfSquaredDistance::new(inst.rank_set.clone())),
                    }),
                ],
            };
            let beta = opts.beta_override.unwrap_or(0.75);
            let x0 = flatten(&local_start(inst, opts.loc_start_ratio));
            let cfg = SolverConfig {
                beta,
                tol: abs_tol(&x0),
                backtracking: Some(bt),
                ..base_cfg
            };
            Ok(ConfiguredMethod {
                setup: MethodSetup {
                    name,
                    beta,
                    alpha: None,
                    gamma: None,
                    backtracking: true,
                    objective: "min dist(X, affine)^2 + dist(X, rank)^2",
                },
                runner: Box::new(move || {
                    heavy_ball_run_with(&objective, &cfg, &x0, Some(&|x| inst.residual_flat(x)))
                }),
            })
        }
    }
}

/// Convenience wrapper: wire and run in one call.
pub fn run_method(
    name: MethodName,
    inst: &FeasibilityInstance,
    opts: &BenchOptions,
) -> Result<IterationTrace> {
    make_method(name, inst, opts)?.run()
}

/// On-disk instance description. Operators are optional: when omitted the
/// instance is regenerated deterministically from the seed.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    version: u32,
    seed: u64,
    n: usize,
    m: usize,
    rank: usize,
    measurements: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    operators: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs: Option<Vec<f64>>,
}

const INSTANCE_FORMAT: &str = "proxal-feasibility-instance";

/// Serialize an instance description; `include_dense` embeds the operator
/// entries and right-hand side for replay without the generator.
pub fn instance_to_string(inst: &FeasibilityInstance, include_dense: bool) -> String {
    let file = InstanceFile {
        format: INSTANCE_FORMAT.to_string(),
        version: 1,
        seed: inst.seed,
        n: inst.n,
        m: inst.m,
        rank: inst.rank,
        measurements: inst.measurements,
        operators: include_dense.then(|| {
            (0..inst.measurements)
                .map(|i| inst.affine.operator(i).as_slice().to_vec())
                .collect()
        }),
        rhs: include_dense.then(|| inst.affine.rhs().as_slice().to_vec()),
    };
    serde_json::to_string_pretty(&file).expect("instance serialization")
}

pub fn save_instance(inst: &FeasibilityInstance, path: &Path, include_dense: bool) -> Result<()> {
    std::fs::write(path, instance_to_string(inst, include_dense))?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<FeasibilityInstance> {
    let text = std::fs::read_to_string(path)?;
    instance_from_str(&text)
}

pub fn instance_from_str(text: &str) -> Result<FeasibilityInstance> {
    let file: InstanceFile = serde_json::from_str(text)
        .map_err(|e| ProxalError::usage(format!("bad instance file: {e}")))?;
    if file.format != INSTANCE_FORMAT {
        return Err(ProxalError::usage(format!(
            "unexpected instance format '{}'",
            file.format
        )));
    }
    match (file.operators, file.rhs) {
        (Some(ops), Some(rhs)) => {
            if ops.len() != file.measurements || rhs.len() != file.measurements {
                return Err(ProxalError::usage("instance file operator count mismatch"));
            }
            let mats: Vec<DMatrix<f64>> = ops
                .iter()
                .map(|o| DMatrix::from_column_slice(file.n, file.m, o))
                .collect();
            let affine = AffineMeasurementSet::new(&mats, DVector::from_vec(rhs))?;
            // Rebuild the ground truth from the seeded stream for local starts.
            let regenerated =
                gen_instance(file.seed, file.n, file.m, file.rank, file.measurements)?;
            Ok(FeasibilityInstance {
                n: file.n,
                m: file.m,
                rank: file.rank,
                measurements: file.measurements,
                seed: file.seed,
                affine: Arc::new(affine),
                rank_set: Arc::new(RankSet::new(file.rank, file.n, file.m)?),
                x_star: regenerated.x_star,
            })
        }
        (None, None) => gen_instance(file.seed, file.n, file.m, file.rank, file.measurements),
        _ => Err(ProxalError::usage(
            "instance file must embed both operators and rhs, or neither",
        )),
    }
}
