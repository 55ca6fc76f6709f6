//! Inertial proximal algorithms for non-convex composite optimization.
//!
//! The crate bundles:
//!
//! * oracle contracts for composite problems `h = f + g` ([`oracle`]),
//! * proximal mappings, projections and Moreau envelopes ([`prox`], [`sets`]),
//! * the solvers: inertial proximal gradient (constant step and
//!   backtracking), Heavy-ball, inertial averaged/alternating proximal
//!   minimization, projection methods, and a Douglas–Rachford feasibility
//!   baseline ([`solver`]),
//! * trace-level descent certificates: sufficient decrease, relative
//!   subgradient error, finite length, containment, growth sampling, and a
//!   convergence-rate classifier ([`certificate`]),
//! * the low-rank matrix feasibility benchmark ([`lowrank`]).

pub mod certificate;
pub mod error;
pub mod lowrank;
pub mod oracle;
pub mod prox;
pub mod sets;
pub mod solver;
pub mod trace;

pub use error::{ProxalError, Result};
pub use oracle::{
    composite_value, ipiano_subgradient_residual, lyapunov_value, CompositeProblem, Convexity,
    Lyapunov, ProxOracle, SmoothOracle,
};
pub use solver::{Backtracking, SolverConfig};
pub use trace::{IterationTrace, RunStatus, TraceRecord};
