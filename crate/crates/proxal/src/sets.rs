//! Constraint sets as Euclidean projections.
//!
//! Projection methods and distance-function oracles only interact with sets
//! through [`SetProjection`]. Matrix-valued problems are handled on flattened
//! (column-major) vectors so that all solvers operate on one iterate type;
//! the Frobenius geometry of the matrix space is exactly the Euclidean
//! geometry of the flattening.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{ProxalError, Result};
use crate::oracle::SmoothOracle;

/// Euclidean projection onto a closed set.
///
/// For non-convex sets the projection may be set-valued; implementations
/// return a deterministic selection.
pub trait SetProjection: Send + Sync {
    fn project(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// Projection defined by a closure, mostly for tests and small custom sets.
pub struct FnProjection<F>(pub F);

impl<F> SetProjection for FnProjection<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.0)(x)
    }
}

/// Value and gradient of `x ↦ 0.5 dist(x, S)^2`.
///
/// This is the Moreau envelope (unit scale) of the indicator of `S`, so the
/// gradient is `x - P_S(x)` wherever the projection is single-valued.
pub fn half_sq_distance_grad(set: &dyn SetProjection, x: &DVector<f64>) -> (f64, DVector<f64>) {
    let p = set.project(x);
    let diff = x - p;
    (0.5 * diff.norm_squared(), diff)
}

/// `0.5 dist(., S)^2` as a smooth oracle.
///
/// The gradient is 1-Lipschitz for convex sets and locally 1-Lipschitz near
/// prox-regular sets, which is the constant the feasibility benchmark uses.
pub struct HalfSquaredDistance {
    set: Arc<dyn SetProjection>,
}

impl HalfSquaredDistance {
    pub fn new(set: Arc<dyn SetProjection>) -> Self {
        HalfSquaredDistance { set }
    }
}

impl SmoothOracle for HalfSquaredDistance {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        half_sq_distance_grad(self.set.as_ref(), x).0
    }

    fn grad(&self, x: &DVector<f64>) -> DVector<f64> {
        half_sq_distance_grad(self.set.as_ref(), x).1
    }

    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        half_sq_distance_grad(self.set.as_ref(), x)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}

fn vec_as_mat(x: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, x.as_slice())
}

fn mat_as_vec(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

enum GramSolver {
    Cholesky(Cholesky<f64, Dyn>),
    /// Eigenvalue-thresholded pseudo-solve for numerically singular Gram
    /// matrices: eigenvectors and reciprocal eigenvalues above the cutoff.
    Pseudo {
        basis: DMatrix<f64>,
        inv_eigs: DVector<f64>,
    },
}

/// The affine set `{X : <A_i, X> = b_i, i = 1..D}` described by `D`
/// measurement matrices, with the Gram matrix `G_ij = <A_i, A_j>` factored
/// once at construction.
pub struct AffineMeasurementSet {
    /// Row `i` is `vec(A_i)`; kept flat so forward/adjoint are single GEMVs.
    ops_flat: DMatrix<f64>,
    rhs: DVector<f64>,
    rows: usize,
    cols: usize,
    gram: DMatrix<f64>,
    solver: GramSolver,
}

impl AffineMeasurementSet {
    pub fn new(operators: &[DMatrix<f64>], rhs: DVector<f64>) -> Result<Self> {
        if operators.is_empty() {
            return Err(ProxalError::usage("affine set needs at least one operator"));
        }
        let (rows, cols) = (operators[0].nrows(), operators[0].ncols());
        if operators.iter().any(|a| a.nrows() != rows || a.ncols() != cols) {
            return Err(ProxalError::usage("operators must share dimensions"));
        }
        if rhs.len() != operators.len() {
            return Err(ProxalError::usage(format!(
                "rhs length {} does not match operator count {}",
                rhs.len(),
                operators.len()
            )));
        }
        let mut ops_flat = DMatrix::zeros(operators.len(), rows * cols);
        for (i, a) in operators.iter().enumerate() {
            ops_flat.row_mut(i).copy_from_slice(a.as_slice());
        }
        Self::from_flat(ops_flat, rows, cols, rhs)
    }

    /// Build from the pre-flattened operator stack (row `i` = `vec(A_i)`).
    pub fn from_flat(
        ops_flat: DMatrix<f64>,
        rows: usize,
        cols: usize,
        rhs: DVector<f64>,
    ) -> Result<Self> {
        if ops_flat.ncols() != rows * cols {
            return Err(ProxalError::usage("flattened operator width mismatch"));
        }
        if rhs.len() != ops_flat.nrows() {
            return Err(ProxalError::usage("rhs length mismatch"));
        }
        let gram = &ops_flat * ops_flat.transpose();
        let solver = Self::factor(&gram);
        Ok(AffineMeasurementSet {
            ops_flat,
            rhs,
            rows,
            cols,
            gram,
            solver,
        })
    }

    fn factor(gram: &DMatrix<f64>) -> GramSolver {
        let max_diag = gram.diagonal().iter().cloned().fold(0.0f64, f64::max);
        if let Some(chol) = gram.clone().cholesky() {
            let min_pivot = chol
                .l_dirty()
                .diagonal()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_pivot * min_pivot >= 1e-12 * max_diag.max(f64::MIN_POSITIVE) {
                return GramSolver::Cholesky(chol);
            }
        }
        let eig = gram.clone().symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        let cutoff = 1e-12 * max_eig.max(f64::MIN_POSITIVE);
        let inv_eigs = eig
            .eigenvalues
            .map(|l| if l > cutoff { 1.0 / l } else { 0.0 });
        GramSolver::Pseudo {
            basis: eig.eigenvectors,
            inv_eigs,
        }
    }

    pub fn measurement_count(&self) -> usize {
        self.ops_flat.nrows()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Reconstruct the dense measurement matrix `A_i`.
    pub fn operator(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.rows, self.cols, self.ops_flat.row(i).transpose().as_slice())
    }

    /// Forward map on the flattening: `(⟨A_1, X⟩, …, ⟨A_D, X⟩)`.
    pub fn apply_flat(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.ops_flat * x
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        &self.ops_flat * mat_as_vec(x)
    }

    /// Adjoint map `y ↦ Σ y_i A_i` on the flattening.
    pub fn adjoint_flat(&self, y: &DVector<f64>) -> DVector<f64> {
        self.ops_flat.tr_mul(y)
    }

    pub fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        vec_as_mat(&self.adjoint_flat(y), self.rows, self.cols)
    }

    fn solve_gram(&self, r: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.solver {
            GramSolver::Cholesky(chol) => Ok(chol.solve(r)),
            GramSolver::Pseudo { basis, inv_eigs } => {
                let coeffs = basis.tr_mul(r);
                let scaled = coeffs.component_mul(inv_eigs);
                let sol = basis * scaled;
                // An inconsistent right-hand side outside the Gram range means
                // the affine set itself is empty.
                let reached = &self.gram * &sol;
                if (reached - r).norm() > 1e-8 * (1.0 + r.norm()) {
                    return Err(ProxalError::infeasible(
                        "singular Gram matrix with inconsistent right-hand side",
                    ));
                }
                Ok(sol)
            }
        }
    }

    /// Euclidean projection `X - A*(A A*)^{-1}(A(X) - B)` on the flattening.
    pub fn project_flat(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let r = self.apply_flat(x) - &self.rhs;
        let c = self.solve_gram(&r)?;
        Ok(x - self.adjoint_flat(&c))
    }
}

/// Projection onto the affine measurement set.
pub fn project_affine(set: &AffineMeasurementSet, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let flat = set.project_flat(&mat_as_vec(x))?;
    Ok(vec_as_mat(&flat, set.rows, set.cols))
}

impl SetProjection for AffineMeasurementSet {
    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.project_flat(x)
            .expect("affine projection failed: empty set")
    }
}

/// Matrices of rank at most `rank`, as a (non-convex) projection target.
pub struct RankSet {
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
}

impl RankSet {
    pub fn new(rank: usize, rows: usize, cols: usize) -> Result<Self> {
        if rank == 0 || rank > rows.min(cols) {
            return Err(ProxalError::usage(format!(
                "rank bound {rank} must lie in 1..={}",
                rows.min(cols)
            )));
        }
        Ok(RankSet { rank, rows, cols })
    }
}

/// Best rank-`R` approximation in Frobenius norm: keep the `R` leading
/// singular triples. Ties at the cut (`σ_R = σ_{R+1}`) keep the first `R`
/// triples in decomposition order, a deterministic selection of the
/// set-valued projection.
///
/// Computed through the symmetric eigendecomposition of the smaller Gram
/// matrix (`X X^T` or `X^T X`): the projector onto the leading singular
/// subspace applied to `X` equals the truncated SVD, and the symmetric
/// solver stays accurate on rank-deficient inputs.
pub fn project_rank(set: &RankSet, x: &DMatrix<f64>) -> DMatrix<f64> {
    let k = set.rank.min(x.nrows()).min(x.ncols());
    let basis = leading_singular_basis(x, k);
    if x.nrows() <= x.ncols() {
        // basis holds left singular vectors: P = U_R (U_R^T X).
        &basis * (basis.tr_mul(x))
    } else {
        // basis holds right singular vectors: P = (X V_R) V_R^T.
        (x * &basis) * basis.transpose()
    }
}

/// Orthonormal basis of the leading `k`-dimensional singular subspace on the
/// smaller side of `x` (left if `nrows <= ncols`, right otherwise), ordered
/// by decreasing eigenvalue with stable tie-breaking.
fn leading_singular_basis(x: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let gram = if x.nrows() <= x.ncols() {
        x * x.transpose()
    } else {
        x.tr_mul(x)
    };
    let dim = gram.nrows();
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut basis = DMatrix::zeros(dim, k);
    for (col, &i) in order.iter().take(k).enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(i));
    }
    basis
}

/// Singular values of `x` in decreasing order, through the same symmetric
/// route as [`project_rank`]. Values below `sqrt(eps) * sigma_1` are at the
/// resolution limit of the squared (Gram) formulation.
pub fn singular_values(x: &DMatrix<f64>) -> Vec<f64> {
    let gram = if x.nrows() <= x.ncols() {
        x * x.transpose()
    } else {
        x.tr_mul(x)
    };
    let eig = gram.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

impl SetProjection for RankSet {
    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = vec_as_mat(x, self.rows, self.cols);
        mat_as_vec(&project_rank(self, &m))
    }
}

/// Column-major flattening helpers shared by the feasibility modules.
pub fn flatten(x: &DMatrix<f64>) -> DVector<f64> {
    mat_as_vec(x)
}

pub fn unflatten(x: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    vec_as_mat(x, rows, cols)
}
