//! Shared test oracles, independent of the library's implementation paths.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Central finite differences of a scalar function.
pub fn central_diff(f: &dyn Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let mut g = DVector::zeros(x.len());
    for i in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}

/// One-sided Jacobi SVD, used as a reference decomposition. Returns
/// `(u, sigma, v)` with `a = u diag(sigma) v^T` and `sigma` descending.
pub fn jacobi_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let transposed = a.nrows() < a.ncols();
    let mut w = if transposed { a.transpose() } else { a.clone() };
    let rows = w.nrows();
    let cols = w.ncols();
    let mut v = DMatrix::<f64>::identity(cols, cols);

    for _sweep in 0..100 {
        let mut worst = 0.0f64;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let app = w.column(p).norm_squared();
                let aqq = w.column(q).norm_squared();
                let apq = w.column(p).dot(&w.column(q));
                let scale = (app * aqq).sqrt().max(1e-300);
                worst = worst.max(apq.abs() / scale);
                if apq.abs() <= 1e-15 * scale {
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..cols {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if worst < 1e-14 {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = (0..cols).map(|j| (w.column(j).norm(), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut u = DMatrix::<f64>::zeros(rows, cols);
    let mut vs = DMatrix::<f64>::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    for (k, &(s, j)) in order.iter().enumerate() {
        sigma.push(s);
        if s > 0.0 {
            u.set_column(k, &(w.column(j) / s));
        }
        vs.set_column(k, &v.column(j));
    }
    if transposed {
        (vs, sigma, u)
    } else {
        (u, sigma, vs)
    }
}

/// Rank-`r` truncation through the reference SVD.
pub fn jacobi_truncate(a: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    let (u, s, v) = jacobi_svd(a);
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..r.min(s.len()) {
        out.ger(s[i], &u.column(i), &v.column(i), 1.0);
    }
    out
}

/// Projection onto the line through the origin at angle `theta` in the plane.
pub fn plane_line_projection(theta: f64) -> impl Fn(&DVector<f64>) -> DVector<f64> {
    move |x: &DVector<f64>| {
        let u = DVector::from_vec(vec![theta.cos(), theta.sin()]);
        &u * u.dot(x)
    }
}
