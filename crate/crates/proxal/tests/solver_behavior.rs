//! Behavioral contracts of the solver suite on analytically tractable
//! problems: closed-form recursions, special-case collapses, and
//! cross-implementation equivalences.

mod common;

use std::sync::Arc;

use nalgebra::DVector;
use proxal::certificate::{check_finite_length, check_h1};
use proxal::oracle::{CompositeProblem, Convexity, ProxOracle, SmoothOracle};
use proxal::prox::{
    DiagQuadratic, EnvelopeRegime, FnProx, FnSmooth, L1Norm, MoreauEnvelope, PointIndicator,
    ScaledSmooth, SetIndicator, SumSmooth, ZeroProx,
};
use proxal::sets::{FnProjection, HalfSquaredDistance, SetProjection};
use proxal::solver::{
    alternating_projection_run, averaged_projection_run, douglas_rachford_run, heavy_ball_run,
    inertial_alternating_prox_run, inertial_averaged_prox_run, ipiano_run, ipiano_step,
    relaxed_alternating_projection_run, SolverConfig,
};
use proxal::{RunStatus, SolverConfig as Cfg};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

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
        Some(f64::MIN_POSITIVE),
    ))
}

fn vec1(v: f64) -> DVector<f64> {
    DVector::from_vec(vec![v])
}

#[test]
fn ipiano_step_examples() {
    // Pure gradient step.
    let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
    let cfg = Cfg::with_alpha_beta(0.5, 0.0);
    let x = ipiano_step(&p, &cfg, &vec1(2.0), &vec1(2.0)).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-15);

    // Extrapolation then gradient step.
    let cfg = Cfg::with_alpha_beta(0.5, 0.5);
    let x = ipiano_step(&p, &cfg, &vec1(2.0), &vec1(1.0)).unwrap();
    assert!((x[0] - 1.5).abs() < 1e-15);

    // Projection onto the half-line through the prox of its indicator.
    let halfline = FnProx::new(
        |x: &DVector<f64>| {
            if x.iter().all(|&v| v >= -1e-12) {
                0.0
            } else {
                f64::INFINITY
            }
        },
        |_step, v: &DVector<f64>| Ok(v.map(|t| t.max(0.0))),
        Convexity::Convex,
    );
    let p = CompositeProblem::new(zero_smooth(), Arc::new(halfline), 1);
    let cfg = Cfg::with_alpha_beta(1.0, 0.0);
    let x = ipiano_step(&p, &cfg, &vec1(-1.0), &vec1(-1.0)).unwrap();
    assert_eq!(x[0], 0.0);
}

#[test]
fn gradient_descent_decays_geometrically() {
    let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
    let cfg = Cfg {
        alpha: 0.5,
        beta: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let trace = ipiano_run(&p, &cfg, &vec1(4.0)).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    let iterates = trace.iterates().unwrap();
    for k in 0..iterates.len() {
        let expect = 4.0 * 0.5f64.powi(k as i32);
        assert!((iterates[k][0] - expect).abs() <= 1e-12 * (1.0 + expect));
    }
    // The Lyapunov column never increases along an admissible run.
    let lyap: Vec<f64> = trace.records().iter().map(|r| r.lyapunov.unwrap()).collect();
    for w in lyap.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    assert!(check_h1(&trace).unwrap() > 0.0);
}

#[test]
fn lasso_limit_matches_grid_search_oracle() {
    // h(x) = 0.5 (x - 1)^2 + |x|; independent grid oracle at step 1e-4.
    let f = Arc::new(DiagQuadratic::new(vec1(1.0), vec1(1.0)));
    let p = CompositeProblem::new(f, Arc::new(L1Norm), 1);
    let cfg = Cfg {
        alpha: 0.5,
        beta: 0.25,
        record_iterates: true,
        ..Default::default()
    };
    let trace = ipiano_run(&p, &cfg, &vec1(2.0)).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    let last = &trace.iterates().unwrap()[trace.len() - 1];

    let h = |t: f64| 0.5 * (t - 1.0) * (t - 1.0) + t.abs();
    let mut best_t = -2.0;
    let mut best = f64::INFINITY;
    let mut t = -2.0;
    while t <= 2.0 {
        if h(t) < best {
            best = h(t);
            best_t = t;
        }
        t += 1e-4;
    }
    assert!(best_t.abs() <= 1e-4, "grid argmin {best_t}");
    assert!((last[0] - best_t).abs() <= 1e-4);

    // Converged run has summable steps with a decaying tail.
    let (total, tail_decay) = check_finite_length(&trace);
    assert!(total.is_finite() && tail_decay);
    assert!(check_h1(&trace).unwrap() > 0.0);
}

#[test]
fn ipiano_reports_divergence() {
    let p = CompositeProblem::new(half_sq(), Arc::new(ZeroProx), 1);
    let cfg = Cfg {
        alpha: 5.0, // far outside the admissible range
        beta: 0.0,
        allow_inadmissible: true,
        max_iters: 200,
        ..Default::default()
    };
    let trace = ipiano_run(&p, &cfg, &vec1(1.0)).unwrap();
    assert_eq!(trace.status, RunStatus::Diverged);
}

#[test]
fn ipiano_rejects_start_outside_domain() {
    let p = CompositeProblem::new(
        zero_smooth(),
        Arc::new(PointIndicator::new(vec1(0.0))),
        1,
    );
    let cfg = Cfg::with_alpha_beta(0.5, 0.0);
    assert!(ipiano_run(&p, &cfg, &vec1(3.0)).is_err());
}

#[test]
fn heavy_ball_exact_step_on_unit_quadratic() {
    let f = DiagQuadratic::new(vec1(1.0), vec1(0.0));
    let cfg = Cfg {
        alpha: 1.0,
        beta: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let trace = heavy_ball_run(&f, &cfg, &vec1(5.0)).unwrap();
    assert_eq!(trace.iterates().unwrap()[1][0], 0.0);
    assert_eq!(trace.status, RunStatus::Converged);
}

#[test]
fn heavy_ball_without_inertia_is_gradient_descent() {
    let diag = DVector::from_vec(vec![1.5, 0.4, 0.9]);
    let center = DVector::from_vec(vec![0.3, -0.7, 1.1]);
    let f = DiagQuadratic::new(diag.clone(), center.clone());
    let cfg = Cfg {
        alpha: 0.6,
        beta: 0.0,
        max_iters: 60,
        record_iterates: true,
        tol: 0.0,
        ..Default::default()
    };
    let trace = heavy_ball_run(&f, &cfg, &DVector::from_vec(vec![2.0, 2.0, 2.0])).unwrap();
    // Direct gradient-descent recursion.
    let mut x = DVector::from_vec(vec![2.0, 2.0, 2.0]);
    for it in trace.iterates().unwrap() {
        assert!((it - &x).norm() <= 1e-12 * (1.0 + x.norm()));
        let grad = DVector::from_fn(3, |i, _| diag[i] * (x[i] - center[i]));
        x -= grad * 0.6;
    }
}

#[test]
fn heavy_ball_matches_proximal_route_on_random_quadratics() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..10 {
        let dim = 4;
        let diag = DVector::from_fn(dim, |_, _| 0.2 + rng.random::<f64>() * 2.0);
        let center = DVector::from_fn(dim, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let x0 = DVector::from_fn(dim, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let l = diag.iter().cloned().fold(0.0f64, f64::max);
        let beta = 0.3 + 0.4 * rng.random::<f64>();
        let alpha = 0.9 * 2.0 * (1.0 - beta) / l;
        let cfg = Cfg {
            alpha,
            beta,
            max_iters: 120,
            tol: 0.0,
            record_iterates: true,
            ..Default::default()
        };
        let f = Arc::new(DiagQuadratic::new(diag.clone(), center.clone()));
        let hb = heavy_ball_run(f.as_ref(), &cfg, &x0).unwrap();
        let p = CompositeProblem::new(f, Arc::new(ZeroProx), dim);
        let pr = ipiano_run(&p, &cfg, &x0).unwrap();
        let n = hb.len().min(pr.len());
        assert!(n > 50, "trial {trial} too short");
        for k in 0..n {
            let a = &hb.iterates().unwrap()[k];
            let b = &pr.iterates().unwrap()[k];
            assert!(
                (a - b).norm() <= 1e-12 * (1.0 + a.norm()),
                "trial {trial} iterate {k} deviates by {}",
                (a - b).norm()
            );
        }
    }
}

#[test]
fn ppa_collapse_is_repeated_projection() {
    // f = 0, beta = 0, g = indicator of a line: the run is the projection
    // iteration, fixed after one step.
    let line = Arc::new(FnProjection(|x: &DVector<f64>| {
        let u = DVector::from_vec(vec![(0.7f64).cos(), (0.7f64).sin()]);
        &u * u.dot(x)
    }));
    let g = Arc::new(SetIndicator::new(line.clone(), Convexity::Convex));
    let p = CompositeProblem::new(zero_smooth(), g, 2);
    let cfg = Cfg {
        alpha: 1.3,
        beta: 0.0,
        max_iters: 5,
        record_iterates: true,
        tol: 0.0,
        ..Default::default()
    };
    let x0 = DVector::from_vec(vec![3.0, -1.0]);
    // x0 must be in dom g for the proximal route, so start on the line.
    let x0 = line.project(&x0);
    let trace = ipiano_run(&p, &cfg, &x0).unwrap();
    let mut x = x0.clone();
    for it in trace.iterates().unwrap() {
        assert!((it - &x).norm() <= 1e-12);
        x = line.project(&x);
    }
}

#[test]
fn inertial_averaged_full_step_to_single_prox_point() {
    let oracles: Vec<Arc<dyn ProxOracle>> = vec![Arc::new(PointIndicator::new(vec1(0.0)))];
    let cfg = Cfg {
        alpha: 1.0,
        beta: 0.0,
        lambda: 1.0,
        record_iterates: true,
        max_iters: 4,
        ..Default::default()
    };
    let trace = inertial_averaged_prox_run(&oracles, &cfg, &vec1(4.0)).unwrap();
    assert_eq!(trace.iterates().unwrap()[1][0], 0.0);
}

#[test]
fn inertial_averaged_fixed_points_are_stationary() {
    let oracles: Vec<Arc<dyn ProxOracle>> = vec![Arc::new(ZeroProx), Arc::new(ZeroProx)];
    let cfg = Cfg {
        alpha: 0.5,
        beta: 0.0,
        lambda: 1.0,
        max_iters: 10,
        ..Default::default()
    };
    let trace = inertial_averaged_prox_run(&oracles, &cfg, &vec1(1.5)).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    assert!(trace.records().iter().all(|r| r.step_norm == 0.0));
}

fn line_indicator(theta: f64) -> Arc<SetIndicator> {
    let proj = common::plane_line_projection(theta);
    Arc::new(SetIndicator::new(
        Arc::new(FnProjection(proj)),
        Convexity::Convex,
    ))
}

#[test]
fn inertial_averaged_finds_line_intersection() {
    // Two lines through the origin intersect exactly there.
    let oracles: Vec<Arc<dyn ProxOracle>> = vec![line_indicator(0.0), line_indicator(1.1)];
    let cfg = Cfg {
        alpha: 0.9,
        beta: 0.2,
        lambda: 1.0,
        max_iters: 4000,
        tol: 1e-10,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = DVector::from_vec(vec![2.0, 1.0]);
    let trace = inertial_averaged_prox_run(&oracles, &cfg, &x0).unwrap();
    let last = &trace.iterates().unwrap()[trace.len() - 1];
    for theta in [0.0, 1.1] {
        let proj = common::plane_line_projection(theta);
        assert!((last - proj(last)).norm() <= 1e-8);
    }
}

#[test]
fn inertial_averaged_equals_heavy_ball_on_distance_sum() {
    // Indicator oracles with lambda = 1 against Heavy-ball on the sum of
    // half squared distances, with the step mapping alpha_hb = alpha / M.
    let thetas = [0.3, 1.4];
    let oracles: Vec<Arc<dyn ProxOracle>> =
        thetas.iter().map(|&t| line_indicator(t) as Arc<dyn ProxOracle>).collect();
    let alpha = 0.8;
    let beta = 0.35;
    let cfg_avg = Cfg {
        alpha,
        beta,
        lambda: 1.0,
        max_iters: 80,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = DVector::from_vec(vec![1.7, -0.4]);
    let avg = inertial_averaged_prox_run(&oracles, &cfg_avg, &x0).unwrap();

    let terms: Vec<Arc<dyn SmoothOracle>> = thetas
        .iter()
        .map(|&t| {
            Arc::new(HalfSquaredDistance::new(Arc::new(FnProjection(
                common::plane_line_projection(t),
            )))) as Arc<dyn SmoothOracle>
        })
        .collect();
    let sum = SumSmooth { terms };
    let cfg_hb = Cfg {
        alpha: alpha / thetas.len() as f64,
        beta,
        max_iters: 80,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let hb = heavy_ball_run(&sum, &cfg_hb, &x0).unwrap();
    let n = avg.len().min(hb.len());
    assert!(n >= 80);
    for k in 0..n {
        let a = &avg.iterates().unwrap()[k];
        let b = &hb.iterates().unwrap()[k];
        assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn inertial_alternating_point_indicators_collapse() {
    let g = PointIndicator::new(vec1(0.0));
    let f = PointIndicator::new(vec1(0.0));
    let cfg = Cfg {
        alpha: 0.5,
        beta: 0.1,
        lambda: 1.0,
        record_iterates: true,
        max_iters: 4,
        ..Default::default()
    };
    let trace = inertial_alternating_prox_run(&g, &f, &cfg, &vec1(3.0)).unwrap();
    assert_eq!(trace.iterates().unwrap()[1][0], 0.0);
}

#[test]
fn inertial_alternating_axes_converge_to_origin() {
    // g: x-axis, f: y-axis.
    let g = SetIndicator::new(
        Arc::new(FnProjection(|x: &DVector<f64>| {
            DVector::from_vec(vec![x[0], 0.0])
        })),
        Convexity::Convex,
    );
    let f = SetIndicator::new(
        Arc::new(FnProjection(|x: &DVector<f64>| {
            DVector::from_vec(vec![0.0, x[1]])
        })),
        Convexity::Convex,
    );
    let cfg = Cfg {
        alpha: 0.9,
        beta: 0.0,
        lambda: 1.0,
        max_iters: 2000,
        tol: 1e-11,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = DVector::from_vec(vec![2.0, 0.0]);
    let trace = inertial_alternating_prox_run(&g, &f, &cfg, &x0).unwrap();
    let last = &trace.iterates().unwrap()[trace.len() - 1];
    assert!(last.norm() <= 1e-8);
}

#[test]
fn inertial_alternating_equals_ipiano_on_envelope() {
    // Convex pair: g = |.|_1, f = |.|_1 smoothed into its Moreau envelope.
    let lambda = 0.7;
    let beta = 0.3;
    let alpha = 0.9 * 2.0 * (1.0 - beta) * lambda; // admissible for convex g
    let cfg = Cfg {
        alpha,
        beta,
        lambda,
        max_iters: 60,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = DVector::from_vec(vec![1.5, -2.0, 0.3]);
    let alt = inertial_alternating_prox_run(&L1Norm, &L1Norm, &cfg, &x0).unwrap();

    let env = Arc::new(
        MoreauEnvelope::new(Arc::new(L1Norm), lambda, EnvelopeRegime::Convex).unwrap(),
    );
    let p = CompositeProblem::new(env, Arc::new(L1Norm), 3);
    let pr = ipiano_run(&p, &cfg, &x0).unwrap();
    // Both routes may land exactly on the minimizer and stop one record
    // apart; compare the common prefix.
    let n = alt.len().min(pr.len());
    assert!(n >= 5);
    for k in 0..n {
        let a = &alt.iterates().unwrap()[k];
        let b = &pr.iterates().unwrap()[k];
        assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn alternating_projection_fixed_point() {
    let line = FnProjection(common::plane_line_projection(0.4));
    let cfg = Cfg {
        max_iters: 6,
        ..Default::default()
    };
    let x0 = {
        let proj = common::plane_line_projection(0.4);
        proj(&DVector::from_vec(vec![1.0, 2.0]))
    };
    let trace = alternating_projection_run(&line, &line, &cfg, &x0).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    assert!(trace.records().iter().all(|r| r.step_norm <= 1e-14));
}

#[test]
fn alternating_projection_two_lines_contracts_by_cos_squared() {
    let theta: f64 = 0.6;
    let l1 = FnProjection(common::plane_line_projection(0.0));
    let l2 = FnProjection(common::plane_line_projection(theta));
    let cfg = Cfg {
        max_iters: 40,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let d0 = 3.0;
    let trace = alternating_projection_run(&l1, &l2, &cfg, &vec_of(d0, 0.0)).unwrap();
    let ratio = theta.cos() * theta.cos();
    for (k, it) in trace.iterates().unwrap().iter().enumerate() {
        let expect = d0 * ratio.powi(k as i32);
        assert!(
            (it[0] - expect).abs() <= 1e-12 * (1.0 + expect),
            "iterate {k}: {} vs {expect}",
            it[0]
        );
        assert!(it[1].abs() <= 1e-12);
    }
}

fn vec_of(a: f64, b: f64) -> DVector<f64> {
    DVector::from_vec(vec![a, b])
}

#[test]
fn alternating_projection_identity_first_factor() {
    let identity = FnProjection(|x: &DVector<f64>| x.clone());
    let line = FnProjection(common::plane_line_projection(0.9));
    let cfg = Cfg {
        max_iters: 8,
        record_iterates: true,
        ..Default::default()
    };
    let trace = alternating_projection_run(&identity, &line, &cfg, &vec_of(2.0, -1.0)).unwrap();
    // After one application of P2 the iterate is fixed.
    let its = trace.iterates().unwrap();
    for k in 1..its.len() {
        assert!((&its[k] - &its[1]).norm() <= 1e-14);
    }
}

#[test]
fn averaged_projection_identical_sets_is_single_projection() {
    let line1 = FnProjection(common::plane_line_projection(0.8));
    let line2 = FnProjection(common::plane_line_projection(0.8));
    let cfg = Cfg {
        max_iters: 30,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = vec_of(1.0, 3.0);
    let trace = averaged_projection_run(&line1, &line2, &cfg, &x0).unwrap();
    let proj = common::plane_line_projection(0.8);
    let mut x = x0.clone();
    for it in trace.iterates().unwrap() {
        assert!((it - &x).norm() <= 1e-14);
        x = proj(&x);
    }
}

#[test]
fn averaged_projection_is_slower_than_alternating_on_two_lines() {
    let theta = 0.5;
    let l1 = FnProjection(common::plane_line_projection(0.0));
    let l2 = FnProjection(common::plane_line_projection(theta));
    let cfg = Cfg {
        max_iters: 4000,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = vec_of(2.0, 0.0);
    let alt = alternating_projection_run(&l1, &l2, &cfg, &x0).unwrap();
    let avg = averaged_projection_run(&l1, &l2, &cfg, &x0).unwrap();
    let to_tol = |t: &proxal::IterationTrace| {
        t.iterates()
            .unwrap()
            .iter()
            .position(|x| x.norm() <= 1e-6)
            .unwrap_or(usize::MAX)
    };
    let alt_iters = to_tol(&alt);
    let avg_iters = to_tol(&avg);
    assert!(
        alt_iters < avg_iters,
        "alternating {alt_iters} vs averaged {avg_iters}"
    );
}

#[test]
fn relaxed_projection_stationary_on_identical_sets() {
    let l1 = FnProjection(common::plane_line_projection(1.2));
    let l2 = FnProjection(common::plane_line_projection(1.2));
    let cfg = Cfg {
        max_iters: 10,
        tol: 0.0,
        record_iterates: true,
        ..Default::default()
    };
    let trace =
        relaxed_alternating_projection_run(&l1, &l2, 0.6, 0.0, &cfg, &vec_of(1.0, -2.0)).unwrap();
    let its = trace.iterates().unwrap();
    for k in 2..its.len() {
        assert!((&its[k] - &its[1]).norm() <= 1e-13);
    }
}

#[test]
fn relaxed_projection_validates_parameters() {
    let l = FnProjection(common::plane_line_projection(0.2));
    let cfg = Cfg::default();
    let x0 = vec_of(1.0, 1.0);
    assert!(relaxed_alternating_projection_run(&l, &l, 0.99, 0.3, &cfg, &x0).is_err());
    assert!(relaxed_alternating_projection_run(&l, &l, 0.2, 0.5, &cfg, &x0).is_err());
    assert!(relaxed_alternating_projection_run(&l, &l, 0.3, 0.3, &cfg, &x0).is_ok());
}

#[test]
fn relaxed_projection_solves_small_feasibility_instance() {
    use proxal::lowrank::{gen_instance, run_method, BenchOptions, MethodName};
    let inst = gen_instance(5, 6, 6, 2, 10).unwrap();
    let opts = BenchOptions {
        rel_tol: 1e-8,
        max_iters: 3000,
        ..Default::default()
    };
    let trace = run_method(MethodName::GlobAltproj, &inst, &opts).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
}

#[test]
fn douglas_rachford_stationary_inside_common_set() {
    let l1 = FnProjection(common::plane_line_projection(0.3));
    let l2 = FnProjection(common::plane_line_projection(0.3));
    let cfg = Cfg {
        max_iters: 10,
        ..Default::default()
    };
    let proj = common::plane_line_projection(0.3);
    let x0 = proj(&vec_of(2.0, 1.0));
    let trace = douglas_rachford_run(&l1, &l2, 0.22, None, &cfg, &x0).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    assert!(trace.records().iter().all(|r| r.step_norm <= 1e-13));
}

#[test]
fn backtracking_tracks_unknown_lipschitz_constant() {
    // Stiff quadratic without a Lipschitz hint: backtracking must still
    // converge and the probe must keep the descent lemma satisfied.
    let diag = DVector::from_vec(vec![8.0, 0.5]);
    let center = DVector::from_vec(vec![1.0, -1.0]);
    let f = FnSmooth::new(
        {
            let diag = diag.clone();
            let center = center.clone();
            move |x: &DVector<f64>| {
                (0..2).map(|i| 0.5 * diag[i] * (x[i] - center[i]).powi(2)).sum()
            }
        },
        {
            let diag = diag.clone();
            let center = center.clone();
            move |x: &DVector<f64>| DVector::from_fn(2, |i, _| diag[i] * (x[i] - center[i]))
        },
        None,
    );
    let cfg = Cfg {
        beta: 0.4,
        backtracking: Some(Default::default()),
        max_iters: 3000,
        tol: 1e-9,
        record_iterates: true,
        ..Default::default()
    };
    let trace = heavy_ball_run(&f, &cfg, &vec_of(4.0, 4.0)).unwrap();
    assert_eq!(trace.status, RunStatus::Converged);
    let last = &trace.iterates().unwrap()[trace.len() - 1];
    assert!((last - &center).norm() <= 1e-6);
}

#[test]
fn scaled_smooth_composes() {
    let base = half_sq();
    let scaled = ScaledSmooth {
        factor: 2.0,
        inner: base,
    };
    let x = vec_of(1.0, 2.0);
    assert_eq!(scaled.eval(&x), x.norm_squared());
    assert_eq!(scaled.lipschitz_hint(), Some(2.0));
    let _ = SolverConfig::default();
}
