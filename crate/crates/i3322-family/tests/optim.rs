//! The in-crate generic solvers: simplex LP, BFGS maximizer, and the
//! interior-point SDP, each against problems with known optima.

use i3322_family::functional::FunctionalParams;
use i3322_family::optim::lp::{solve_lp, LinearProgram};
use i3322_family::optim::qn::{maximize_qn, maximize_qn_with_grad, QuasiNewtonConfig};
use i3322_family::optim::sdp::{solve_sdp, SdpProblem, SparseSym};
use i3322_family::pv::{optimize_pv, structured_init, PvOptConfig};
use nalgebra::DMatrix;

#[test]
fn lp_respects_upper_bounds() {
    // max 2x + y s.t. x + y + s = 1.5, x <= 1, y <= 1: optimum (1, 0.5).
    let lp = LinearProgram {
        objective: vec![2.0, 1.0, 0.0],
        a_eq: vec![vec![1.0, 1.0, 1.0]],
        b_eq: vec![1.5],
        lower: vec![0.0; 3],
        upper: vec![1.0, 1.0, f64::INFINITY],
    };
    let sol = solve_lp(&lp).unwrap();
    assert!((sol.value - 2.5).abs() < 1e-9);
    assert!((sol.x[0] - 1.0).abs() < 1e-9);
    assert!((sol.x[1] - 0.5).abs() < 1e-9);
}

#[test]
fn lp_handles_degenerate_equalities() {
    // Repeated constraint rows must not break the solve.
    let lp = LinearProgram {
        objective: vec![1.0, 1.0],
        a_eq: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
        b_eq: vec![1.0, 2.0],
        lower: vec![0.0; 2],
        upper: vec![f64::INFINITY; 2],
    };
    let sol = solve_lp(&lp).unwrap();
    assert!((sol.value - 1.0).abs() < 1e-9);
}

#[test]
fn bfgs_finds_quadratic_maximum() {
    // max -(x-3)^2 - 2(y+1)^2 + 5 at (3, -1).
    let f = |x: &[f64]| -(x[0] - 3.0).powi(2) - 2.0 * (x[1] + 1.0).powi(2) + 5.0;
    let r = maximize_qn(f, &[0.0, 0.0], &QuasiNewtonConfig::default());
    assert!(r.converged);
    assert!((r.value - 5.0).abs() < 1e-10);
    assert!((r.x[0] - 3.0).abs() < 1e-5);
    assert!((r.x[1] + 1.0).abs() < 1e-5);
}

#[test]
fn bfgs_analytic_gradient_matches_finite_differences() {
    // A banana-shaped valley, maximized as the negative of the usual form.
    let f =
        |x: &[f64]| -(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2));
    let g = |x: &[f64]| {
        vec![
            400.0 * x[0] * (x[1] - x[0] * x[0]) + 2.0 * (1.0 - x[0]),
            -200.0 * (x[1] - x[0] * x[0]),
        ]
    };
    let cfg = QuasiNewtonConfig { max_iters: 2000, ..QuasiNewtonConfig::default() };
    let with_grad = maximize_qn_with_grad(f, g, &[-1.2, 1.0], &cfg);
    let with_fd = maximize_qn(f, &[-1.2, 1.0], &cfg);
    assert!(with_grad.value > -1e-10);
    assert!((with_grad.x[0] - 1.0).abs() < 1e-4);
    assert!((with_fd.value - with_grad.value).abs() < 1e-6);
}

#[test]
fn banded_ansatz_optimum_at_dimension_five() {
    // From the structured initial guess the dimension-5 banded family for
    // I3322 lands on its known interior optimum.
    let p = FunctionalParams::i3322();
    let opt = optimize_pv(&p, 5, &structured_init(5), &PvOptConfig::default()).unwrap();
    assert!(
        (opt.value - 4.8989573715).abs() < 1e-7,
        "dimension-5 optimum drifted: {}",
        opt.value
    );
}

#[test]
fn sdp_solves_scalar_psd_constraint() {
    // max y s.t. [[1, y], [y, 1]] >= 0: optimum 1.
    let problem = SdpProblem {
        m: 2,
        m0: DMatrix::identity(2, 2),
        blocks: vec![SparseSym { entries: vec![(0, 1, 1.0)] }],
        objective: vec![1.0],
    };
    let sol = solve_sdp(&problem).unwrap();
    assert!(sol.converged);
    assert!((sol.value - 1.0).abs() < 1e-6);
    // The certificate bound is a genuine upper bound.
    assert!(sol.certificate_bound >= sol.value - 1e-7);
}

#[test]
fn sdp_with_competing_blocks() {
    // max y1 + y2 s.t. diag(1 - y1, 1 - y2, 1 - y1 - y2) >= 0: optimum at
    // y1 = y2 = 1/2 is 1 (the third diagonal entry binds).
    let problem = SdpProblem {
        m: 3,
        m0: DMatrix::identity(3, 3),
        blocks: vec![
            SparseSym { entries: vec![(0, 0, -1.0), (2, 2, -1.0)] },
            SparseSym { entries: vec![(1, 1, -1.0), (2, 2, -1.0)] },
        ],
        objective: vec![1.0, 1.0],
    };
    let sol = solve_sdp(&problem).unwrap();
    assert!((sol.value - 1.0).abs() < 1e-6);
}

#[test]
fn sdp_validation_and_dump() {
    let bad = SdpProblem {
        m: 2,
        m0: DMatrix::identity(3, 3),
        blocks: vec![SparseSym::default()],
        objective: vec![1.0],
    };
    assert!(bad.validate().is_err());

    let mismatched = SdpProblem {
        m: 2,
        m0: DMatrix::identity(2, 2),
        blocks: vec![SparseSym::default()],
        objective: vec![1.0, 2.0],
    };
    assert!(mismatched.validate().is_err());

    let good = SdpProblem {
        m: 2,
        m0: DMatrix::identity(2, 2),
        blocks: vec![SparseSym { entries: vec![(0, 1, 1.0)] }],
        objective: vec![1.0],
    };
    good.validate().unwrap();
    let mut out = Vec::new();
    good.dump(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("# m = 2, K = 1"), "{text}");
    assert!(text.contains("obj 1"), "{text}");
}
