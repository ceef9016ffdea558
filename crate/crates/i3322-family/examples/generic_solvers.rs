//! The three generic solvers underneath the physics: LP, BFGS, SDP.
//!
//! Each solver is exercised on a small instance with a known answer, plus one
//! physics-flavored use: BFGS on the banded-realization objective at a fixed
//! dimension, and the SDP on the CHSH moment relaxation (optimum 2*sqrt(2)).

use i3322_family::npa::{build_custom_moment_problem, MomentObjective, NpaLevel};
use i3322_family::optim::lp::{solve_lp, LinearProgram};
use i3322_family::optim::qn::{maximize_qn, QuasiNewtonConfig};
use i3322_family::optim::sdp::solve_sdp;
use i3322_family::functional::FunctionalParams;
use i3322_family::pv;
use i3322_family::sweep::format_sig;
use i3322_family::Result;

fn main() -> Result<()> {
    // LP: maximize x + 2y on the triangle x, y >= 0, x + y = 1 -> 2 at (0,1).
    let lp = LinearProgram {
        objective: vec![1.0, 2.0],
        a_eq: vec![vec![1.0, 1.0]],
        b_eq: vec![1.0],
        lower: vec![0.0, 0.0],
        upper: vec![f64::INFINITY, f64::INFINITY],
    };
    let sol = solve_lp(&lp)?;
    println!("LP: value {} at {:?}", sol.value, sol.x);
    assert!((sol.value - 2.0).abs() < 1e-9);

    // BFGS: a smooth bump with maximum 3 at (1, -2).
    let f = |x: &[f64]| 3.0 - (x[0] - 1.0).powi(2) - 2.0 * (x[1] + 2.0).powi(2);
    let qn = maximize_qn(f, &[0.0, 0.0], &QuasiNewtonConfig::default());
    println!(
        "BFGS: value {} at ({}, {}) after {} iterations",
        format_sig(qn.value, 9),
        format_sig(qn.x[0], 6),
        format_sig(qn.x[1], 6),
        qn.iterations
    );
    assert!((qn.value - 3.0).abs() < 1e-9);

    // BFGS on the banded-realization objective at local dimension 5 (the
    // ansatz optimum there is 4.89895737...; the two-qubit ceiling is 5).
    let params = FunctionalParams::i3322();
    let init = pv::structured_init(5);
    let opt = pv::optimize_pv(&params, 5, &init, &pv::PvOptConfig::default())?;
    println!("banded objective, n = 5: {}", format_sig(opt.value, 9));
    assert!(opt.value > 4.8);

    // SDP: CHSH moment relaxation at the lowest level is already tight.
    let problem = build_custom_moment_problem(&MomentObjective::chsh(), NpaLevel::Level1)?;
    let sdp = solve_sdp(&problem.sdp)?;
    let value = sdp.value + problem.constant;
    println!(
        "SDP: CHSH level-1 bound {} (2*sqrt(2) = {})",
        format_sig(value, 12),
        format_sig(2.0 * std::f64::consts::SQRT_2, 12)
    );
    assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-6);
    Ok(())
}
