//! Exact quantum values on the alpha2 = 0 branch.
//!
//! On this branch the two-qubit optimum is known in closed form, with three
//! regimes: an entangled one where the value is a rational function of the
//! weights, and two product-state regimes where it degenerates to the local
//! bound. This example walks the regimes, realizes the optimal model, and
//! confirms the realization reproduces the closed-form value — including
//! along the one-parameter family of equally good third measurements.

use i3322_family::functional::{evaluate, FunctionalParams};
use i3322_family::quantum::{
    bell_operator, optimal_realization_branch0, quantum_value_branch0, BranchZeroRegime,
};
use i3322_family::sweep::format_sig;
use i3322_family::{linalg, Result};

fn main() -> Result<()> {
    println!("alpha1  alpha3 | regime           | beta_Q      | beta_L");
    for (a1, a3) in [(0.0, 1.0), (0.25, 1.0), (0.5, 2.0), (1.2, 1.5), (0.0, 0.4), (2.0, 1.0)] {
        let params = FunctionalParams::new(a1, 0, a3)?;
        let sol = quantum_value_branch0(&params)?;
        let (beta_l, _) = i3322_family::bounds::local_value_closed(&params);
        println!(
            "{a1:<7} {a3:<6} | {:<16} | {:<11} | {}",
            format!("{:?}", sol.regime),
            format_sig(sol.value, 9),
            format_sig(beta_l, 9)
        );
    }

    // In the entangled regime the optimum is attained by a two-qubit model
    // with a free third-measurement angle mu: a flat one-parameter family.
    let params = FunctionalParams::new(0.25, 0, 1.0)?;
    let sol = quantum_value_branch0(&params)?;
    assert_eq!(sol.regime, BranchZeroRegime::Entangled);
    println!("\n(0.25, 0, 1): beta_Q = {}", format_sig(sol.value, 12));
    for mu in [0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let r = optimal_realization_branch0(&params, mu)?;
        let direct = evaluate(&params, &r.behavior())?;
        let via_operator = linalg::expectation(&bell_operator(&params, &r)?, &r.state);
        println!(
            "  mu = {mu:<18}: behavior value {}, operator value {}",
            format_sig(direct, 12),
            format_sig(via_operator, 12)
        );
        assert!((direct - sol.value).abs() < 1e-10);
        assert!((via_operator - sol.value).abs() < 1e-10);
    }

    // The entangled regime ends where the closed form meets the local bound.
    let a3: f64 = 1.0;
    let boundary = (a3 * a3 + 1.0).sqrt() - 1.0;
    for (label, a1) in [("inside", boundary - 1e-3), ("outside", boundary + 1e-3)] {
        let params = FunctionalParams::new(a1, 0, a3)?;
        let sol = quantum_value_branch0(&params)?;
        println!("alpha1 = boundary {label}: {:?}", sol.regime);
    }
    Ok(())
}
