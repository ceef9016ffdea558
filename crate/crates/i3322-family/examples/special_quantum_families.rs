//! Two special realization families on the alpha2 = 1 branch.
//!
//! Away from the hard interior of the plane, two restricted families give
//! sharp or near-sharp lower bounds with closed structure: (1) making one
//! measurement per side trivial (identity) reduces the problem to a
//! one-angle maximization; (2) inside the triangle alpha1 + alpha3 <= 2 a
//! maximally entangled pair of qubits attains exactly 4 + alpha3^2 using only
//! the four correlation-block settings. Both produce genuine realizations,
//! re-checked here by direct evaluation and against seesaw.

use i3322_family::functional::{evaluate, FunctionalParams};
use i3322_family::quantum::{triangular_region_realization, trivial_measurement_value};
use i3322_family::seesaw::{seesaw, SeesawConfig};
use i3322_family::sweep::format_sig;
use i3322_family::Result;

fn main() -> Result<()> {
    // Trivial-measurement family across marginal weights.
    println!("trivial-measurement value (one identity observable per side):");
    for a1 in [0.5, 1.0, 2.0, 3.5] {
        let params = FunctionalParams::new(a1, 1, 1.0)?;
        let sol = trivial_measurement_value(&params)?;
        let replay = evaluate(&params, &sol.realization.behavior())?;
        println!(
            "  alpha1 = {a1}: value {} at phi = {} (replayed {}, stationarity {:.1e})",
            format_sig(sol.value, 9),
            format_sig(sol.phi, 6),
            format_sig(replay, 9),
            sol.derivative_residual
        );
        assert!((sol.value - replay).abs() < 1e-9);
    }

    // Triangle region: the value 4 + alpha3^2 needs entanglement but not the
    // third measurements' marginals; seesaw confirms it is the two-qubit
    // optimum at these weights.
    println!("\ntriangle alpha1 + alpha3 <= 2: value 4 + alpha3^2");
    for (a1, a3) in [(0.5, 1.0), (1.0, 0.5), (0.2, 1.6)] {
        let params = FunctionalParams::new(a1, 1, a3)?;
        let r = triangular_region_realization(&params)?;
        let value = evaluate(&params, &r.behavior())?;
        let cfg = SeesawConfig { trials: 40, iterations: 40, ..SeesawConfig::default() };
        let ss = seesaw(&params, &cfg)?.value;
        println!(
            "  ({a1}, 1, {a3}): realization {} vs 4 + alpha3^2 = {} vs seesaw {}",
            format_sig(value, 9),
            format_sig(4.0 + a3 * a3, 9),
            format_sig(ss, 9)
        );
        assert!((value - (4.0 + a3 * a3)).abs() < 1e-10);
        assert!(ss >= value - 1e-7);
    }
    Ok(())
}
