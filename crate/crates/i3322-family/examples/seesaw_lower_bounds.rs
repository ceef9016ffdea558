//! Seesaw lower bounds: alternating eigenvector/observable updates.
//!
//! Fixing all observables but one makes the optimal remaining observable a
//! sign function of an effective operator, and fixing all observables makes
//! the optimal state the top eigenvector. Cycling these monotone steps from
//! random starts yields certified lower bounds (each iterate is a valid
//! realization). This example reproduces known two-qubit optima and compares
//! a run against a hierarchy upper bound to decide whether a dimension is
//! already optimal.

use i3322_family::functional::{evaluate, FunctionalParams};
use i3322_family::npa::{npa_value, NpaLevel};
use i3322_family::quantum::quantum_value_branch0;
use i3322_family::seesaw::{gap_report, seesaw, SeesawConfig};
use i3322_family::sweep::format_sig;
use i3322_family::Result;

fn main() -> Result<()> {
    let quick = SeesawConfig { trials: 40, iterations: 40, ..SeesawConfig::default() };

    // Two-qubit seesaw matches the closed form on the alpha2 = 0 branch.
    println!("two-qubit seesaw vs closed form (alpha2 = 0):");
    for (a1, a3) in [(0.0, 1.0), (0.25, 1.0), (0.6, 1.3)] {
        let params = FunctionalParams::new(a1, 0, a3)?;
        let exact = quantum_value_branch0(&params)?.value;
        let run = seesaw(&params, &quick)?;
        println!(
            "  ({a1}, 0, {a3}): seesaw {} vs exact {} (best trial {})",
            format_sig(run.value, 9),
            format_sig(exact, 9),
            run.best_trial
        );
        assert!((run.value - exact).abs() < 1e-7);
    }

    // I3322 at small local dimensions: the value stays pinned at the
    // two-qubit optimum 5 (the gains beyond 5 live in high dimension; the
    // banded ladder in `pv_ladder_quick` first beats 5 at n = 24).
    let params = FunctionalParams::i3322();
    println!("\nI3322 by local dimension:");
    for d in [2usize, 3, 4] {
        let cfg = SeesawConfig { d_a: d, d_b: d, ..quick };
        let run = seesaw(&params, &cfg)?;
        // The iterate is a genuine realization; re-evaluate it independently.
        let replay = evaluate(&params, &run.realization.behavior())?;
        println!(
            "  d = {d}: {}  (replayed from realization: {})",
            format_sig(run.value, 10),
            format_sig(replay, 10)
        );
        assert!((run.value - replay).abs() < 1e-10);
    }

    // Against the level-2 hierarchy bound the two-qubit I3322 node reports an
    // open gap, while a member whose optimum is two-qubit reports closure.
    println!("\ngap reports against hierarchy bounds:");
    for (a1, a2, a3) in [(1.0, 1, 1.0), (0.25, 0, 1.0)] {
        let params = FunctionalParams::new(a1, a2, a3)?;
        let upper = npa_value(&params, NpaLevel::Level2)?;
        let report = gap_report(&params, &quick, upper)?;
        println!(
            "  ({a1}, {a2}, {a3}): seesaw {} vs bound {} -> {:?}",
            format_sig(report.seesaw_value, 9),
            format_sig(report.upper_bound, 9),
            report.flag
        );
    }
    Ok(())
}
