//! Sum-of-squares optimality certificate on the alpha2 = 0 branch.
//!
//! The closed-form quantum value nu is certified by an operator identity
//! nu - W = sum_i P_i^2 with three polynomials in the observables, valid for
//! EVERY realization, not just the optimal one. This example builds random
//! realizations in random dimensions and shows the identity holds to machine
//! precision; on the optimal realization, each P_i annihilates the state.

use i3322_family::functional::FunctionalParams;
use i3322_family::linalg::CVec;
use i3322_family::quantum::{
    optimal_realization_branch0, sos_polynomials, sos_residual, structural_checks, Realization,
};
use i3322_family::Result;
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// A haphazard (far from optimal) realization: random +-1-spectrum
// observables from random rotations, and a random state.
fn random_realization(rng: &mut ChaCha8Rng, d_a: usize, d_b: usize) -> Realization {
    let mut observable = |d: usize| {
        let g = nalgebra::DMatrix::from_fn(d, d, |_, _| {
            Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let q = g.qr().q();
        // Conjugate a random +-1 diagonal by a random unitary.
        let signs = nalgebra::DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        &q * signs * q.adjoint()
    };
    let a = [observable(d_a), observable(d_a), observable(d_a)];
    let b = [observable(d_b), observable(d_b), observable(d_b)];
    let mut state = CVec::from_fn(d_a * d_b, |_, _| {
        Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    state /= Complex::new(state.norm(), 0.0);
    Realization { d_a, d_b, a, b, state }
}

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("identity residual |nu - W - sum P_i^2| on random realizations:");
    for trial in 0..6 {
        let a1 = 0.9 * rng.gen::<f64>();
        let a3 = a1 + 0.1 + rng.gen::<f64>(); // keep alpha1 < alpha3
        let params = FunctionalParams::new(a1, 0, a3)?;
        let (d_a, d_b) = (2 + trial % 3, 2 + (trial + 1) % 3);
        let r = random_realization(&mut rng, d_a, d_b);
        let resid = sos_residual(&params, &r)?;
        println!(
            "  trial {trial}: alpha = ({a1:.3}, 0, {a3:.3}), dims {d_a}x{d_b}, residual {resid:.3e}"
        );
        assert!(resid < 1e-10);
    }

    // On the optimal realization the polynomials annihilate the state, which
    // is exactly why the bound is tight there.
    let params = FunctionalParams::new(0.25, 0, 1.0)?;
    let r = optimal_realization_branch0(&params, 0.4)?;
    println!("\n|P_i |psi>| on the optimal realization (mu = 0.4):");
    for (i, p) in sos_polynomials(&params, &r)?.iter().enumerate() {
        println!("  P_{i}: {:.3e}", (p * &r.state).norm());
    }

    // Structural relations of the optimal model (anticommutators, marginal
    // alignment, state optimality) in one report.
    let report = structural_checks(&params, &r)?;
    println!("\nstructural checks: max violation {:.3e}", report.max_violation());
    assert!(report.all_pass(1e-9));
    Ok(())
}
