//! Exact quantum values: the closed-form branch, its attaining family and
//! certificates, the trivial-measurement family, and the maximally entangled
//! triangular region.

use i3322_family::functional::{evaluate, FunctionalParams};
use i3322_family::linalg::{expectation, random_observable, random_state};
use i3322_family::quantum::{
    bell_operator, model_behavior, optimal_realization_branch0, probability_point,
    quantum_value_branch0, sos_polynomials, sos_residual, structural_checks,
    triangular_region_realization, triangular_region_value, trivial_measurement_value,
    trivial_objective_value, two_qubit_model, BranchZeroRegime, Realization,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MU_SAMPLES: [f64; 8] = [0.0, 0.2, 0.5, 0.9, 1.3, 1.7, 2.4, 3.1];

#[test]
fn closed_branch_spot_values() {
    // gamma^2 = 1/2, nu = 2 (1/2 + 2) = 5.
    let sol = quantum_value_branch0(&FunctionalParams::new(0.0, 0, 1.0).unwrap()).unwrap();
    assert_eq!(sol.regime, BranchZeroRegime::Entangled);
    assert!((sol.value - 5.0).abs() < 1e-12);

    // gamma^2 = 2, nu = 2 (2 + 2) = 8.
    let sol = quantum_value_branch0(&FunctionalParams::new(0.0, 0, 2.0).unwrap()).unwrap();
    assert_eq!(sol.regime, BranchZeroRegime::Entangled);
    assert!((sol.value - 8.0).abs() < 1e-12);

    // gamma^2 = 15/32, nu = 2 (15/32 + 32/15).
    let sol = quantum_value_branch0(&FunctionalParams::new(0.25, 0, 1.0).unwrap()).unwrap();
    let gamma2 = (1.0 - 0.0625) / 2.0;
    let nu = 2.0 * (gamma2 + 1.0 / gamma2);
    assert!((sol.value - nu).abs() < 1e-12);
    assert!((sol.value - 5.204166666).abs() < 1e-8);

    // Marginal-dominated: quantum equals local 4 (alpha1 + 1).
    let sol = quantum_value_branch0(&FunctionalParams::new(1.0, 0, 0.5).unwrap()).unwrap();
    assert_eq!(sol.regime, BranchZeroRegime::MarginalAligned);
    assert_eq!(sol.value, 8.0);

    // Cross-dominated (alpha3 > 2, alpha1 below the curve): quantum equals
    // local 4 alpha3.
    let sol = quantum_value_branch0(&FunctionalParams::new(0.0, 0, 3.0).unwrap()).unwrap();
    assert_eq!(sol.regime, BranchZeroRegime::CrossAligned);
    assert_eq!(sol.value, 12.0);

    assert!(quantum_value_branch0(&FunctionalParams::i3322()).is_err());
}

#[test]
fn entangled_regime_boundary() {
    // The entangled family exists exactly up to alpha1 = sqrt(alpha3^2+1) - 1.
    let cusp = 2.0f64.sqrt() - 1.0;
    let inside = quantum_value_branch0(&FunctionalParams::new(cusp - 1e-3, 0, 1.0).unwrap()).unwrap();
    assert_eq!(inside.regime, BranchZeroRegime::Entangled);
    assert!(inside.f_value <= 0.0);
    let outside = quantum_value_branch0(&FunctionalParams::new(cusp + 1e-3, 0, 1.0).unwrap()).unwrap();
    assert_eq!(outside.regime, BranchZeroRegime::MarginalAligned);
    assert!(outside.f_value > 0.0);
    // The two branch values meet continuously at the cusp.
    assert!((inside.value - outside.value).abs() < 1e-2);
}

#[test]
fn optimal_family_attains_value_at_every_mu() {
    for (a1, a3) in [(0.0, 1.0), (0.25, 1.0), (0.3, 1.5), (0.0, 2.0), (0.41, 1.0)] {
        let p = FunctionalParams::new(a1, 0, a3).unwrap();
        let sol = quantum_value_branch0(&p).unwrap();
        assert_eq!(sol.regime, BranchZeroRegime::Entangled, "({a1}, 0, {a3})");
        for mu in MU_SAMPLES {
            let r = optimal_realization_branch0(&p, mu).unwrap();
            // Via the closed-form behavior and via the dense operator.
            let v_beh = evaluate(&p, &r.behavior()).unwrap();
            let v_op = expectation(&bell_operator(&p, &r).unwrap(), &r.state);
            assert!((v_beh - sol.value).abs() < 1e-10, "mu = {mu}: {v_beh}");
            assert!((v_op - sol.value).abs() < 1e-10, "mu = {mu}: {v_op}");
            // The dense realization reproduces the closed-form behavior.
            let closed = probability_point(&p, mu).unwrap();
            let dense = r.behavior();
            for x in 0..3 {
                assert!((closed.marg_a[x] - dense.marg_a[x]).abs() < 1e-10);
                assert!((closed.marg_b[x] - dense.marg_b[x]).abs() < 1e-10);
                for y in 0..3 {
                    assert!((closed.corr[x][y] - dense.corr[x][y]).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn optimal_family_rejected_outside_entangled_regime() {
    assert!(optimal_realization_branch0(&FunctionalParams::new(1.0, 0, 0.5).unwrap(), 0.0).is_err());
    assert!(optimal_realization_branch0(&FunctionalParams::new(0.0, 0, 3.0).unwrap(), 0.0).is_err());
}

fn random_realization(rng: &mut ChaCha8Rng, d_a: usize, d_b: usize) -> Realization {
    Realization {
        d_a,
        d_b,
        a: [
            random_observable(rng, d_a),
            random_observable(rng, d_a),
            random_observable(rng, d_a),
        ],
        b: [
            random_observable(rng, d_b),
            random_observable(rng, d_b),
            random_observable(rng, d_b),
        ],
        state: random_state(rng, d_a * d_b),
    }
}

#[test]
fn sos_identity_holds_for_arbitrary_projective_realizations() {
    // The decomposition nu I - W = sum P_i^2 is an operator identity on
    // projective realizations — not just at optimizers — for both functional
    // branches (the third polynomial flips its relative sign).
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for a2 in [0u8, 1] {
        for (d_a, d_b) in [(2, 2), (2, 3), (3, 3), (4, 2), (3, 4)] {
            let p = FunctionalParams::new(0.4, a2, 1.3).unwrap();
            let r = random_realization(&mut rng, d_a, d_b);
            let resid = sos_residual(&p, &r).unwrap();
            assert!(resid < 1e-10, "alpha2 = {a2}, dims ({d_a}, {d_b}): residual {resid}");
        }
    }
}

#[test]
fn sos_certificate_requires_positive_gamma2() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let r = random_realization(&mut rng, 2, 2);
    // alpha1 >= alpha3 has gamma^2 <= 0: no certificate.
    assert!(sos_polynomials(&FunctionalParams::new(1.5, 0, 1.0).unwrap(), &r).is_err());
    // Non-projective observables are rejected.
    let mut soft = random_realization(&mut rng, 2, 2);
    soft.a[0] *= nalgebra::Complex::new(0.5, 0.0);
    assert!(sos_polynomials(&FunctionalParams::new(0.0, 0, 1.0).unwrap(), &soft).is_err());
}

#[test]
fn optimal_family_lies_in_certificate_kernel() {
    for (a1, a3) in [(0.0, 1.0), (0.25, 1.0), (0.3, 1.5)] {
        let p = FunctionalParams::new(a1, 0, a3).unwrap();
        for mu in [0.0, 0.4, 1.1] {
            let r = optimal_realization_branch0(&p, mu).unwrap();
            let ps = sos_polynomials(&p, &r).unwrap();
            for (i, poly) in ps.iter().enumerate() {
                let norm = (poly * &r.state).norm();
                assert!(norm < 1e-8, "P{} norm {norm} at mu = {mu}", i + 1);
            }
            let report = structural_checks(&p, &r).unwrap();
            assert!(report.all_pass(1e-8), "worst violation {}", report.max_violation());
        }
    }
}

#[test]
fn structural_checks_flag_suboptimal_realizations() {
    let p = FunctionalParams::new(0.0, 0, 1.0).unwrap();
    // Wrong angles: projective, but not an optimizer.
    let r = two_qubit_model(0.3, 0.9, 0.0);
    let report = structural_checks(&p, &r).unwrap();
    assert!(!report.all_pass(1e-6));
}

#[test]
fn trivial_measurement_family() {
    for (a1, a3) in [(0.5, 1.0), (1.0, 1.0), (1.75, 0.75), (2.5, 1.0), (3.0, 1.0)] {
        let p = FunctionalParams::new(a1, 1, a3).unwrap();
        let sol = trivial_measurement_value(&p).unwrap();
        // The maximizer dominates a dense scan of the objective.
        for i in 0..=400 {
            let phi = std::f64::consts::PI * i as f64 / 400.0;
            let v = trivial_objective_value(&p, phi).unwrap();
            assert!(v <= sol.value + 1e-9, "scan beat the optimum at phi = {phi}");
        }
        // The reported realization attains the value under the plain form.
        let attained = evaluate(&p, &sol.realization.behavior()).unwrap();
        assert!((attained - sol.value).abs() < 1e-9, "({a1}, 1, {a3}): {attained} vs {}", sol.value);
        assert!(sol.derivative_residual < 1e-7);
    }

    // phi = pi collapses the family to the product strategy 2 (alpha1 + alpha3).
    for (a1, a3) in [(2.0, 0.5), (2.5, 1.0), (3.0, 1.0), (3.5, 1.5)] {
        let p = FunctionalParams::new(a1, 1, a3).unwrap();
        let at_pi = trivial_objective_value(&p, std::f64::consts::PI).unwrap();
        assert!((at_pi - 2.0 * (a1 + a3)).abs() < 1e-12);
    }

    assert!(trivial_objective_value(&FunctionalParams::new(0.5, 0, 1.0).unwrap(), 0.1).is_err());
    assert!(trivial_measurement_value(&FunctionalParams::new(0.5, 0, 1.0).unwrap()).is_err());
}

#[test]
fn trivial_known_values() {
    // 2 + 2 sqrt(2) at (1, 1, 1): the objective reduces to a shifted CHSH-like
    // expression there.
    let sol = trivial_measurement_value(&FunctionalParams::i3322()).unwrap();
    assert!((sol.value - (2.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-10);

    // 121/24 at (1.75, 1, 0.75): strictly above the local value 5.
    let sol =
        trivial_measurement_value(&FunctionalParams::new(1.75, 1, 0.75).unwrap()).unwrap();
    assert!((sol.value - 121.0 / 24.0).abs() < 1e-9);

    // Past the quantum-advantage band the optimum sits at the product
    // endpoint phi = pi with value 2 (alpha1 + alpha3).
    let sol = trivial_measurement_value(&FunctionalParams::new(2.5, 1, 1.0).unwrap()).unwrap();
    assert!((sol.value - 7.0).abs() < 1e-10);
    assert!((sol.phi - std::f64::consts::PI).abs() < 1e-6);

    // At (3, 1, 1) both endpoints tie at 8 = 4 (alpha1 - 1) = 2 (alpha1 + alpha3).
    let sol = trivial_measurement_value(&FunctionalParams::new(3.0, 1, 1.0).unwrap()).unwrap();
    assert!((sol.value - 8.0).abs() < 1e-10);
}

#[test]
fn triangular_region_attains_four_plus_alpha3_squared() {
    for (a1, a3) in [(0.5, 1.0), (1.0, 0.5), (0.2, 1.6), (0.0, 2.0), (1.0, 1.0)] {
        let p = FunctionalParams::new(a1, 1, a3).unwrap();
        let v = triangular_region_value(&p).unwrap();
        assert!((v - (4.0 + a3 * a3)).abs() < 1e-10, "({a1}, 1, {a3}): {v}");
        let r = triangular_region_realization(&p).unwrap();
        // All marginals vanish on the maximally entangled state.
        let beh = r.behavior();
        for x in 0..3 {
            assert!(beh.marg_a[x].abs() < 1e-12);
            assert!(beh.marg_b[x].abs() < 1e-12);
        }
    }
    // Outside the triangle or on the wrong branch the family is undefined.
    assert!(triangular_region_realization(&FunctionalParams::new(1.5, 1, 1.0).unwrap()).is_err());
    assert!(triangular_region_realization(&FunctionalParams::new(0.5, 0, 1.0).unwrap()).is_err());
}

#[test]
fn model_behavior_matches_dense_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    use rand::Rng;
    for _ in 0..20 {
        let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let phi = rng.gen_range(0.0..std::f64::consts::PI);
        let mu = rng.gen_range(0.0..std::f64::consts::PI);
        let closed = model_behavior(theta, phi, mu);
        let dense = two_qubit_model(theta, phi, mu).behavior();
        for x in 0..3 {
            assert!((closed.marg_a[x] - dense.marg_a[x]).abs() < 1e-12);
            assert!((closed.marg_b[x] - dense.marg_b[x]).abs() < 1e-12);
            for y in 0..3 {
                assert!((closed.corr[x][y] - dense.corr[x][y]).abs() < 1e-12);
            }
        }
    }
}
