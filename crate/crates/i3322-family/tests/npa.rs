//! Moment-hierarchy upper bounds: matrix sizes, anchor values, monotonicity
//! across levels, and the sandwich against exact values and lower bounds.

use i3322_family::bounds::local_value_closed;
use i3322_family::functional::FunctionalParams;
use i3322_family::npa::{
    advantage_rows, build_custom_moment_problem, build_moment_problem, npa_solution, npa_value,
    solve_moment_problem, AdvantageGrid, MomentObjective, NpaLevel,
};
use i3322_family::quantum::{
    quantum_value_branch0, triangular_region_value, trivial_measurement_value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn moment_matrix_sizes() {
    let p = FunctionalParams::i3322();
    for (level, size) in [
        (NpaLevel::Level1, 7),
        (NpaLevel::Level1Ab, 16),
        (NpaLevel::Level2, 28),
        (NpaLevel::Level3, 88),
    ] {
        let problem = build_moment_problem(&p, level).unwrap();
        assert_eq!(problem.words.len(), size, "{}", level.label());
        assert_eq!(problem.sdp.m, size);
        problem.sdp.validate().unwrap();
        assert_eq!(problem.sdp.blocks.len(), problem.sdp.objective.len());
    }
}

#[test]
fn level_parsing() {
    assert_eq!(NpaLevel::parse("1").unwrap(), NpaLevel::Level1);
    assert_eq!(NpaLevel::parse("1ab").unwrap(), NpaLevel::Level1Ab);
    assert_eq!(NpaLevel::parse("1+ab").unwrap(), NpaLevel::Level1Ab);
    assert_eq!(NpaLevel::parse("2").unwrap(), NpaLevel::Level2);
    assert_eq!(NpaLevel::parse("3").unwrap(), NpaLevel::Level3);
    assert!(NpaLevel::parse("4").is_err());
    for level in NpaLevel::all() {
        assert_eq!(NpaLevel::parse(level.label()).unwrap(), level);
    }
}

#[test]
fn chsh_at_level_one() {
    let problem = build_custom_moment_problem(&MomentObjective::chsh(), NpaLevel::Level1).unwrap();
    let sol = solve_moment_problem(&problem).unwrap();
    assert!(
        (sol.value - 2.0 * 2.0f64.sqrt()).abs() < 1e-7,
        "CHSH level-1 bound: {}",
        sol.value
    );
}

#[test]
fn known_upper_bounds() {
    // The closed-branch node (0, 0, 1): level 2 already matches the exact
    // quantum value 5.
    let p = FunctionalParams::new(0.0, 0, 1.0).unwrap();
    let v = npa_value(&p, NpaLevel::Level2).unwrap();
    assert!((v - 5.0).abs() < 1e-6, "level-2 bound at (0, 0, 1): {v}");

    // The I3322 hierarchy: strictly tightening toward ~5.00350.
    let p = FunctionalParams::i3322();
    let v1 = npa_value(&p, NpaLevel::Level1).unwrap();
    let v1ab = npa_value(&p, NpaLevel::Level1Ab).unwrap();
    let v2 = npa_value(&p, NpaLevel::Level2).unwrap();
    assert!((v1 - 5.5).abs() < 1e-6, "level 1: {v1}");
    assert!((v1ab - 5.005883586).abs() < 1e-6, "level 1+AB: {v1ab}");
    assert!((v2 - 5.003758883).abs() < 1e-6, "level 2: {v2}");
    assert!(v1 > v1ab + 1e-3);
    assert!(v1ab > v2 + 1e-6);
}

#[test]
fn i3322_level_three_anchor() {
    let sol = npa_solution(&FunctionalParams::i3322(), NpaLevel::Level3).unwrap();
    assert!(
        (sol.value - 5.00350175).abs() < 1e-6,
        "level-3 bound drifted: {:.10}",
        sol.value
    );
    assert_eq!(sol.matrix_size, 88);
    // The primal certificate brackets the dual value from above.
    assert!(sol.certified_value >= sol.value - 1e-7);
    assert!(sol.certified_value - sol.value < 1e-4);
}

#[test]
fn hierarchy_is_monotone_and_sandwiched() {
    // Random nodes: levels tighten monotonically and every lower bound
    // (closed-form local, exact closed branch, triangle family, trivial
    // family) stays below every level.
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for trial in 0..50 {
        let a1 = rng.gen_range(0.0..4.0);
        let a2 = if rng.gen_bool(0.5) { 0u8 } else { 1 };
        let a3 = rng.gen_range(0.0..2.0);
        let p = FunctionalParams::new(a1, a2, a3).unwrap();

        let v1 = npa_value(&p, NpaLevel::Level1).unwrap();
        let v1ab = npa_value(&p, NpaLevel::Level1Ab).unwrap();
        let v2 = npa_value(&p, NpaLevel::Level2).unwrap();
        assert!(v1ab <= v1 + 1e-8, "trial {trial} ({a1}, {a2}, {a3}): {v1ab} vs {v1}");
        assert!(v2 <= v1ab + 1e-8, "trial {trial} ({a1}, {a2}, {a3}): {v2} vs {v1ab}");

        let mut lower = local_value_closed(&p).0;
        if a2 == 0 {
            lower = lower.max(quantum_value_branch0(&p).unwrap().value);
        } else {
            lower = lower.max(trivial_measurement_value(&p).unwrap().value);
            if a1 + a3 <= 2.0 {
                lower = lower.max(triangular_region_value(&p).unwrap());
            }
        }
        assert!(
            lower <= v2 + 1e-7,
            "trial {trial} ({a1}, {a2}, {a3}): lower {lower} above level-2 {v2}"
        );
    }
}

#[test]
fn advantage_scan_flags() {
    // Coarse scan over alpha1 x alpha3 in {0..4} x {0, 1}.
    let grid = AdvantageGrid { alpha1_max: 4.0, alpha3_max: 1.0, step: 1.0 };
    let rows = advantage_rows(NpaLevel::Level1Ab, &grid).unwrap();
    assert_eq!(rows.len(), 10);
    let flag = |a1: f64, a3: f64| -> bool {
        rows.iter()
            .find(|r| (r.alpha1 - a1).abs() < 1e-12 && (r.alpha3 - a3).abs() < 1e-12)
            .unwrap()
            .advantage
    };
    // The alpha3 = 0 column never beats local.
    for a1 in [0.0, 1.0, 2.0, 3.0, 4.0] {
        assert!(!flag(a1, 0.0), "({a1}, 0) flagged");
    }
    // Triangle interior and the I3322 point do.
    assert!(flag(0.0, 1.0));
    assert!(flag(1.0, 1.0));
    // Marginals leading by two or more: no-signalling already equals local.
    assert!(!flag(3.0, 1.0));
    assert!(!flag(4.0, 1.0));
    for r in &rows {
        assert!(r.error.is_none());
        assert!(r.beta_npa.is_finite());
    }
}

#[test]
fn rejects_bad_grids() {
    assert!(advantage_rows(NpaLevel::Level1, &AdvantageGrid { step: 0.0, ..AdvantageGrid::default() }).is_err());
    assert!(advantage_rows(NpaLevel::Level1, &AdvantageGrid { step: f64::NAN, ..AdvantageGrid::default() }).is_err());
}
