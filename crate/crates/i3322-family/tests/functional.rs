//! Evaluation spot values, symmetry invariance, sign normalization, and the
//! table-to-behavior pipeline.

use i3322_family::bounds::DeterministicStrategy;
use i3322_family::functional::{
    behavior_from_table, evaluate, evaluate_flipped, projector_form_relabel, symmetry_generators,
    to_projector_form, Behavior, FunctionalParams, ProbabilityTable,
};
use i3322_family::quantum::model_behavior;
use proptest::prelude::*;

fn all_ones() -> Behavior {
    Behavior { marg_a: [1.0; 3], marg_b: [1.0; 3], corr: [[1.0; 3]; 3] }
}

#[test]
fn spot_values() {
    // All-ones deterministic point: marginal row 4*1, block 4, cross terms cancel.
    let p = FunctionalParams::new(1.0, 0, 1.0).unwrap();
    assert_eq!(evaluate(&p, &all_ones()).unwrap(), 8.0);

    let p = FunctionalParams::new(0.7, 0, 1.9).unwrap();
    assert_eq!(evaluate(&p, &Behavior::zero()).unwrap(), 0.0);

    // The closed-form optimal behavior of the entangled branch at (0, 0, 1):
    // theta = arcsin(1/2), phi = pi/2, any mu; value 4 + alpha3^2 = 5.
    let p = FunctionalParams::new(0.0, 0, 1.0).unwrap();
    let beh = model_behavior(0.5f64.asin(), std::f64::consts::FRAC_PI_2, 0.0);
    assert!((evaluate(&p, &beh).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn tables_to_behaviors() {
    let uniform = behavior_from_table(&ProbabilityTable::uniform()).unwrap();
    assert_eq!(uniform, Behavior::zero());

    let det = behavior_from_table(&ProbabilityTable::deterministic([1; 3], [1; 3])).unwrap();
    assert_eq!(det, all_ones());

    // A box with perfectly correlated/anticorrelated outcomes per setting
    // pair: zero marginals, +-1 correlators.
    let target = [[1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]];
    let mut t = ProbabilityTable::uniform();
    for x in 0..3 {
        for y in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    let prod = if a == b { 1.0 } else { -1.0 };
                    t.p[x][y][a][b] = if prod == target[x][y] { 0.5 } else { 0.0 };
                }
            }
        }
    }
    assert!(t.is_no_signalling());
    let beh = behavior_from_table(&t).unwrap();
    assert_eq!(beh.marg_a, [0.0; 3]);
    assert_eq!(beh.marg_b, [0.0; 3]);
    assert_eq!(beh.corr, target);

    // Unnormalized tables are rejected.
    let mut bad = ProbabilityTable::uniform();
    bad.p[0][0][0][0] = 0.3;
    assert!(behavior_from_table(&bad).is_err());
}

#[test]
fn deterministic_strategies_match_product_formula() {
    for s in DeterministicStrategy::all() {
        let via_table = behavior_from_table(&s.table()).unwrap();
        let direct = s.behavior();
        assert_eq!(via_table, direct);
        for x in 0..3 {
            assert_eq!(direct.marg_a[x], s.a[x] as f64);
            assert_eq!(direct.marg_b[x], s.b[x] as f64);
            for y in 0..3 {
                assert_eq!(direct.corr[x][y], (s.a[x] * s.b[y]) as f64);
            }
        }
    }
}

#[test]
fn normalize_absorbs_signs() {
    let b = DeterministicStrategy { a: [1, -1, 1], b: [-1, 1, 1] }.behavior();
    for (a1, a3) in [(-0.8, 1.2), (0.8, -1.2), (-0.8, -1.2)] {
        for a2 in [0u8, 1] {
            let (norm, flip) = FunctionalParams::normalize(a1, a2, a3).unwrap();
            let signed = FunctionalParams { alpha1: a1, alpha2: a2, alpha3: a3 };
            let lhs = i3322_family::functional::evaluate_unchecked(&signed, &b);
            let rhs = evaluate(&norm, &flip.apply(&b)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "({a1}, {a2}, {a3}): {lhs} vs {rhs}");
        }
    }
}

#[test]
fn projector_form_of_i3322() {
    let p = FunctionalParams::i3322();
    let form = to_projector_form(&p).unwrap();

    // All-minus outcomes: every projector expectation is zero, leaving the
    // constant term.
    let all_minus = ProbabilityTable::deterministic([-1; 3], [-1; 3]);
    assert_eq!(form.evaluate_table(&all_minus).unwrap(), 4.0);

    // Affine relation to the flipped correlator form on assorted tables.
    let tables = [
        ProbabilityTable::uniform(),
        ProbabilityTable::deterministic([1; 3], [1; 3]),
        ProbabilityTable::deterministic([1, -1, 1], [-1, -1, 1]),
        ProbabilityTable::deterministic([-1, 1, -1], [1, -1, -1]),
    ];
    for t in &tables {
        let b = behavior_from_table(t).unwrap();
        let lhs = 4.0 * form.evaluate_table(t).unwrap() - 12.0;
        let rhs = evaluate_flipped(&p, &projector_form_relabel(&b)).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    // Defined for the I3322 member only.
    assert!(to_projector_form(&FunctionalParams::new(0.5, 1, 1.0).unwrap()).is_err());
}

#[test]
fn behavior_json_schema() {
    let b = all_ones();
    let json = serde_json::to_string(&b).unwrap();
    assert!(json.contains("\"margA\""), "{json}");
    assert!(json.contains("\"margB\""), "{json}");
    assert!(json.contains("\"corr\""), "{json}");
    let back: Behavior = serde_json::from_str(&json).unwrap();
    assert_eq!(back, b);
}

fn arb_behavior() -> impl Strategy<Value = Behavior> {
    let entry = -1.0f64..1.0f64;
    (
        [entry.clone(), entry.clone(), entry.clone()],
        [entry.clone(), entry.clone(), entry.clone()],
        proptest::array::uniform3(proptest::array::uniform3(entry)),
    )
        .prop_map(|(marg_a, marg_b, corr)| Behavior { marg_a, marg_b, corr })
}

fn arb_params() -> impl Strategy<Value = FunctionalParams> {
    (0.0f64..4.0, 0u8..2, 0.0f64..2.0)
        .prop_map(|(a1, a2, a3)| FunctionalParams::new(a1, a2, a3).unwrap())
}

proptest! {
    // Every symmetry generator preserves the value of every member.
    #[test]
    fn symmetry_generators_preserve_value(b in arb_behavior(), p in arb_params()) {
        let reference = evaluate(&p, &b).unwrap();
        for g in symmetry_generators(p.alpha2) {
            let moved = evaluate(&p, &g.apply(&b)).unwrap();
            prop_assert!((moved - reference).abs() < 1e-12);
        }
    }

    // Relabelings are involutions on behaviors.
    #[test]
    fn generators_are_involutions(b in arb_behavior(), a2 in 0u8..2) {
        for g in symmetry_generators(a2) {
            let twice = g.apply(&g.apply(&b));
            prop_assert_eq!(twice, b);
        }
    }

    // The flipped form is the plain form after the B-side relabeling.
    #[test]
    fn flipped_matches_relabeled(b in arb_behavior(), a1 in 0.0f64..4.0, a3 in 0.0f64..2.0) {
        let p = FunctionalParams::new(a1, 1, a3).unwrap();
        let lhs = evaluate_flipped(&p, &b).unwrap();
        let rhs = evaluate(&p, &b.flip_b_relabel()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}
