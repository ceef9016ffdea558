//! Evaluating family members on behaviors.
//!
//! A family member is fixed by (alpha1, alpha2, alpha3); its value on a
//! no-signalling behavior combines six marginal and nine correlator terms.
//! This example evaluates a few members on hand-built behaviors, checks the
//! sign-flip symmetries that leave every member invariant, and confirms the
//! full-probability (projector) form agrees with the correlator form.

use i3322_family::bounds::DeterministicStrategy;
use i3322_family::functional::{
    behavior_from_table, evaluate, evaluate_flipped, projector_form_relabel, symmetry_generators,
    to_projector_form, FunctionalParams, ProbabilityTable,
};
use i3322_family::Result;

fn main() -> Result<()> {
    let i3322 = FunctionalParams::i3322();

    // The uniformly random behavior scores zero on every member.
    let uniform = behavior_from_table(&ProbabilityTable::uniform())?;
    println!("I3322 on uniform noise: {}", evaluate(&i3322, &uniform)?);

    // Deterministic strategies: all outputs +1, and the local optimum.
    let all_plus = behavior_from_table(&ProbabilityTable::deterministic([1; 3], [1; 3]))?;
    println!("I3322 on all-plus outputs: {}", evaluate(&i3322, &all_plus)?);

    let mixed = DeterministicStrategy { a: [1, 1, -1], b: [1, -1, 1] };
    println!(
        "I3322 on strategy a = {:?}, b = {:?}: {}",
        mixed.a,
        mixed.b,
        evaluate(&i3322, &mixed.behavior())?
    );

    // Each member is invariant under three generators: a joint party
    // relabeling, and two output flips of the third measurements.
    let member = FunctionalParams::new(0.6, 1, 1.4)?;
    let behavior = DeterministicStrategy { a: [1, -1, 1], b: [-1, 1, 1] }.behavior();
    let reference = evaluate(&member, &behavior)?;
    for (k, flip) in symmetry_generators(member.alpha2).iter().enumerate() {
        let moved = flip.apply(&behavior);
        let v = evaluate(&member, &moved)?;
        println!("generator {k}: value {v} (reference {reference})");
        assert!((v - reference).abs() < 1e-12);
    }

    // The 0/1-outcome projector form of the I3322 member relates to the
    // correlator form by a relabeling and an affine shift:
    // 4 * form(t) - 12 = flipped value on the relabeled behavior.
    let proj = to_projector_form(&i3322)?;
    let table = ProbabilityTable::deterministic([1, -1, -1], [1, 1, -1]);
    let b = behavior_from_table(&table)?;
    let via_proj = 4.0 * proj.evaluate_table(&table)? - 12.0;
    let via_corr = evaluate_flipped(&i3322, &projector_form_relabel(&b))?;
    println!("projector form check: {via_proj} vs {via_corr}");
    assert!((via_proj - via_corr).abs() < 1e-12);

    Ok(())
}
