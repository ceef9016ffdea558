//! Variational lower bounds: exact-value agreement, per-update monotonicity,
//! block optimality at convergence, reproducibility, and the geometry of the
//! recovered optimizers.

use i3322_family::functional::{symmetry_generators, Behavior, FunctionalParams};
use i3322_family::linalg::{expectation, random_hermitian, sign_involution};
use i3322_family::npa::{npa_value, NpaLevel};
use i3322_family::quantum::{bell_operator, model_behavior, quantum_value_branch0};
use i3322_family::seesaw::{gap_report, seesaw, trial_trace, GapFlag, SeesawConfig, SIGN_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick(trials: usize, iterations: usize) -> SeesawConfig {
    SeesawConfig { trials, iterations, ..SeesawConfig::default() }
}

#[test]
fn matches_exact_values_on_the_closed_branch() {
    for (a1, a3) in [(0.0, 1.0), (0.25, 1.0), (0.3, 1.5)] {
        let p = FunctionalParams::new(a1, 0, a3).unwrap();
        let exact = quantum_value_branch0(&p).unwrap().value;
        let run = seesaw(&p, &quick(40, 40)).unwrap();
        assert!(
            (run.value - exact).abs() < 1e-7,
            "({a1}, 0, {a3}): seesaw {} vs exact {exact}",
            run.value
        );
        // A lower bound never exceeds the exact value (up to rounding).
        assert!(run.value <= exact + 1e-9);
    }
}

#[test]
fn trace_is_monotone_per_update() {
    // Every block update (state, A1..A3, B1..B3) maximizes the value over its
    // own block, so the replayed trace never decreases beyond rounding
    // (measured floor ~1.5e-12 across these nodes and dimensions).
    for (a1, a2, a3) in [(1.0, 1u8, 1.0), (0.0, 0, 1.0), (2.0, 1, 0.5)] {
        let p = FunctionalParams::new(a1, a2, a3).unwrap();
        for (d_a, d_b) in [(2usize, 2usize), (2, 3), (3, 3)] {
            let cfg = SeesawConfig { d_a, d_b, trials: 1, iterations: 20, seed: 1, tol: 1e-10 };
            for trial in 0..5 {
                let trace = trial_trace(&p, &cfg, trial).unwrap();
                assert_eq!(trace.len(), 7 * cfg.iterations);
                for (i, w) in trace.windows(2).enumerate() {
                    assert!(
                        w[1] - w[0] >= -1e-11,
                        "({a1}, {a2}, {a3}) d = ({d_a}, {d_b}) trial {trial}: \
                         update {} dropped {} -> {}",
                        i + 1,
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }
}

#[test]
fn converged_point_is_blockwise_optimal() {
    // At a converged realization, perturbing any observable and re-projecting
    // onto involutions cannot raise the value: each block sits at the exact
    // maximizer of the value as a linear function of that block.
    let p = FunctionalParams::i3322();
    let run = seesaw(&p, &quick(30, 60)).unwrap();
    assert!(run.converged);
    let r = run.realization;
    let v0 = expectation(&bell_operator(&p, &r).unwrap(), &r.state);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for slot in 0..6 {
        for _ in 0..10 {
            let mut cand = r.clone();
            let (d, obs) = if slot < 3 {
                (r.d_a, &mut cand.a[slot])
            } else {
                (r.d_b, &mut cand.b[slot - 3])
            };
            let h = random_hermitian(&mut rng, d);
            *obs = sign_involution(&(&*obs + h * nalgebra::Complex::new(1e-4, 0.0)), SIGN_TOL);
            let v = expectation(&bell_operator(&p, &cand).unwrap(), &cand.state);
            assert!(v <= v0 + 1e-8, "slot {slot}: probe raised {v0} -> {v}");
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let p = FunctionalParams::new(0.25, 0, 1.0).unwrap();
    let cfg = quick(20, 30);
    let a = seesaw(&p, &cfg).unwrap();
    let b = seesaw(&p, &cfg).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.best_trial, b.best_trial);
    assert_eq!(a.realization.state.len(), b.realization.state.len());
    for (x, y) in a.realization.state.iter().zip(b.realization.state.iter()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    let ta = trial_trace(&p, &cfg, 3).unwrap();
    let tb = trial_trace(&p, &cfg, 3).unwrap();
    assert_eq!(ta.len(), tb.len());
    for (x, y) in ta.iter().zip(&tb) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    // The reported value dominates the best trial's full trace.
    let best = trial_trace(&p, &cfg, a.best_trial).unwrap();
    let peak = best.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(a.value >= peak - 1e-12);
}

#[test]
fn value_is_monotone_in_budget() {
    let p = FunctionalParams::i3322();
    let small = seesaw(&p, &quick(8, 25)).unwrap();
    let more_trials = seesaw(&p, &quick(30, 25)).unwrap();
    // Trials 0..8 are a subset of 0..30 with identical streams.
    assert!(more_trials.value >= small.value - 1e-12);
    let more_iters = seesaw(&p, &quick(8, 50)).unwrap();
    // Each trial's value is its running maximum over iterations.
    assert!(more_iters.value >= small.value - 1e-12);
}

#[test]
fn rejects_empty_configs() {
    let p = FunctionalParams::i3322();
    assert!(seesaw(&p, &SeesawConfig { trials: 0, ..SeesawConfig::default() }).is_err());
    assert!(seesaw(&p, &SeesawConfig { d_a: 0, ..SeesawConfig::default() }).is_err());
    assert!(seesaw(&p, &SeesawConfig { iterations: 0, ..SeesawConfig::default() }).is_err());
}

fn entries(b: &Behavior) -> Vec<f64> {
    let mut v = Vec::with_capacity(15);
    v.extend_from_slice(&b.marg_a);
    v.extend_from_slice(&b.marg_b);
    for row in &b.corr {
        v.extend_from_slice(row);
    }
    v
}

#[test]
fn recovered_optimizer_lies_on_the_optimal_line() {
    // At (0, 0, 1) the optimal behaviors form a segment parameterized by
    // cos(mu). The see-saw lands on it only after quotienting by the
    // functional's symmetry group: minimize over the 8 images and the
    // affine parameter (closed-form least squares on cos(mu)).
    let p = FunctionalParams::new(0.0, 0, 1.0).unwrap();
    let sol = quantum_value_branch0(&p).unwrap();
    let run = seesaw(&p, &SeesawConfig::default()).unwrap();
    assert!((run.value - sol.value).abs() < 1e-9);
    let b = run.realization.behavior();

    let u = entries(&model_behavior(sol.theta, sol.phi, std::f64::consts::FRAC_PI_2));
    let m0 = entries(&model_behavior(sol.theta, sol.phi, 0.0));
    let v: Vec<f64> = m0.iter().zip(&u).map(|(a, b)| a - b).collect();
    let den: f64 = v.iter().map(|vi| vi * vi).sum();

    let gens = symmetry_generators(0);
    let mut best = f64::INFINITY;
    for mask in 0..8u32 {
        let mut img = b.clone();
        for (bit, g) in gens.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                img = g.apply(&img);
            }
        }
        let e = entries(&img);
        let num: f64 = v.iter().zip(e.iter().zip(&u)).map(|(vi, (ei, ui))| vi * (ei - ui)).sum();
        let c = (num / den).clamp(-1.0, 1.0);
        let dist2: f64 = e
            .iter()
            .zip(u.iter().zip(&v))
            .map(|(ei, (ui, vi))| (ei - (ui + c * vi)).powi(2))
            .sum();
        best = best.min(dist2.sqrt());
    }
    assert!(best < 1e-5, "distance to the optimal line: {best:e}");
}

#[test]
fn gap_reports_against_moment_bounds() {
    // Two-qubit see-saw closes the gap where two qubits are optimal and
    // leaves it open where they are not.
    let cfg = quick(60, 40);

    let p = FunctionalParams::new(0.25, 0, 1.0).unwrap();
    let upper = npa_value(&p, NpaLevel::Level2).unwrap();
    let report = gap_report(&p, &cfg, upper).unwrap();
    assert_eq!(report.flag, GapFlag::DimensionOptimal, "gap {}", report.gap);

    let p = FunctionalParams::i3322();
    let upper = npa_value(&p, NpaLevel::Level2).unwrap();
    let report = gap_report(&p, &cfg, upper).unwrap();
    assert_eq!(report.flag, GapFlag::GapOpen, "gap {}", report.gap);
    assert!(report.gap > 1e-3);
}

#[test]
fn observables_stay_projective() {
    let p = FunctionalParams::new(0.3, 0, 1.5).unwrap();
    for (d_a, d_b) in [(2usize, 2usize), (3, 2), (3, 3)] {
        let cfg = SeesawConfig { d_a, d_b, ..quick(10, 25) };
        let run = seesaw(&p, &cfg).unwrap();
        let r = &run.realization;
        assert!(r.is_projective(), "projectivity error {}", r.projectivity_error());
        assert!((r.state.norm() - 1.0).abs() < 1e-10);
    }
}
