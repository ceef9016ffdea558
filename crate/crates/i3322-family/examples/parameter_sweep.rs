//! Sweeping the parameter plane with stacked tasks.
//!
//! A sweep walks an (alpha1, alpha3) grid at fixed alpha2, runs the selected
//! tasks at every node (closed-form bounds, moment relaxation, seesaw, ...),
//! checks the sandwich beta_L <= lower bounds <= NPA at each node, and writes
//! one CSV row per node plus a JSON summary. Rows are computed in parallel
//! but written in grid order with per-node seeds, so reruns and resumed runs
//! are byte-identical regardless of worker count.

use i3322_family::sweep::{
    read_csv, report_file, report_node, run_sweep, GridRange, SweepSpec, SweepTask,
};
use i3322_family::Result;

fn main() -> Result<()> {
    let outdir = std::env::temp_dir().join("i3322_sweep_example");
    let spec = SweepSpec {
        alpha1: GridRange::new(0.0, 0.4, 0.2),
        alpha3: GridRange::new(0.8, 1.2, 0.2),
        alpha2: 1,
        tasks: vec![
            SweepTask::parse("local")?,
            SweepTask::parse("ns")?,
            SweepTask::parse("npa:1ab")?,
            SweepTask::parse("seesaw:2")?,
        ],
        outdir: outdir.clone(),
        workers: 0, // rayon default
        seed: 1,
    };
    // Start fresh; a leftover file would otherwise be resumed.
    let _ = std::fs::remove_file(outdir.join("sweep.csv"));

    let outcome = run_sweep(&spec)?;
    println!(
        "swept {} nodes in {:.2}s -> {}",
        outcome.summary.nodes_total,
        outcome.summary.elapsed_seconds,
        outcome.csv_path.display()
    );
    assert_eq!(outcome.summary.sandwich_violations, 0);

    // Aggregate report, then a close look at one node.
    print!("\n{}", report_file(&outcome.csv_path)?);
    let rows = read_csv(&outcome.csv_path)?;
    let node = rows
        .iter()
        .find(|r| (r.alpha1 - 0.2).abs() < 1e-12 && (r.alpha3 - 1.2).abs() < 1e-12)
        .expect("grid contains (0.2, 1.2)");
    print!("\n{}", report_node(node));
    Ok(())
}
