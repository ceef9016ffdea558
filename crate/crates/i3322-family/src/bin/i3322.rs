//! Command-line front end: one verb per library capability.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use i3322_family::bounds;
use i3322_family::functional::{evaluate, Behavior, FunctionalParams};
use i3322_family::npa::{self, NpaLevel};
use i3322_family::pv;
use i3322_family::quantum;
use i3322_family::seesaw::{seesaw, SeesawConfig};
use i3322_family::sweep::{self, format_sig, GridRange, SweepSpec, SweepTask};
use i3322_family::{Error, Result};

#[derive(Parser)]
#[command(
    name = "i3322",
    version,
    about = "Classical, no-signalling and quantum values of a three-parameter I3322-like Bell functional family"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Member {
    /// Marginal weight (>= 0).
    #[arg(long)]
    alpha1: f64,
    /// Branch selector: 0 or 1 (sign of Bob's marginals).
    #[arg(long)]
    alpha2: u8,
    /// Cross-term weight (>= 0).
    #[arg(long)]
    alpha3: f64,
}

impl Member {
    fn params(&self) -> Result<FunctionalParams> {
        FunctionalParams::new(self.alpha1, self.alpha2, self.alpha3)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the functional on a behavior loaded from JSON.
    Eval {
        #[command(flatten)]
        member: Member,
        /// JSON file: {"margA":[..3],"margB":[..3],"corr":[[..3]x3]}.
        #[arg(long)]
        behavior: PathBuf,
    },
    /// Closed-form local and no-signalling values with a witness strategy.
    Classical {
        #[command(flatten)]
        member: Member,
        /// Cross-check the no-signalling value against the vertex LP.
        #[arg(long)]
        check_lp: bool,
    },
    /// Exact quantum value of an alpha2 = 0 member (closed form).
    QuantumExact {
        #[command(flatten)]
        member: Member,
        /// Third-measurement angle of the optimal family to realize.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Write the attaining two-qubit realization as JSON.
        #[arg(long)]
        emit_realization: Option<PathBuf>,
    },
    /// Random-restart alternating-optimization lower bound.
    Seesaw {
        #[command(flatten)]
        member: Member,
        /// Local dimension of both parties.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 150)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the best realization as JSON.
        #[arg(long)]
        emit_realization: Option<PathBuf>,
    },
    /// Moment-hierarchy (NPA) upper bound.
    Npa {
        #[command(flatten)]
        member: Member,
        /// Relaxation level: 1, 1ab, 2 or 3.
        #[arg(long, default_value = "2")]
        level: String,
    },
    /// Scan the advantage region (NPA vs local) over the default plane.
    NpaGrid {
        /// Relaxation level: 1, 1ab, 2 or 3.
        #[arg(long, default_value = "1ab")]
        level: String,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 4.0)]
        alpha1_max: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha3_max: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Banded-realization ladder (or a single dimension, warm-started).
    Pv {
        #[command(flatten)]
        member: Member,
        /// Stop the warm-started ladder exactly at this dimension.
        #[arg(long, conflicts_with = "ladder")]
        n: Option<usize>,
        /// Run the full schedule with the standard stopping rule.
        #[arg(long)]
        ladder: bool,
        /// Cap the ladder schedule below the standard 1200.
        #[arg(long)]
        cap: Option<usize>,
        /// JSON memo of level-3 upper bounds, read and updated in place.
        #[arg(long)]
        npa_cache: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output prefix for _values.csv, _angles.csv, _schmidt.csv, _class.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid sweep writing sweep.csv + sweep_summary.json.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        alpha1_min: f64,
        #[arg(long, default_value_t = 4.0)]
        alpha1_max: f64,
        #[arg(long, default_value_t = 0.025)]
        alpha1_step: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha3_min: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha3_max: f64,
        #[arg(long, default_value_t = 0.025)]
        alpha3_step: f64,
        #[arg(long)]
        alpha2: u8,
        /// Comma-separated: local,ns,exact,npa:<level>,seesaw:<dim>,pv[:<cap>].
        #[arg(long)]
        tasks: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Summarize a sweep CSV, or one node of it.
    Report {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, requires = "alpha3")]
        alpha1: Option<f64>,
        #[arg(long, requires = "alpha1")]
        alpha3: Option<f64>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Eval { member, behavior } => {
            let params = member.params()?;
            let text = fs::read_to_string(&behavior)?;
            let b: Behavior = serde_json::from_str(&text)?;
            println!("{}", format_sig(evaluate(&params, &b)?, 9));
        }
        Cmd::Classical { member, check_lp } => {
            let params = member.params()?;
            let (beta_l, piece) = bounds::local_value_closed(&params);
            let opt = bounds::local_value_enum(&params);
            println!("beta_L  = {}  ({piece:?})", format_sig(beta_l, 9));
            println!(
                "witness: a = {:?}, b = {:?}",
                opt.strategy.a, opt.strategy.b
            );
            let ns = bounds::ns_value_closed(&params);
            println!("beta_NS = {}", format_sig(ns, 9));
            if check_lp {
                let lp = bounds::ns_value_lp(&params)?;
                println!(
                    "beta_NS (vertex LP) = {}  (|closed - lp| = {:.2e})",
                    format_sig(lp.value, 9),
                    (ns - lp.value).abs()
                );
            }
        }
        Cmd::QuantumExact { member, mu, emit_realization } => {
            let params = member.params()?;
            let sol = quantum::quantum_value_branch0(&params)?;
            println!("beta_Q  = {}  ({:?})", format_sig(sol.value, 9), sol.regime);
            println!(
                "theta = {}, phi = {}, gamma^2 = {}, f = {}",
                format_sig(sol.theta, 9),
                format_sig(sol.phi, 9),
                format_sig(sol.gamma2, 9),
                format_sig(sol.f_value, 9)
            );
            if let Some(path) = emit_realization {
                let r = quantum::optimal_realization_branch0(&params, mu)?;
                fs::write(&path, serde_json::to_string_pretty(&r)?)?;
                println!("realization (mu = {}) written to {}", format_sig(mu, 9), path.display());
            }
        }
        Cmd::Seesaw { member, dim, trials, iters, seed, emit_realization } => {
            let params = member.params()?;
            let cfg = SeesawConfig {
                d_a: dim,
                d_b: dim,
                trials,
                iterations: iters,
                seed,
                ..SeesawConfig::default()
            };
            let res = seesaw(&params, &cfg)?;
            println!("beta_seesaw = {}  (dim {dim}, best trial {}, converged {})",
                format_sig(res.value, 9), res.best_trial, res.converged);
            if let Some(path) = emit_realization {
                fs::write(&path, serde_json::to_string_pretty(&res.realization)?)?;
                println!("realization written to {}", path.display());
            }
        }
        Cmd::Npa { member, level } => {
            let params = member.params()?;
            let level = NpaLevel::parse(&level)?;
            let sol = npa::npa_solution(&params, level)?;
            println!("beta_NPA({}) = {}", level.label(), format_sig(sol.value, 9));
            println!(
                "certified = {}, solver gap = {:.2e}, iterations = {}, moments = {} ({} classes), converged = {}",
                format_sig(sol.certified_value, 9),
                sol.solver_gap,
                sol.iterations,
                sol.matrix_size,
                sol.moment_classes,
                sol.converged
            );
        }
        Cmd::NpaGrid { level, step, alpha1_max, alpha3_max, out } => {
            let level = NpaLevel::parse(&level)?;
            let grid = npa::AdvantageGrid { alpha1_max, alpha3_max, step };
            let mut file = std::io::BufWriter::new(fs::File::create(&out)?);
            let rows = npa::advantage_region(level, &grid, &mut file)?;
            println!("{rows} rows written to {}", out.display());
        }
        Cmd::Pv { member, n, ladder, cap, npa_cache, seed, out } => {
            let params = member.params()?;
            if n.is_none() && !ladder {
                return Err(Error::Malformed("pv needs either --n <N> or --ladder".into()));
            }
            let upper = cached_npa3(&params, npa_cache.as_deref())?;
            println!("upper bound beta_NPA(3) = {}", format_sig(upper, 9));
            let (schedule, rule) = match n {
                Some(n) => {
                    let mut dims = pv::LadderSchedule::up_to(n).dims;
                    if dims.last() != Some(&n) {
                        dims.push(n);
                    }
                    (
                        pv::LadderSchedule { dims },
                        // Run through every dimension up to N.
                        pv::StoppingRule { gap_tol: 0.0, converge_tol: 0.0, window: usize::MAX },
                    )
                }
                None => (
                    pv::LadderSchedule::up_to(cap.unwrap_or(1200)),
                    pv::StoppingRule::default(),
                ),
            };
            let cfg = pv::PvOptConfig { seed, ..Default::default() };
            let outcome = pv::ladder_run(&params, upper, &schedule, &rule, &cfg)?;
            write_pv_artifacts(&out, upper, &outcome)?;
            println!(
                "beta_PV = {} ({:?}{}), artifacts at {}_*",
                format_sig(outcome.best_value, 9),
                outcome.flag,
                outcome
                    .closing_n
                    .map(|n| format!(", gap closed at n = {n}"))
                    .unwrap_or_default(),
                out.display()
            );
        }
        Cmd::Sweep {
            alpha1_min,
            alpha1_max,
            alpha1_step,
            alpha3_min,
            alpha3_max,
            alpha3_step,
            alpha2,
            tasks,
            out,
            workers,
            seed,
        } => {
            let tasks = tasks
                .split(',')
                .filter(|s| !s.is_empty())
                .map(SweepTask::parse)
                .collect::<Result<Vec<_>>>()?;
            let spec = SweepSpec {
                alpha1: GridRange::new(alpha1_min, alpha1_max, alpha1_step),
                alpha3: GridRange::new(alpha3_min, alpha3_max, alpha3_step),
                alpha2,
                tasks,
                outdir: out,
                workers,
                seed,
            };
            let outcome = sweep::run_sweep(&spec)?;
            println!(
                "{} nodes ({} resumed), {} with errors, {} sandwich violations -> {}",
                outcome.summary.nodes_total,
                outcome.summary.nodes_resumed,
                outcome.summary.nodes_with_errors,
                outcome.summary.sandwich_violations,
                outcome.csv_path.display()
            );
            if outcome.summary.nodes_with_errors > 0 || outcome.summary.sandwich_violations > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Report { file, alpha1, alpha3 } => {
            let violations;
            match (alpha1, alpha3) {
                (Some(a1), Some(a3)) => {
                    let rows = sweep::read_csv(&file)?;
                    let rec = rows
                        .iter()
                        .find(|r| (r.alpha1 - a1).abs() < 1e-9 && (r.alpha3 - a3).abs() < 1e-9)
                        .ok_or_else(|| {
                            Error::Malformed(format!("no node ({a1}, {a3}) in {}", file.display()))
                        })?;
                    violations = !rec.sandwich_violations().is_empty();
                    print!("{}", sweep::report_node(rec));
                }
                _ => {
                    let text = sweep::report_file(&file)?;
                    violations = text.contains("!! INCONSISTENT");
                    print!("{text}");
                }
            }
            if violations {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// Level-3 bound via an on-disk JSON memo (computed and stored on miss).
fn cached_npa3(params: &FunctionalParams, cache: Option<&std::path::Path>) -> Result<f64> {
    let key = format!(
        "{}|{}|{}|3",
        format_sig(params.alpha1, 17),
        params.alpha2,
        format_sig(params.alpha3, 17)
    );
    let mut map: std::collections::BTreeMap<String, f64> = match cache {
        Some(path) if path.exists() => serde_json::from_str(&fs::read_to_string(path)?)?,
        _ => Default::default(),
    };
    if let Some(v) = map.get(&key) {
        return Ok(*v);
    }
    let value = npa::npa_value(params, NpaLevel::Level3)?;
    if let Some(path) = cache {
        map.insert(key, value);
        fs::write(path, serde_json::to_string_pretty(&map)?)?;
    }
    Ok(value)
}

fn write_pv_artifacts(prefix: &std::path::Path, upper: f64, outcome: &pv::LadderOutcome) -> Result<()> {
    let p = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let mut values = String::from("n,beta_pv,gap\n");
    for step in &outcome.steps {
        values.push_str(&format!(
            "{},{},{}\n",
            step.n,
            format_sig(step.value, 9),
            format_sig(upper - step.value, 9)
        ));
    }
    fs::write(p("_values.csv"), values)?;
    if let Some(best) = &outcome.best_params {
        let analysis = pv::analyze_solution(best);
        let mut angles = String::from("index,theta_a,theta_b\n");
        for i in 0..analysis.angles_a.len().max(analysis.angles_b.len()) {
            let a = analysis.angles_a.get(i).map(|v| format_sig(*v, 9)).unwrap_or_default();
            let b = analysis.angles_b.get(i).map(|v| format_sig(*v, 9)).unwrap_or_default();
            angles.push_str(&format!("{i},{a},{b}\n"));
        }
        fs::write(p("_angles.csv"), angles)?;
        let mut schmidt = String::from("index,lambda\n");
        for (i, l) in analysis.schmidt.iter().enumerate() {
            schmidt.push_str(&format!("{i},{}\n", format_sig(*l, 9)));
        }
        fs::write(p("_schmidt.csv"), schmidt)?;
        fs::write(p("_class.json"), serde_json::to_string_pretty(&analysis)?)?;
    }
    Ok(())
}
