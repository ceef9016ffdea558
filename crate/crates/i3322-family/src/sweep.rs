//! Parameter-plane sweeps and CSV/JSON reporting.
//!
//! A sweep walks a rectangular `(alpha1, alpha3)` grid at fixed `alpha2`,
//! computes the closed-form local and no-signalling values plus the requested
//! numerical bounds at every node, and streams one CSV row per node. Rows are
//! written in a fixed order with deterministic per-node seeds, so re-running a
//! sweep (or resuming an interrupted one) reproduces the file byte for byte
//! regardless of worker count.
//!
//! The local and no-signalling values are always present (they are closed
//! forms and cost microseconds); tasks select the optional columns:
//!
//! - `exact` — closed-form quantum value and regime (`alpha2 = 0` only),
//! - `npa:<level>` — moment-hierarchy upper bound at level 1, 1ab, 2 or 3,
//! - `seesaw:<dim>` — best value over random-start alternating optimization
//!   at the given local dimension,
//! - `pv[:<cap>]` — banded-realization dimension ladder against the cached
//!   level-3 bound, reporting the best value, the closing dimension (when the
//!   gap closes) and the Schmidt peak classification.
//!
//! Consistency is enforced at write time: `beta_L <= beta_NS`, and every
//! realization-backed value must stay below the node's upper bound by more
//! than `-1e-6`. Violations land in the `errors` column and in the summary,
//! and [`report_node`] prints them loudly.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::functional::FunctionalParams;
use crate::npa::{self, NpaLevel};
use crate::pv;
use crate::seesaw::{seesaw, SeesawConfig};
use crate::quantum;
use crate::{mix_seed, Error, Result};

/// A lower bound may exceed an upper bound by at most this much before the
/// row is flagged inconsistent.
pub const SANDWICH_TOL: f64 = 1e-6;

/// Fixed CSV header of sweep artifacts.
pub const CSV_HEADER: &str = "alpha1,alpha3,alpha2,beta_l,beta_ns,beta_exact,regime,beta_npa,beta_seesaw,beta_pv,min_closing_n,pv_flag,peak_class,gap_open,errors";

/// One grid-node computation requested of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepTask {
    /// Closed-form local bound (always computed; accepted for CLI symmetry).
    Local,
    /// Closed-form no-signalling bound (always computed).
    Ns,
    /// Closed-form quantum value, `alpha2 = 0` members only.
    Exact,
    Npa(NpaLevel),
    Seesaw(usize),
    /// Dimension ladder, optionally capped below the standard 1200.
    Pv(Option<usize>),
}

impl SweepTask {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |s: &str| {
            Error::Malformed(format!(
                "unknown task '{s}' (expected local, ns, exact, npa:<level>, seesaw:<dim>, pv[:<cap>])"
            ))
        };
        match s {
            "local" => return Ok(Self::Local),
            "ns" => return Ok(Self::Ns),
            "exact" => return Ok(Self::Exact),
            "pv" => return Ok(Self::Pv(None)),
            _ => {}
        }
        if let Some(level) = s.strip_prefix("npa:") {
            return Ok(Self::Npa(NpaLevel::parse(level)?));
        }
        if let Some(dim) = s.strip_prefix("seesaw:") {
            let d: usize = dim.parse().map_err(|_| bad(s))?;
            if d < 2 {
                return Err(Error::Domain(format!("seesaw dimension must be >= 2, got {d}")));
            }
            return Ok(Self::Seesaw(d));
        }
        if let Some(cap) = s.strip_prefix("pv:") {
            let c: usize = cap.parse().map_err(|_| bad(s))?;
            if c < 3 {
                return Err(Error::Domain(format!("pv ladder cap must be >= 3, got {c}")));
            }
            return Ok(Self::Pv(Some(c)));
        }
        Err(bad(s))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Local => "local".into(),
            Self::Ns => "ns".into(),
            Self::Exact => "exact".into(),
            Self::Npa(level) => format!("npa:{}", level.label()),
            Self::Seesaw(d) => format!("seesaw:{d}"),
            Self::Pv(None) => "pv".into(),
            Self::Pv(Some(c)) => format!("pv:{c}"),
        }
    }
}

/// Inclusive arithmetic progression `min, min + step, ...` up to `max`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) {
            return Err(Error::Domain(format!("grid step must be > 0, got {}", self.step)));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(Error::Domain(format!(
                "invalid grid range [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Grid values, computed as `min + k * step` for bit-exact
    /// reproducibility across runs.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.min + k as f64 * self.step).collect()
    }
}

/// Full description of one sweep.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub alpha1: GridRange,
    pub alpha3: GridRange,
    pub alpha2: u8,
    pub tasks: Vec<SweepTask>,
    pub outdir: PathBuf,
    /// Worker threads; `0` uses the global default.
    pub workers: usize,
    pub seed: u64,
}

impl SweepSpec {
    /// The paper-scale default grid: `alpha1` over `[0, 4]`, `alpha3` over
    /// `[0, 2]`, step `0.025` (13 041 nodes).
    pub fn default_grid(alpha2: u8, tasks: Vec<SweepTask>, outdir: PathBuf, seed: u64) -> Self {
        Self {
            alpha1: GridRange::new(0.0, 4.0, 0.025),
            alpha3: GridRange::new(0.0, 2.0, 0.025),
            alpha2,
            tasks,
            outdir,
            workers: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha1.validate()?;
        self.alpha3.validate()?;
        if self.alpha2 > 1 {
            return Err(Error::Domain(format!("alpha2 must be 0 or 1, got {}", self.alpha2)));
        }
        if self.tasks.is_empty() {
            return Err(Error::Domain("task list must not be empty".into()));
        }
        Ok(())
    }
}

/// Everything computed at one grid node. Optional fields stay `None` when
/// their task was not requested or failed (see `errors`).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NodeRecord {
    pub alpha1: f64,
    pub alpha3: f64,
    pub alpha2: u8,
    pub beta_l: f64,
    pub beta_ns: f64,
    pub beta_exact: Option<f64>,
    /// Closed-form regime name when `exact` ran.
    pub regime: Option<String>,
    pub beta_npa: Option<f64>,
    pub beta_seesaw: Option<f64>,
    pub beta_pv: Option<f64>,
    /// Smallest ladder dimension that closed the gap to the upper bound.
    pub min_closing_n: Option<usize>,
    /// Terminal ladder flag (`gap_closed`, `converged`, `exhausted`).
    pub pv_flag: Option<String>,
    pub peak_class: Option<String>,
    /// Whether the best computed lower bound sits more than `1e-6` below the
    /// NPA bound — the node's quantum value is not yet attained numerically.
    pub gap_open: Option<bool>,
    /// Per-task failures and consistency violations, `;`-separated.
    pub errors: String,
}

impl NodeRecord {
    /// Best realization-backed (or exact) lower bound present on the row.
    pub fn best_lower(&self) -> f64 {
        [self.beta_exact, self.beta_seesaw, self.beta_pv]
            .into_iter()
            .flatten()
            .fold(self.beta_l, f64::max)
    }

    /// Consistency violations on this row: the closed-form sandwich
    /// `beta_L <= beta_NS` and every lower bound vs the NPA upper bound.
    pub fn sandwich_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.beta_l <= self.beta_ns + 1e-9) {
            out.push(format!("beta_l {} exceeds beta_ns {}", self.beta_l, self.beta_ns));
        }
        if let Some(upper) = self.beta_npa {
            for (name, v) in [
                ("beta_l", Some(self.beta_l)),
                ("beta_exact", self.beta_exact),
                ("beta_seesaw", self.beta_seesaw),
                ("beta_pv", self.beta_pv),
            ] {
                if let Some(v) = v {
                    if v > upper + SANDWICH_TOL {
                        out.push(format!("{name} {v} exceeds npa bound {upper}"));
                    }
                }
            }
        }
        out
    }

    fn to_csv_row(&self) -> String {
        let f9 = |v: f64| format_sig(v, 9);
        let opt = |v: Option<f64>| v.map(|x| format_sig(x, 9)).unwrap_or_default();
        let s = |v: &Option<String>| v.clone().unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            f9(self.alpha1),
            f9(self.alpha3),
            self.alpha2,
            f9(self.beta_l),
            f9(self.beta_ns),
            opt(self.beta_exact),
            s(&self.regime),
            opt(self.beta_npa),
            opt(self.beta_seesaw),
            opt(self.beta_pv),
            self.min_closing_n.map(|n| n.to_string()).unwrap_or_default(),
            s(&self.pv_flag),
            s(&self.peak_class),
            self.gap_open.map(|b| b.to_string()).unwrap_or_default(),
            self.errors.replace(',', ";"),
        )
    }

    /// Parses one data row of a sweep CSV (the fixed header's column order).
    pub fn from_csv_row(row: &str) -> Result<Self> {
        let cols: Vec<&str> = row.split(',').collect();
        let want = CSV_HEADER.split(',').count();
        if cols.len() != want {
            return Err(Error::Malformed(format!(
                "expected {want} columns, got {} in row '{row}'"
            , cols.len())));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|_| Error::Malformed(format!("bad float '{}' in column {i}", cols[i])))
        };
        let opt_f = |i: usize| -> Result<Option<f64>> {
            if cols[i].is_empty() { Ok(None) } else { f(i).map(Some) }
        };
        let opt_s = |i: usize| -> Option<String> {
            if cols[i].is_empty() { None } else { Some(cols[i].to_string()) }
        };
        Ok(Self {
            alpha1: f(0)?,
            alpha3: f(1)?,
            alpha2: cols[2]
                .parse()
                .map_err(|_| Error::Malformed(format!("bad alpha2 '{}'", cols[2])))?,
            beta_l: f(3)?,
            beta_ns: f(4)?,
            beta_exact: opt_f(5)?,
            regime: opt_s(6),
            beta_npa: opt_f(7)?,
            beta_seesaw: opt_f(8)?,
            beta_pv: opt_f(9)?,
            min_closing_n: if cols[10].is_empty() {
                None
            } else {
                Some(cols[10].parse().map_err(|_| {
                    Error::Malformed(format!("bad closing dimension '{}'", cols[10]))
                })?)
            },
            pv_flag: opt_s(11),
            peak_class: opt_s(12),
            gap_open: if cols[13].is_empty() {
                None
            } else {
                Some(cols[13].parse().map_err(|_| {
                    Error::Malformed(format!("bad gap flag '{}'", cols[13]))
                })?)
            },
            errors: cols[14].to_string(),
        })
    }
}

/// Shared memo of NPA bounds keyed by functional parameters and level, so a
/// `pv` ladder and an `npa` column at the same node solve one SDP.
#[derive(Default)]
pub struct NpaCache {
    map: Mutex<HashMap<(u64, u64, u8, NpaLevel), std::result::Result<f64, String>>>,
}

impl NpaCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, params: &FunctionalParams, level: NpaLevel) -> Result<f64> {
        let key = (
            params.alpha1.to_bits(),
            params.alpha3.to_bits(),
            params.alpha2,
            level,
        );
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return hit.clone().map_err(Error::Solver);
        }
        let computed = npa::npa_value(params, level).map_err(|e| e.to_string());
        self.map
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| computed.clone());
        computed.map_err(Error::Solver)
    }
}

// Ladder stopping flag in CSV vocabulary.
fn flag_label(flag: pv::LadderFlag) -> &'static str {
    match flag {
        pv::LadderFlag::GapClosed => "gap_closed",
        pv::LadderFlag::ConvergedBelowBound => "converged",
        pv::LadderFlag::ScheduleExhausted => "exhausted",
    }
}

fn class_label(class: pv::SchmidtClass) -> &'static str {
    match class {
        pv::SchmidtClass::SinglePeak => "single_peak",
        pv::SchmidtClass::DoublePeak => "double_peak",
        pv::SchmidtClass::TripleOrFlat => "triple_or_flat",
    }
}

/// Computes one node. Failures of individual tasks are recorded in
/// `errors` and leave their columns empty; the record itself always exists.
pub fn compute_node(
    alpha1: f64,
    alpha3: f64,
    alpha2: u8,
    tasks: &[SweepTask],
    node_seed: u64,
    cache: &NpaCache,
) -> NodeRecord {
    let mut rec = NodeRecord {
        alpha1,
        alpha3,
        alpha2,
        beta_l: f64::NAN,
        beta_ns: f64::NAN,
        ..NodeRecord::default()
    };
    let mut errors: Vec<String> = Vec::new();
    let params = match FunctionalParams::new(alpha1, alpha2, alpha3) {
        Ok(p) => p,
        Err(e) => {
            rec.errors = format!("params: {e}");
            return rec;
        }
    };
    rec.beta_l = bounds::local_value_closed(&params).0;
    rec.beta_ns = bounds::ns_value_closed(&params);

    for task in tasks {
        match task {
            SweepTask::Local | SweepTask::Ns => {}
            SweepTask::Exact => match quantum::quantum_value_branch0(&params) {
                Ok(sol) => {
                    rec.beta_exact = Some(sol.value);
                    rec.regime = Some(format!("{:?}", sol.regime));
                }
                Err(e) => errors.push(format!("exact: {e}")),
            },
            SweepTask::Npa(level) => match cache.value(&params, *level) {
                Ok(v) => rec.beta_npa = Some(v),
                Err(e) => errors.push(format!("npa:{}: {e}", level.label())),
            },
            SweepTask::Seesaw(dim) => {
                let cfg = SeesawConfig {
                    d_a: *dim,
                    d_b: *dim,
                    seed: node_seed,
                    ..SeesawConfig::default()
                };
                match seesaw(&params, &cfg) {
                    Ok(r) => rec.beta_seesaw = Some(r.value),
                    Err(e) => errors.push(format!("seesaw:{dim}: {e}")),
                }
            }
            SweepTask::Pv(cap) => {
                let upper = match rec.beta_npa {
                    Some(v) => Ok(v),
                    None => cache.value(&params, NpaLevel::Level3),
                };
                match upper {
                    Ok(upper) => {
                        let schedule = pv::LadderSchedule::up_to(cap.unwrap_or(1200));
                        let cfg = pv::PvOptConfig { seed: node_seed, ..Default::default() };
                        match pv::ladder_run(
                            &params,
                            upper,
                            &schedule,
                            &pv::StoppingRule::default(),
                            &cfg,
                        ) {
                            Ok(out) => {
                                rec.beta_pv = Some(out.best_value);
                                rec.min_closing_n = out.closing_n;
                                rec.pv_flag = Some(flag_label(out.flag).to_string());
                                if let Some(p) = &out.best_params {
                                    rec.peak_class =
                                        Some(class_label(pv::analyze_solution(p).class).to_string());
                                }
                                for step in out.steps.iter().filter(|s| s.error.is_some()) {
                                    errors.push(format!(
                                        "pv n={}: {}",
                                        step.n,
                                        step.error.as_deref().unwrap_or("")
                                    ));
                                }
                            }
                            Err(e) => errors.push(format!("pv: {e}")),
                        }
                    }
                    Err(e) => errors.push(format!("pv upper bound: {e}")),
                }
            }
        }
    }
    if let Some(upper) = rec.beta_npa {
        rec.gap_open = Some(upper - rec.best_lower() > SANDWICH_TOL);
    }
    errors.extend(rec.sandwich_violations());
    rec.errors = errors.join("; ");
    rec
}

/// Aggregate written alongside the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub alpha2: u8,
    pub tasks: Vec<String>,
    pub seed: u64,
    pub grid: [usize; 2],
    pub nodes_total: usize,
    pub nodes_resumed: usize,
    pub nodes_computed: usize,
    pub nodes_with_errors: usize,
    pub sandwich_violations: usize,
    pub elapsed_seconds: f64,
}

/// Paths and counts coming out of [`run_sweep`].
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: SweepSummary,
}

// Returns how many data rows of an existing CSV line up with the node grid
// (a resumable file is a prefix of the full row sequence).
fn resume_offset(path: &Path, a1s: &[f64], a3s: &[f64], alpha2: u8) -> Result<usize> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => {
            return Err(Error::Malformed(format!(
                "existing {} has unexpected header '{h}'",
                path.display()
            )))
        }
        None => return Ok(0),
    }
    let n3 = a3s.len();
    let mut count = 0usize;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let rec = NodeRecord::from_csv_row(line)?;
        let (i1, i3) = (count / n3, count % n3);
        if i1 >= a1s.len() {
            return Err(Error::Malformed(format!(
                "existing {} has more rows than the grid",
                path.display()
            )));
        }
        let expect = (a1s[i1], a3s[i3]);
        if rec.alpha1 != expect.0 || rec.alpha3 != expect.1 || rec.alpha2 != alpha2 {
            return Err(Error::Malformed(format!(
                "existing row {count} of {} is ({}, {}, {}), expected ({}, {}, {alpha2}); \
                 refusing to resume onto a different grid",
                path.display(),
                rec.alpha1,
                rec.alpha3,
                rec.alpha2,
                expect.0,
                expect.1
            )));
        }
        count += 1;
    }
    Ok(count)
}

/// Runs a sweep to `<outdir>/sweep.csv` plus `<outdir>/sweep_summary.json`.
///
/// Nodes are processed in fixed row-major order (`alpha1` outer, `alpha3`
/// inner) in parallel chunks; rows already present in the CSV are kept as-is
/// and computation resumes after them. Each node's random state derives only
/// from the sweep seed and the node's grid indices.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let started = Instant::now();
    fs::create_dir_all(&spec.outdir)?;
    let csv_path = spec.outdir.join("sweep.csv");
    let summary_path = spec.outdir.join("sweep_summary.json");
    let a1s = spec.alpha1.values();
    let a3s = spec.alpha3.values();
    let (n1, n3) = (a1s.len(), a3s.len());
    let total = n1 * n3;
    let resumed = if csv_path.exists() {
        resume_offset(&csv_path, &a1s, &a3s, spec.alpha2)?
    } else {
        0
    };

    let file = fs::OpenOptions::new().create(true).append(true).open(&csv_path)?;
    let mut out = BufWriter::new(file);
    if resumed == 0 && fs::metadata(&csv_path)?.len() == 0 {
        writeln!(out, "{CSV_HEADER}")?;
    }

    let cache = NpaCache::new();
    let mut nodes_with_errors = 0usize;
    let mut sandwich_violations = 0usize;

    let process = |out: &mut BufWriter<fs::File>,
                   nodes_with_errors: &mut usize,
                   sandwich_violations: &mut usize|
     -> Result<()> {
        for chunk_start in (resumed..total).step_by(CHUNK) {
            let chunk_end = (chunk_start + CHUNK).min(total);
            let recs: Vec<NodeRecord> = (chunk_start..chunk_end)
                .into_par_iter()
                .map(|idx| {
                    let (i1, i3) = (idx / n3, idx % n3);
                    compute_node(
                        a1s[i1],
                        a3s[i3],
                        spec.alpha2,
                        &spec.tasks,
                        mix_seed(spec.seed, &[i1 as u64, i3 as u64]),
                        &cache,
                    )
                })
                .collect();
            for rec in recs {
                if !rec.errors.is_empty() {
                    *nodes_with_errors += 1;
                }
                *sandwich_violations += rec.sandwich_violations().len();
                writeln!(out, "{}", rec.to_csv_row())?;
            }
            out.flush()?;
        }
        Ok(())
    };

    if spec.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::Solver(format!("thread pool: {e}")))?;
        pool.install(|| process(&mut out, &mut nodes_with_errors, &mut sandwich_violations))?;
    } else {
        process(&mut out, &mut nodes_with_errors, &mut sandwich_violations)?;
    }
    out.flush()?;

    let summary = SweepSummary {
        alpha2: spec.alpha2,
        tasks: spec.tasks.iter().map(SweepTask::label).collect(),
        seed: spec.seed,
        grid: [n1, n3],
        nodes_total: total,
        nodes_resumed: resumed,
        nodes_computed: total - resumed,
        nodes_with_errors,
        sandwich_violations,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(SweepOutcome { csv_path, summary_path, summary })
}

const CHUNK: usize = 256;

/// Reads every data row of a sweep CSV.
pub fn read_csv(path: &Path) -> Result<Vec<NodeRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Malformed(format!(
                "{} is not a sweep CSV (header {:?})",
                path.display(),
                other
            )))
        }
    }
    lines
        .filter(|l| !l.is_empty())
        .map(NodeRecord::from_csv_row)
        .collect()
}

/// Human-readable rendering of one node, inconsistencies up front.
pub fn report_node(rec: &NodeRecord) -> String {
    let mut s = String::new();
    let violations = rec.sandwich_violations();
    for v in &violations {
        s.push_str(&format!("!! INCONSISTENT: {v}\n"));
    }
    s.push_str(&format!(
        "functional (alpha1 = {}, alpha2 = {}, alpha3 = {})\n",
        format_sig(rec.alpha1, 9),
        rec.alpha2,
        format_sig(rec.alpha3, 9)
    ));
    s.push_str(&format!("  beta_L   = {}\n", format_sig(rec.beta_l, 9)));
    s.push_str(&format!("  beta_NS  = {}\n", format_sig(rec.beta_ns, 9)));
    if let Some(v) = rec.beta_exact {
        let regime = rec.regime.as_deref().unwrap_or("?");
        s.push_str(&format!("  beta_Q   = {}  (exact, {regime})\n", format_sig(v, 9)));
    }
    if let Some(v) = rec.beta_npa {
        s.push_str(&format!("  beta_NPA = {}\n", format_sig(v, 9)));
    }
    if let Some(v) = rec.beta_seesaw {
        s.push_str(&format!("  beta_SS  = {}  (seesaw lower bound)\n", format_sig(v, 9)));
    }
    if let Some(v) = rec.beta_pv {
        let detail = match (&rec.pv_flag, rec.min_closing_n) {
            (Some(f), Some(n)) => format!("  ({f} at n = {n})"),
            (Some(f), None) => format!("  ({f})"),
            _ => String::new(),
        };
        s.push_str(&format!("  beta_PV  = {}{detail}\n", format_sig(v, 9)));
    }
    if let Some(class) = &rec.peak_class {
        s.push_str(&format!("  schmidt profile: {class}\n"));
    }
    if let Some(open) = rec.gap_open {
        s.push_str(&format!(
            "  gap to upper bound: {}\n",
            if open { "open (> 1e-6)" } else { "closed" }
        ));
    }
    if !rec.errors.is_empty() {
        s.push_str(&format!("  errors: {}\n", rec.errors));
    }
    s
}

/// Aggregate rendering of a whole sweep file.
pub fn report_file(path: &Path) -> Result<String> {
    let rows = read_csv(path)?;
    let mut s = format!("{}: {} rows\n", path.display(), rows.len());
    let mut violations = 0usize;
    let mut errors = 0usize;
    let mut gap_open = 0usize;
    let mut gap_known = 0usize;
    for r in &rows {
        let v = r.sandwich_violations();
        if !v.is_empty() {
            violations += v.len();
            s.push_str(&format!(
                "!! INCONSISTENT at (alpha1 = {}, alpha3 = {}): {}\n",
                format_sig(r.alpha1, 9),
                format_sig(r.alpha3, 9),
                v.join("; ")
            ));
        }
        if !r.errors.is_empty() {
            errors += 1;
        }
        if let Some(open) = r.gap_open {
            gap_known += 1;
            if open {
                gap_open += 1;
            }
        }
    }
    s.push_str(&format!("  rows with task errors: {errors}\n"));
    s.push_str(&format!("  sandwich violations:   {violations}\n"));
    if gap_known > 0 {
        s.push_str(&format!(
            "  gap open (bound not attained within 1e-6): {gap_open} of {gap_known}\n"
        ));
    }
    Ok(s)
}

/// Formats `v` to `digits` significant digits the way C's `%g` does: fixed
/// notation in the human-friendly exponent range, scientific outside it,
/// trailing zeros trimmed. Output always round-trips through `f64` parsing.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        match s.split_once('e') {
            Some((mantissa, exponent)) => format!("{}e{}", trim_zeros(mantissa), exponent),
            None => s,
        }
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(5.0, 9), "5");
        assert_eq!(format_sig(5.00350175, 9), "5.00350175");
        assert_eq!(format_sig(-4.25, 9), "-4.25");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(1.23456789e-12, 9), "1.23456789e-12");
        assert_eq!(format_sig(9.87654321e14, 9), "9.87654321e14");
        assert_eq!(format_sig(f64::NAN, 9), "NaN");
        for &v in &[2.0f64.sqrt() * 2.0, 5.00350175, 1e-9, 123456.789, -0.025] {
            let parsed: f64 = format_sig(v, 17).parse().unwrap();
            assert_eq!(parsed, v, "17 significant digits must round-trip exactly");
        }
    }

    #[test]
    fn task_parsing_round_trips() {
        for s in ["local", "ns", "exact", "npa:1", "npa:1ab", "npa:2", "npa:3", "seesaw:2", "seesaw:4", "pv", "pv:40"] {
            let t = SweepTask::parse(s).unwrap();
            assert_eq!(t.label(), s);
        }
        assert!(SweepTask::parse("npa:9").is_err());
        assert!(SweepTask::parse("seesaw:1").is_err());
        assert!(SweepTask::parse("quantum").is_err());
    }

    #[test]
    fn grid_values_are_reproducible() {
        let r = GridRange::new(0.0, 2.0, 0.025);
        let v = r.values();
        assert_eq!(v.len(), 81);
        assert_eq!(v[0], 0.0);
        assert_eq!(*v.last().unwrap(), 0.025 * 80.0);
        let default = SweepSpec::default_grid(1, vec![SweepTask::Local], PathBuf::from("."), 7);
        assert_eq!(
            default.alpha1.values().len() * default.alpha3.values().len(),
            13_041
        );
    }

    #[test]
    fn csv_row_round_trips() {
        let rec = NodeRecord {
            alpha1: 1.0,
            alpha3: 1.0,
            alpha2: 1,
            beta_l: 4.0,
            beta_ns: 8.0,
            beta_exact: None,
            regime: None,
            beta_npa: Some(5.00350175),
            beta_seesaw: Some(5.0),
            beta_pv: Some(5.00350154),
            min_closing_n: Some(600),
            pv_flag: Some("gap_closed".into()),
            peak_class: Some("single_peak".into()),
            gap_open: Some(false),
            errors: String::new(),
        };
        let row = rec.to_csv_row();
        let back = NodeRecord::from_csv_row(&row).unwrap();
        assert_eq!(back.alpha1, rec.alpha1);
        assert_eq!(back.beta_npa, rec.beta_npa);
        assert_eq!(back.min_closing_n, rec.min_closing_n);
        assert_eq!(back.gap_open, rec.gap_open);
        assert_eq!(back.pv_flag, rec.pv_flag);
        assert!(back.sandwich_violations().is_empty());
    }

    #[test]
    fn violations_are_detected() {
        let rec = NodeRecord {
            alpha1: 0.0,
            alpha3: 1.0,
            alpha2: 0,
            beta_l: 9.0,
            beta_ns: 8.0,
            beta_npa: Some(5.0),
            beta_seesaw: Some(5.5),
            ..NodeRecord::default()
        };
        let v = rec.sandwich_violations();
        assert_eq!(v.len(), 3, "beta_l > beta_ns, beta_l > npa, seesaw > npa: {v:?}");
        let printed = report_node(&rec);
        assert!(printed.contains("!! INCONSISTENT"));
    }
}
