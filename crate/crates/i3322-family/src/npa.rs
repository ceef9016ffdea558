//! Moment-matrix hierarchy upper bounds on the quantum value.
//!
//! Any quantum realization assigns a moment `<psi| w |psi>` to every word `w`
//! built from outcome projectors. Collecting the moments of `u† v` over all
//! words `u, v` up to a length cutoff gives a positive semidefinite matrix
//! whose entries repeat according to the word identities (projector
//! idempotency, commutation of the two parties' operators, adjoint symmetry).
//! Maximizing the Bell objective over *all* unit-normalized positive matrices
//! with that repetition pattern is therefore a relaxation of the quantum
//! problem: its optimum upper-bounds the quantum value, and lengthening the
//! words tightens the bound level by level.
//!
//! Levels follow the usual naming: level 1 keeps words of length at most one,
//! "1+AB" adds the nine mixed products, levels 2 and 3 keep all words of
//! length at most two and three (matrix sizes 7, 16, 28, 88).
//!
//! Moments are modeled as real numbers, identifying each word with its
//! adjoint. This keeps the relaxation sound: the entrywise real part of a
//! Hermitian positive semidefinite moment matrix is again positive
//! semidefinite, respects every identification class, and leaves the
//! objective moments (which are expectations of Hermitian products) intact.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bounds::local_value_closed;
use crate::functional::FunctionalParams;
use crate::optim::sdp::{solve_sdp, SdpProblem, SparseSym};
use crate::sweep::format_sig;
use crate::{Error, Result};

/// Margin by which the moment bound must exceed the local value before a grid
/// node is flagged as leaving room for quantum advantage.
pub const ADVANTAGE_TOL: f64 = 1e-6;

/// Relaxation tightness: which word lengths index the moment matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NpaLevel {
    /// Identity and single projectors (7 words).
    Level1,
    /// Level 1 plus the mixed products `A_x B_y` (16 words).
    Level1Ab,
    /// All words of length at most two (28 words).
    Level2,
    /// All words of length at most three (88 words).
    Level3,
}

impl NpaLevel {
    /// All levels, loosest first.
    pub fn all() -> [NpaLevel; 4] {
        [NpaLevel::Level1, NpaLevel::Level1Ab, NpaLevel::Level2, NpaLevel::Level3]
    }

    /// Parses the conventional level names `1`, `1ab`, `2`, `3`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(NpaLevel::Level1),
            "1ab" | "1+ab" => Ok(NpaLevel::Level1Ab),
            "2" => Ok(NpaLevel::Level2),
            "3" => Ok(NpaLevel::Level3),
            other => Err(Error::Domain(format!(
                "unknown hierarchy level {other:?}; expected 1, 1ab, 2, or 3"
            ))),
        }
    }

    /// Conventional short name (`1`, `1ab`, `2`, `3`).
    pub fn label(&self) -> &'static str {
        match self {
            NpaLevel::Level1 => "1",
            NpaLevel::Level1Ab => "1ab",
            NpaLevel::Level2 => "2",
            NpaLevel::Level3 => "3",
        }
    }
}

impl std::fmt::Display for NpaLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A product of outcome projectors. Alice's operators commute with Bob's, so
/// the word is stored as the two party-local factors, each a sequence of
/// settings `0..3` with no equal adjacent letters (idempotency).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub alice: Vec<u8>,
    pub bob: Vec<u8>,
}

impl Word {
    /// The empty word (identity operator).
    pub fn identity() -> Self {
        Self::default()
    }

    /// Single Alice projector for setting `x`.
    pub fn alice_letter(x: usize) -> Self {
        Self { alice: vec![x as u8], bob: Vec::new() }
    }

    /// Single Bob projector for setting `y`.
    pub fn bob_letter(y: usize) -> Self {
        Self { alice: Vec::new(), bob: vec![y as u8] }
    }

    /// Mixed product of one Alice and one Bob projector.
    pub fn pair(x: usize, y: usize) -> Self {
        Self { alice: vec![x as u8], bob: vec![y as u8] }
    }

    /// Total number of letters.
    pub fn len(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    /// Whether this is the identity operator.
    pub fn is_identity(&self) -> bool {
        self.alice.is_empty() && self.bob.is_empty()
    }

    /// Operator adjoint: reverses each party's factor.
    pub fn adjoint(&self) -> Self {
        let mut alice = self.alice.clone();
        let mut bob = self.bob.clone();
        alice.reverse();
        bob.reverse();
        Self { alice, bob }
    }

    /// Canonical representative of the moment class `{w, w†}`.
    pub fn canon(self) -> Self {
        let adj = self.adjoint();
        if adj < self { adj } else { self }
    }

    /// The word of `u† v`, collapsing repeated projectors at the junctions.
    pub fn product(u: &Word, v: &Word) -> Word {
        Word { alice: merge(&u.alice, &v.alice), bob: merge(&u.bob, &v.bob) }
    }
}

// Concatenates reverse(first) with second, collapsing equal adjacent letters.
// Both inputs are repeat-free, so only junction letters can collapse and a
// single fold suffices.
fn merge(first: &[u8], second: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(first.len() + second.len());
    for &letter in first.iter().rev().chain(second.iter()) {
        if out.last() != Some(&letter) {
            out.push(letter);
        }
    }
    out
}

/// The words indexing the moment matrix at `level`, identity first, in a
/// fixed deterministic order.
pub fn level_words(level: NpaLevel) -> Vec<Word> {
    let mut words = vec![Word::identity()];
    for x in 0..3 {
        words.push(Word::alice_letter(x));
    }
    for y in 0..3 {
        words.push(Word::bob_letter(y));
    }
    let push_pairs = |words: &mut Vec<Word>| {
        for x in 0..3 {
            for y in 0..3 {
                words.push(Word::pair(x, y));
            }
        }
    };
    match level {
        NpaLevel::Level1 => {}
        NpaLevel::Level1Ab => push_pairs(&mut words),
        NpaLevel::Level2 | NpaLevel::Level3 => {
            for x in 0..3u8 {
                for z in 0..3u8 {
                    if z != x {
                        words.push(Word { alice: vec![x, z], bob: Vec::new() });
                    }
                }
            }
            push_pairs(&mut words);
            for y in 0..3u8 {
                for w in 0..3u8 {
                    if w != y {
                        words.push(Word { alice: Vec::new(), bob: vec![y, w] });
                    }
                }
            }
            if level == NpaLevel::Level3 {
                for x in 0..3u8 {
                    for y in 0..3u8 {
                        if y == x {
                            continue;
                        }
                        for z in 0..3u8 {
                            if z != y {
                                words.push(Word { alice: vec![x, y, z], bob: Vec::new() });
                            }
                        }
                    }
                }
                for x in 0..3u8 {
                    for z in 0..3u8 {
                        if z == x {
                            continue;
                        }
                        for y in 0..3 {
                            words.push(Word { alice: vec![x, z], bob: vec![y] });
                        }
                    }
                }
                for x in 0..3 {
                    for y in 0..3u8 {
                        for w in 0..3u8 {
                            if w != y {
                                words.push(Word { alice: vec![x], bob: vec![y, w] });
                            }
                        }
                    }
                }
                for y in 0..3u8 {
                    for w in 0..3u8 {
                        if w == y {
                            continue;
                        }
                        for u in 0..3u8 {
                            if u != w {
                                words.push(Word { alice: Vec::new(), bob: vec![y, w, u] });
                            }
                        }
                    }
                }
            }
        }
    }
    words
}

/// A Bell objective over ±1-valued observables:
/// `constant + Σ_x marg_a[x] <A_x> + Σ_y marg_b[y] <B_y> + Σ_xy corr[x][y] <A_x B_y>`.
#[derive(Clone, Debug)]
pub struct MomentObjective {
    pub constant: f64,
    pub marg_a: [f64; 3],
    pub marg_b: [f64; 3],
    pub corr: [[f64; 3]; 3],
}

impl MomentObjective {
    /// The family member at `params`.
    pub fn from_params(params: &FunctionalParams) -> Self {
        let (a1, a3) = (params.alpha1, params.alpha3);
        let s = params.b_sign();
        Self {
            constant: 0.0,
            marg_a: [a1, a1, 0.0],
            marg_b: [s * a1, s * a1, 0.0],
            corr: [[1.0, 1.0, a3], [1.0, 1.0, -a3], [a3, -a3, 0.0]],
        }
    }

    /// The CHSH expression (two settings; the third row and column are zero).
    /// Its quantum value 2√2 is a sharp external check on the machinery.
    pub fn chsh() -> Self {
        Self {
            constant: 0.0,
            marg_a: [0.0; 3],
            marg_b: [0.0; 3],
            corr: [[1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 0.0]],
        }
    }
}

/// A built moment relaxation, ready to solve.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub level: NpaLevel,
    /// Words indexing the matrix rows/columns.
    pub words: Vec<Word>,
    /// Canonical representative of each moment class (one SDP variable each).
    pub classes: Vec<Word>,
    /// Additive constant to restore after solving for the projector moments.
    pub constant: f64,
    pub sdp: SdpProblem,
}

/// Builds the moment relaxation of the family member at `params`.
pub fn build_moment_problem(params: &FunctionalParams, level: NpaLevel) -> Result<MomentProblem> {
    build_custom_moment_problem(&MomentObjective::from_params(params), level)
}

/// Builds the moment relaxation of an arbitrary correlation objective.
///
/// The ±1 objective is rewritten over projector moments via `A = 2Π - 1`:
/// `<A_x>` becomes `2 a_x - 1` and `<A_x B_y>` becomes
/// `4 q_xy - 2 a_x - 2 b_y + 1` with `a_x = <Π_x ⊗ 1>`, `b_y = <1 ⊗ Π_y>`,
/// `q_xy = <Π_x ⊗ Π_y>`.
pub fn build_custom_moment_problem(obj: &MomentObjective, level: NpaLevel) -> Result<MomentProblem> {
    let words = level_words(level);
    let m = words.len();
    let mut class_of: HashMap<Word, usize> = HashMap::new();
    let mut classes: Vec<Word> = Vec::new();
    let mut blocks: Vec<SparseSym> = Vec::new();
    let mut m0 = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let prod = Word::product(&words[i], &words[j]).canon();
            if prod.is_identity() {
                // Only the (identity, identity) entry: projector products never
                // cancel back to the identity. Normalization pins it to 1.
                m0[(i, j)] = 1.0;
                m0[(j, i)] = 1.0;
                continue;
            }
            let id = *class_of.entry(prod.clone()).or_insert_with(|| {
                classes.push(prod);
                blocks.push(SparseSym::default());
                classes.len() - 1
            });
            blocks[id].entries.push((i, j, 1.0));
        }
    }

    let mut objective = vec![0.0; classes.len()];
    let mut constant = obj.constant;
    let mut add = |word: Word, coef: f64| -> Result<()> {
        if coef == 0.0 {
            return Ok(());
        }
        match class_of.get(&word) {
            Some(&id) => {
                objective[id] += coef;
                Ok(())
            }
            None => Err(Error::Unsupported(format!(
                "moment {word:?} is not generated at level {}",
                level.label()
            ))),
        }
    };
    for x in 0..3 {
        constant -= obj.marg_a[x] + obj.marg_b[x];
        let row_sum: f64 = obj.corr[x].iter().sum();
        let col_sum: f64 = (0..3).map(|i| obj.corr[i][x]).sum();
        add(Word::alice_letter(x), 2.0 * obj.marg_a[x] - 2.0 * row_sum)?;
        add(Word::bob_letter(x), 2.0 * obj.marg_b[x] - 2.0 * col_sum)?;
        for y in 0..3 {
            constant += obj.corr[x][y];
            add(Word::pair(x, y), 4.0 * obj.corr[x][y])?;
        }
    }

    let sdp = SdpProblem { m, m0, blocks, objective };
    sdp.validate()?;
    Ok(MomentProblem { level, words, classes, constant, sdp })
}

/// Result of solving one moment relaxation.
#[derive(Clone, Debug)]
pub struct NpaSolution {
    /// Upper bound on the quantum value (solver optimum plus constant).
    pub value: f64,
    /// Weak-duality bound from the solver's dual certificate; `value` and
    /// `certified_value` straddle the true relaxation optimum.
    pub certified_value: f64,
    /// Solver's final duality gap (relative).
    pub solver_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Moment matrix side length.
    pub matrix_size: usize,
    /// Number of distinct moment classes (SDP variables).
    pub moment_classes: usize,
}

/// Solves the moment relaxation of the family member at `params`.
pub fn npa_solution(params: &FunctionalParams, level: NpaLevel) -> Result<NpaSolution> {
    let problem = build_moment_problem(params, level)?;
    solve_moment_problem(&problem)
}

/// Solves an already-built moment relaxation.
pub fn solve_moment_problem(problem: &MomentProblem) -> Result<NpaSolution> {
    let sol = solve_sdp(&problem.sdp)?;
    Ok(NpaSolution {
        value: sol.value + problem.constant,
        certified_value: sol.certificate_bound + problem.constant,
        solver_gap: sol.gap,
        iterations: sol.iterations,
        converged: sol.converged,
        matrix_size: problem.sdp.m,
        moment_classes: problem.sdp.blocks.len(),
    })
}

/// Upper bound on the quantum value of the family member at `params`.
pub fn npa_value(params: &FunctionalParams, level: NpaLevel) -> Result<f64> {
    npa_solution(params, level).map(|s| s.value)
}

/// Rectangular `alpha2 = 1` parameter grid scanned by [`advantage_region`]:
/// `alpha1 ∈ [0, alpha1_max]`, `alpha3 ∈ [0, alpha3_max]`, spacing `step`.
#[derive(Clone, Debug)]
pub struct AdvantageGrid {
    pub alpha1_max: f64,
    pub alpha3_max: f64,
    pub step: f64,
}

impl Default for AdvantageGrid {
    fn default() -> Self {
        Self { alpha1_max: 4.0, alpha3_max: 2.0, step: 0.025 }
    }
}

impl AdvantageGrid {
    /// Grid nodes in row-major order (`alpha1` outer, `alpha3` inner).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let n1 = (self.alpha1_max / self.step).round() as usize;
        let n3 = (self.alpha3_max / self.step).round() as usize;
        let mut nodes = Vec::with_capacity((n1 + 1) * (n3 + 1));
        for i1 in 0..=n1 {
            for i3 in 0..=n3 {
                nodes.push((i1 as f64 * self.step, i3 as f64 * self.step));
            }
        }
        nodes
    }
}

/// One node of the advantage scan.
#[derive(Clone, Debug)]
pub struct AdvantageRow {
    pub alpha1: f64,
    pub alpha3: f64,
    pub beta_npa: f64,
    pub beta_local: f64,
    /// `true` when the upper bound leaves room for quantum advantage;
    /// `false` certifies that no quantum advantage exists at this node.
    pub advantage: bool,
    pub solver_gap: f64,
    /// Solver failure at this node, if any (`beta_npa` is NaN then).
    pub error: Option<String>,
}

fn node_row(alpha1: f64, alpha3: f64, level: NpaLevel) -> AdvantageRow {
    let params = match FunctionalParams::new(alpha1, 1, alpha3) {
        Ok(p) => p,
        Err(e) => {
            return AdvantageRow {
                alpha1,
                alpha3,
                beta_npa: f64::NAN,
                beta_local: f64::NAN,
                advantage: false,
                solver_gap: f64::NAN,
                error: Some(e.to_string()),
            }
        }
    };
    let (beta_local, _) = local_value_closed(&params);
    match npa_solution(&params, level) {
        Ok(sol) => AdvantageRow {
            alpha1,
            alpha3,
            beta_npa: sol.value,
            beta_local,
            advantage: sol.value > beta_local + ADVANTAGE_TOL,
            solver_gap: sol.solver_gap,
            error: None,
        },
        Err(e) => AdvantageRow {
            alpha1,
            alpha3,
            beta_npa: f64::NAN,
            beta_local,
            advantage: false,
            solver_gap: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Computes the advantage scan rows in grid order, in parallel.
///
/// Solver failures do not abort the scan; they surface in
/// [`AdvantageRow::error`].
pub fn advantage_rows(level: NpaLevel, grid: &AdvantageGrid) -> Result<Vec<AdvantageRow>> {
    if !(grid.step > 0.0) || !grid.step.is_finite() {
        return Err(Error::Domain(format!("grid step must be positive, got {}", grid.step)));
    }
    Ok(grid
        .nodes()
        .into_par_iter()
        .map(|(a1, a3)| node_row(a1, a3, level))
        .collect())
}

/// Streams the advantage scan as CSV with header
/// `alpha1,alpha3,alpha2,level,beta_npa,beta_L,advantage_flag,solver_gap`,
/// writing chunk by chunk so partial output survives interruption. Returns
/// the number of data rows written.
pub fn advantage_region(
    level: NpaLevel,
    grid: &AdvantageGrid,
    out: &mut dyn Write,
) -> Result<usize> {
    if !(grid.step > 0.0) || !grid.step.is_finite() {
        return Err(Error::Domain(format!("grid step must be positive, got {}", grid.step)));
    }
    writeln!(out, "alpha1,alpha3,alpha2,level,beta_npa,beta_L,advantage_flag,solver_gap")?;
    let nodes = grid.nodes();
    let mut written = 0;
    for chunk in nodes.chunks(512) {
        let rows: Vec<AdvantageRow> =
            chunk.par_iter().map(|&(a1, a3)| node_row(a1, a3, level)).collect();
        for r in &rows {
            writeln!(
                out,
                "{},{},1,{},{},{},{},{}",
                format_sig(r.alpha1, 9),
                format_sig(r.alpha3, 9),
                level.label(),
                format_sig(r.beta_npa, 9),
                format_sig(r.beta_local, 9),
                r.advantage,
                format_sig(r.solver_gap, 9),
            )?;
        }
        written += rows.len();
        out.flush()?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_algebra() {
        let u = Word { alice: vec![0, 1], bob: vec![2] };
        let v = Word { alice: vec![1, 0], bob: vec![2, 1] };
        // u† v reverses u and collapses the repeated projectors at both
        // junctions: alice (1 0).(1 0) -> 1 0 1 0, bob (2).(2 1) -> 2 1.
        let p = Word::product(&u, &v);
        assert_eq!(p.alice, vec![1, 0, 1, 0]);
        assert_eq!(p.bob, vec![2, 1]);
        // Squares of single projectors collapse to the projector itself.
        let s = Word::alice_letter(2);
        assert_eq!(Word::product(&s, &s), s);
        // The identity arises only from the empty pair.
        assert!(Word::product(&Word::identity(), &Word::identity()).is_identity());
        assert!(!Word::product(&s, &Word::identity()).is_identity());
        // Canonicalization conflates a word with its adjoint.
        let w = Word { alice: vec![2, 0, 1], bob: vec![] };
        assert_eq!(w.clone().canon(), w.adjoint().canon());
    }

    #[test]
    fn level_sizes() {
        assert_eq!(level_words(NpaLevel::Level1).len(), 7);
        assert_eq!(level_words(NpaLevel::Level1Ab).len(), 16);
        assert_eq!(level_words(NpaLevel::Level2).len(), 28);
        assert_eq!(level_words(NpaLevel::Level3).len(), 88);
        for level in NpaLevel::all() {
            let words = level_words(level);
            assert_eq!(words[0], Word::identity());
            for w in &words {
                for adj in w.alice.windows(2).chain(w.bob.windows(2)) {
                    assert_ne!(adj[0], adj[1], "words must be repeat-free");
                }
            }
            let mut sorted = words.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), words.len(), "words must be distinct");
        }
    }

    #[test]
    fn level_parsing() {
        for level in NpaLevel::all() {
            assert_eq!(NpaLevel::parse(level.label()).unwrap(), level);
        }
        assert_eq!(NpaLevel::parse("1+AB").unwrap(), NpaLevel::Level1Ab);
        assert!(NpaLevel::parse("4").is_err());
    }

    #[test]
    fn objective_conversion_matches_direct_evaluation() {
        // The projector-moment rewrite must agree with evaluating the ±1 form
        // on explicit deterministic assignments: set every projector moment
        // consistently with outcomes a_x, b_y ∈ {±1} and compare.
        let params = FunctionalParams::new(0.85, 1, 1.3).unwrap();
        let obj = MomentObjective::from_params(&params);
        let problem = build_moment_problem(&params, NpaLevel::Level1Ab).unwrap();
        for bits in 0..64u32 {
            let a: Vec<f64> = (0..3).map(|x| if bits >> x & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let b: Vec<f64> =
                (3..6).map(|y| if bits >> y & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let mut direct = obj.constant;
            for x in 0..3 {
                direct += obj.marg_a[x] * a[x] + obj.marg_b[x] * b[x];
                for y in 0..3 {
                    direct += obj.corr[x][y] * a[x] * b[y];
                }
            }
            // Projector moments of the deterministic assignment.
            let moment = |w: &Word| -> f64 {
                let pa: f64 = w.alice.iter().map(|&x| (1.0 + a[x as usize]) / 2.0).product();
                let pb: f64 = w.bob.iter().map(|&y| (1.0 + b[y as usize]) / 2.0).product();
                pa * pb
            };
            let converted = problem.constant
                + problem
                    .classes
                    .iter()
                    .zip(&problem.sdp.objective)
                    .map(|(w, c)| c * moment(w))
                    .sum::<f64>();
            assert!(
                (direct - converted).abs() < 1e-12,
                "bits {bits}: direct {direct} vs converted {converted}"
            );
        }
    }
}
