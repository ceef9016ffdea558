//! Local and no-signalling values of the family, in closed form and by
//! independent oracles.
//!
//! The local value of any two-outcome Bell functional is attained at a
//! deterministic strategy, so enumerating the 64 assignments of ±1 outcomes
//! to the six settings is an exact oracle. The closed forms fall out of that
//! enumeration: writing `s = <A1> + <A2>`, `t = <B1> + <B2>` (each in
//! {-2, 0, 2} with the split side feeding the cross terms instead), the
//! candidate values reduce to a handful of affine pieces in
//! `(alpha1, alpha3)`.
//!
//! The no-signalling value is a linear program over the 36 conditional
//! probabilities `p(ab|xy)`: 9 normalization equalities, 24 no-signalling
//! equalities, and nonnegativity. Its closed form consists of two pieces for
//! `alpha2 = 0` and the local pieces capped by `4(1 + alpha3)` for
//! `alpha2 = 1`.

use serde::{Deserialize, Serialize};

use crate::functional::{
    behavior_from_table, evaluate_unchecked, Behavior, FunctionalParams, ProbabilityTable,
};
use crate::optim::lp::{solve_lp, LinearProgram};
use crate::Result;

/// Minimum margin before a comparison of two bound values counts as strict.
pub const STRICT_TOL: f64 = 1e-9;

/// A deterministic local strategy: fixed ±1 outcome per setting on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a: [i8; 3],
    pub b: [i8; 3],
}

impl DeterministicStrategy {
    /// Strategy number `idx ∈ 0..64`, reading the bits of `idx` as outcomes
    /// for `(a1, a2, a3, b1, b2, b3)` from the most significant of six bits;
    /// a zero bit means outcome +1.
    pub fn from_index(idx: usize) -> Self {
        assert!(idx < 64, "strategy index out of range");
        let sign = |k: usize| if idx >> (5 - k) & 1 == 0 { 1 } else { -1 };
        Self {
            a: [sign(0), sign(1), sign(2)],
            b: [sign(3), sign(4), sign(5)],
        }
    }

    /// All 64 strategies in index order.
    pub fn all() -> impl Iterator<Item = DeterministicStrategy> {
        (0..64).map(Self::from_index)
    }

    /// The deterministic behavior: `<A_x> = a_x`, `<A_x B_y> = a_x b_y`.
    pub fn behavior(&self) -> Behavior {
        let mut beh = Behavior::zero();
        for x in 0..3 {
            beh.marg_a[x] = f64::from(self.a[x]);
            beh.marg_b[x] = f64::from(self.b[x]);
        }
        for x in 0..3 {
            for y in 0..3 {
                beh.corr[x][y] = f64::from(self.a[x]) * f64::from(self.b[y]);
            }
        }
        beh
    }

    /// The deterministic probability table.
    pub fn table(&self) -> ProbabilityTable {
        ProbabilityTable::deterministic(self.a, self.b)
    }
}

/// Local value with a witnessing deterministic strategy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LocalOptimum {
    pub value: f64,
    pub strategy: DeterministicStrategy,
}

/// Exact oracle: maximum of the functional over all 64 deterministic
/// strategies (ties resolve to the lowest strategy index).
pub fn local_value_enum(params: &FunctionalParams) -> LocalOptimum {
    let mut best: Option<LocalOptimum> = None;
    for s in DeterministicStrategy::all() {
        let value = evaluate_unchecked(params, &s.behavior());
        if best.map_or(true, |b| value > b.value) {
            best = Some(LocalOptimum { value, strategy: s });
        }
    }
    best.expect("64 strategies scanned")
}

/// The affine piece of the local value active at a parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalPiece {
    /// `4 (alpha1 + 1)`: first two settings aligned on both sides so the
    /// marginal and block terms add (`alpha2 = 0`).
    MarginalsAndBlock,
    /// `4 (alpha1 - 1)`: marginal term bought at the price of an opposed
    /// block (`alpha2 = 1`).
    MarginalsAgainstBlock,
    /// `4`: block alone; the opposed marginal terms cancel (`alpha2 = 1`).
    BlockOnly,
    /// `2 (alpha1 + alpha3)`: one side splits its first two settings.
    HalfSplit,
    /// `4 alpha3`: both sides split, only the cross terms contribute.
    CrossOnly,
}

/// Closed-form local value and its active piece.
///
/// For `alpha2 = 0` it is `4 alpha3` when `alpha1 <= alpha3 - 1` and
/// `4 (alpha1 + 1)` otherwise; for `alpha2 = 1` it is
/// `max { 4 (alpha1 - 1), 4 alpha3, 2 (alpha1 + alpha3), 4 }`.
/// Ties resolve to the first-listed candidate.
pub fn local_value_closed(params: &FunctionalParams) -> (f64, LocalPiece) {
    let (a1, a3) = (params.alpha1, params.alpha3);
    if params.alpha2 == 0 {
        if a1 <= a3 - 1.0 {
            (4.0 * a3, LocalPiece::CrossOnly)
        } else {
            (4.0 * (a1 + 1.0), LocalPiece::MarginalsAndBlock)
        }
    } else {
        let candidates = [
            (4.0 * (a1 - 1.0), LocalPiece::MarginalsAgainstBlock),
            (4.0 * a3, LocalPiece::CrossOnly),
            (2.0 * (a1 + a3), LocalPiece::HalfSplit),
            (4.0, LocalPiece::BlockOnly),
        ];
        let mut best = candidates[0];
        for &c in &candidates[1..] {
            if c.0 > best.0 {
                best = c;
            }
        }
        best
    }
}

/// No-signalling value with a witnessing no-signalling box.
#[derive(Clone, Debug)]
pub struct NsOptimum {
    pub value: f64,
    pub table: ProbabilityTable,
    pub behavior: Behavior,
}

/// Variable index of `p(ab|xy)` in the no-signalling LP.
fn var(x: usize, y: usize, i: usize, j: usize) -> usize {
    ((x * 3 + y) * 2 + i) * 2 + j
}

/// LP oracle for the no-signalling value: maximizes the functional over the
/// polytope of 36 conditional probabilities subject to normalization and
/// no-signalling equalities.
pub fn ns_value_lp(params: &FunctionalParams) -> Result<NsOptimum> {
    let n = 36;
    let sign = [1.0, -1.0];
    let marg_a_coef = [params.alpha1, params.alpha1, 0.0];
    let sb = params.b_sign() * params.alpha1;
    let marg_b_coef = [sb, sb, 0.0];
    let corr_coef = [
        [1.0, 1.0, params.alpha3],
        [1.0, 1.0, -params.alpha3],
        [params.alpha3, -params.alpha3, 0.0],
    ];

    let mut objective = vec![0.0; n];
    for x in 0..3 {
        for y in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    // Marginals are averaged over the partner setting, which
                    // the no-signalling rows make exact.
                    objective[var(x, y, i, j)] = corr_coef[x][y] * sign[i] * sign[j]
                        + marg_a_coef[x] * sign[i] / 3.0
                        + marg_b_coef[y] * sign[j] / 3.0;
                }
            }
        }
    }

    let mut a_eq = Vec::new();
    let mut b_eq = Vec::new();
    // Normalization: sum_ab p(ab|xy) = 1 for each of the 9 setting pairs.
    for x in 0..3 {
        for y in 0..3 {
            let mut row = vec![0.0; n];
            for i in 0..2 {
                for j in 0..2 {
                    row[var(x, y, i, j)] = 1.0;
                }
            }
            a_eq.push(row);
            b_eq.push(1.0);
        }
    }
    // No-signalling: Alice's outcome distribution independent of y (12 rows),
    // Bob's independent of x (12 rows). Redundant rows are fine; the solver
    // drops dependent ones.
    for x in 0..3 {
        for i in 0..2 {
            for y in 1..3 {
                let mut row = vec![0.0; n];
                for j in 0..2 {
                    row[var(x, 0, i, j)] += 1.0;
                    row[var(x, y, i, j)] -= 1.0;
                }
                a_eq.push(row);
                b_eq.push(0.0);
            }
        }
    }
    for y in 0..3 {
        for j in 0..2 {
            for x in 1..3 {
                let mut row = vec![0.0; n];
                for i in 0..2 {
                    row[var(0, y, i, j)] += 1.0;
                    row[var(x, y, i, j)] -= 1.0;
                }
                a_eq.push(row);
                b_eq.push(0.0);
            }
        }
    }

    let lp = LinearProgram {
        objective,
        a_eq,
        b_eq,
        lower: vec![0.0; n],
        upper: vec![f64::INFINITY; n],
    };
    let sol = solve_lp(&lp)?;

    let mut table = ProbabilityTable::uniform();
    for x in 0..3 {
        for y in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    // Clamp simplex rounding noise; entries are exact basic
                    // solutions up to tableau arithmetic.
                    table.p[x][y][i][j] = sol.x[var(x, y, i, j)].clamp(0.0, 1.0);
                }
            }
        }
    }
    let behavior = behavior_from_table(&table)?;
    Ok(NsOptimum { value: sol.value, table, behavior })
}

/// Closed-form no-signalling value.
///
/// `alpha2 = 0`: `4 (alpha1 + 1)` when `alpha1 >= alpha3`, else
/// `4 (alpha3 + 1)`. `alpha2 = 1`: the local value capped from below by
/// `4 (1 + alpha3)`.
pub fn ns_value_closed(params: &FunctionalParams) -> f64 {
    let (a1, a3) = (params.alpha1, params.alpha3);
    if params.alpha2 == 0 {
        if a1 >= a3 {
            4.0 * (a1 + 1.0)
        } else {
            4.0 * (a3 + 1.0)
        }
    } else {
        local_value_closed(params).0.max(4.0 * (1.0 + a3))
    }
}

/// Where a parameter point sits relative to the classical and no-signalling
/// boundaries.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegionInfo {
    pub local_value: f64,
    pub ns_value: f64,
    /// Active piece of the closed-form local value.
    pub local_piece: LocalPiece,
    /// Whether no-signalling boxes strictly beat every local strategy
    /// (margin [`STRICT_TOL`]).
    pub ns_exceeds_local: bool,
}

/// Classifies a parameter point from the closed forms alone.
pub fn classify_region(params: &FunctionalParams) -> RegionInfo {
    let (local_value, local_piece) = local_value_closed(params);
    let ns_value = ns_value_closed(params);
    RegionInfo {
        local_value,
        ns_value,
        local_piece,
        ns_exceeds_local: ns_value > local_value + STRICT_TOL,
    }
}
