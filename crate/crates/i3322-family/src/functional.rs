//! The Bell-functional family, behaviors, and symmetry transforms.
//!
//! Everything here is written in the ±1-observable convention: a behavior is
//! the list of six marginals `<A_x>`, `<B_y>` and nine correlators `<A_xB_y>`.
//! The projector (0/1-outcome) convention appears only in [`ProjectorForm`],
//! which covers the single I3322 member of the family.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for validating probability tables (normalization, no-signalling).
pub const TABLE_TOL: f64 = 1e-12;

/// The triple `(alpha1, alpha2, alpha3)` selecting one member of the family.
///
/// `alpha1, alpha3 >= 0` and `alpha2 ∈ {0, 1}`. Inputs with negative
/// `alpha1`/`alpha3` are accepted by [`FunctionalParams::normalize`], which
/// maps them here together with the observable relabeling that preserves the
/// value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalParams {
    pub alpha1: f64,
    pub alpha2: u8,
    pub alpha3: f64,
}

impl FunctionalParams {
    /// Builds normalized parameters; rejects non-finite or negative weights.
    pub fn new(alpha1: f64, alpha2: u8, alpha3: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha3.is_finite()) {
            return Err(Error::Domain("alpha1/alpha3 must be finite".into()));
        }
        if alpha1 < 0.0 || alpha3 < 0.0 {
            return Err(Error::Domain(
                "alpha1/alpha3 must be non-negative; use normalize() for signed input".into(),
            ));
        }
        if alpha2 > 1 {
            return Err(Error::Domain("alpha2 must be 0 or 1".into()));
        }
        Ok(Self { alpha1, alpha2, alpha3 })
    }

    /// Canonicalizes signed weights.
    ///
    /// A negative `alpha1` is absorbed by negating all six observables; a
    /// negative `alpha3` by negating `A3` and `B3`. The returned [`SignFlip`]
    /// applied to any behavior makes the normalized functional agree with the
    /// signed one: `evaluate(signed, b) = evaluate(normalized, flip(b))`.
    pub fn normalize(alpha1: f64, alpha2: u8, alpha3: f64) -> Result<(Self, SignFlip)> {
        if !(alpha1.is_finite() && alpha3.is_finite()) {
            return Err(Error::Domain("alpha1/alpha3 must be finite".into()));
        }
        let mut flip = SignFlip::default();
        if alpha1 < 0.0 {
            flip.flip_all = true;
        }
        if alpha3 < 0.0 {
            flip.flip_a3 = true;
            flip.flip_b3 = true;
        }
        Ok((Self::new(alpha1.abs(), alpha2, alpha3.abs())?, flip))
    }

    /// The I3322 member as recorded by this crate: `(1, 1, 1)`, understood in
    /// the flipped representation of [`evaluate_flipped`].
    pub fn i3322() -> Self {
        Self { alpha1: 1.0, alpha2: 1, alpha3: 1.0 }
    }

    /// Marginal sign `(-1)^alpha2` in front of `<B1> + <B2>`.
    pub fn b_sign(&self) -> f64 {
        if self.alpha2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// An observable relabeling that leaves some family member invariant (or
/// absorbs a sign change of its weights).
///
/// Applied to a behavior in this fixed order: party swap, then the setting
/// swaps `A1<->A2` / `B1<->B2`, then the global flip, then the `A3`/`B3`
/// flips. All components commute except the party swap, which is why it acts
/// first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignFlip {
    pub flip_a3: bool,
    pub flip_b3: bool,
    pub flip_all: bool,
    pub swap_a12: bool,
    pub swap_b12: bool,
    pub swap_parties: bool,
}

impl SignFlip {
    /// Applies the relabeling to a behavior.
    pub fn apply(&self, b: &Behavior) -> Behavior {
        let mut out = *b;
        if self.swap_parties {
            std::mem::swap(&mut out.marg_a, &mut out.marg_b);
            let c = out.corr;
            for x in 0..3 {
                for y in 0..3 {
                    out.corr[x][y] = c[y][x];
                }
            }
        }
        if self.swap_a12 {
            out.marg_a.swap(0, 1);
            out.corr.swap(0, 1);
        }
        if self.swap_b12 {
            out.marg_b.swap(0, 1);
            for x in 0..3 {
                out.corr[x].swap(0, 1);
            }
        }
        if self.flip_all {
            for x in 0..3 {
                out.marg_a[x] = -out.marg_a[x];
                out.marg_b[x] = -out.marg_b[x];
            }
            // Correlators are products of two observables, so they survive.
        }
        if self.flip_a3 {
            out.marg_a[2] = -out.marg_a[2];
            for y in 0..3 {
                out.corr[2][y] = -out.corr[2][y];
            }
        }
        if self.flip_b3 {
            out.marg_b[2] = -out.marg_b[2];
            for x in 0..3 {
                out.corr[x][2] = -out.corr[x][2];
            }
        }
        out
    }
}

/// Generators of the symmetry group of `evaluate(params, ·)`.
///
/// The setting swaps `A1<->A2` (with `B3 -> -B3`) and `B1<->B2` (with
/// `A3 -> -A3`) preserve every member. The party swap preserves the
/// `alpha2 = 0` members as-is; for `alpha2 = 1` it must be combined with the
/// global sign flip. In the flipped representation of [`evaluate_flipped`]
/// the bare party swap is again a symmetry.
pub fn symmetry_generators(alpha2: u8) -> [SignFlip; 3] {
    let party = SignFlip {
        swap_parties: true,
        flip_all: alpha2 == 1,
        ..SignFlip::default()
    };
    let swap_a = SignFlip { swap_a12: true, flip_b3: true, ..SignFlip::default() };
    let swap_b = SignFlip { swap_b12: true, flip_a3: true, ..SignFlip::default() };
    [party, swap_a, swap_b]
}

/// Marginals and correlators of a three-setting binary-outcome box.
///
/// `corr[x][y] = <A_{x+1} B_{y+1}>` (zero-based settings).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    #[serde(rename = "margA")]
    pub marg_a: [f64; 3],
    #[serde(rename = "margB")]
    pub marg_b: [f64; 3],
    pub corr: [[f64; 3]; 3],
}

impl Behavior {
    /// The all-zero behavior (uniformly random outcomes).
    pub fn zero() -> Self {
        Self { marg_a: [0.0; 3], marg_b: [0.0; 3], corr: [[0.0; 3]; 3] }
    }

    /// Checks that every entry lies in `[-1, 1]` (up to a 1e-9 slack for
    /// entries produced by floating-point pipelines).
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v.abs() <= 1.0 + 1e-9;
        let all_ok = self.marg_a.iter().chain(&self.marg_b).all(|&v| ok(v))
            && self.corr.iter().flatten().all(|&v| ok(v));
        if all_ok {
            Ok(())
        } else {
            Err(Error::Domain("behavior entries must lie in [-1, 1]".into()))
        }
    }

    /// Relabels the B side by `B1 -> -B2`, `B2 -> -B1`, `B3 -> B3`.
    ///
    /// This involution converts between the two representations of the
    /// `alpha2 = 1` members: `evaluate_flipped(p, b) =
    /// evaluate(p, b.flip_b_relabel())`.
    pub fn flip_b_relabel(&self) -> Behavior {
        let mut out = *self;
        out.marg_b = [-self.marg_b[1], -self.marg_b[0], self.marg_b[2]];
        for x in 0..3 {
            out.corr[x][0] = -self.corr[x][1];
            out.corr[x][1] = -self.corr[x][0];
        }
        out
    }
}

/// Conditional outcome probabilities `p(ab|xy)` for `a, b ∈ {+1, -1}` and
/// settings `x, y ∈ {1, 2, 3}`.
///
/// Stored as `p[x][y][i][j]` with `i, j` indexing outcomes `(+1, -1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub p: [[[[f64; 2]; 2]; 3]; 3],
}

impl ProbabilityTable {
    /// Uniformly random outcomes: every entry 1/4.
    pub fn uniform() -> Self {
        Self { p: [[[[0.25; 2]; 2]; 3]; 3] }
    }

    /// Deterministic table: outcome `(a_x, b_y)` with probability one.
    ///
    /// `a`, `b` hold ±1 outcome assignments per setting.
    pub fn deterministic(a: [i8; 3], b: [i8; 3]) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 3]; 3];
        for (x, &ax) in a.iter().enumerate() {
            for (y, &by) in b.iter().enumerate() {
                let i = usize::from(ax < 0);
                let j = usize::from(by < 0);
                p[x][y][i][j] = 1.0;
            }
        }
        Self { p }
    }

    /// Validates entry range and per-setting normalization at [`TABLE_TOL`].
    pub fn validate(&self) -> Result<()> {
        for x in 0..3 {
            for y in 0..3 {
                let cell = &self.p[x][y];
                let mut sum = 0.0;
                for row in cell {
                    for &v in row {
                        if !(v.is_finite() && (-TABLE_TOL..=1.0 + TABLE_TOL).contains(&v)) {
                            return Err(Error::Domain(format!(
                                "probability out of range at setting ({}, {}): {v}",
                                x + 1,
                                y + 1
                            )));
                        }
                        sum += v;
                    }
                }
                if (sum - 1.0).abs() > TABLE_TOL {
                    return Err(Error::Domain(format!(
                        "table not normalized at setting ({}, {}): sum = {sum}",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks the no-signalling equalities at [`TABLE_TOL`]: Alice's marginal
    /// distribution must not depend on `y`, and Bob's not on `x`.
    pub fn is_no_signalling(&self) -> bool {
        for x in 0..3 {
            for i in 0..2 {
                let m0: f64 = self.p[x][0][i].iter().sum();
                for y in 1..3 {
                    let m: f64 = self.p[x][y][i].iter().sum();
                    if (m - m0).abs() > TABLE_TOL {
                        return false;
                    }
                }
            }
        }
        for y in 0..3 {
            for j in 0..2 {
                let m0: f64 = (0..2).map(|i| self.p[0][y][i][j]).sum();
                for x in 1..3 {
                    let m: f64 = (0..2).map(|i| self.p[x][y][i][j]).sum();
                    if (m - m0).abs() > TABLE_TOL {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Computes marginals and correlators of a normalized table.
pub fn behavior_from_table(t: &ProbabilityTable) -> Result<Behavior> {
    t.validate()?;
    let sign = [1.0, -1.0];
    let mut b = Behavior::zero();
    for x in 0..3 {
        for y in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    let p = t.p[x][y][i][j];
                    b.corr[x][y] += sign[i] * sign[j] * p;
                    // Marginals do not depend on the partner setting for NS
                    // tables; average over it so near-NS inputs stay sane.
                    b.marg_a[x] += sign[i] * p / 3.0;
                    b.marg_b[y] += sign[j] * p / 3.0;
                }
            }
        }
    }
    Ok(b)
}

/// Evaluates the family member on a behavior (±1 convention):
///
/// ```text
/// alpha1 [ <A1> + <A2> + (-1)^alpha2 (<B1> + <B2>) ]
///   + <A1B1> + <A1B2> + <A2B1> + <A2B2>
///   + alpha3 [ <A3B1> - <A3B2> + <A1B3> - <A2B3> ]
/// ```
pub fn evaluate(params: &FunctionalParams, b: &Behavior) -> Result<f64> {
    b.validate()?;
    Ok(evaluate_unchecked(params, b))
}

/// [`evaluate`] without the range check, for hot loops on trusted input.
pub fn evaluate_unchecked(params: &FunctionalParams, b: &Behavior) -> f64 {
    let c = &b.corr;
    let marg = b.marg_a[0] + b.marg_a[1] + params.b_sign() * (b.marg_b[0] + b.marg_b[1]);
    let block = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    let cross = c[2][0] - c[2][1] + c[0][2] - c[1][2];
    params.alpha1 * marg + block + params.alpha3 * cross
}

/// Evaluates the flipped representation of an `alpha2 = 1` member:
///
/// ```text
/// alpha1 [ <A1> + <A2> + <B1> + <B2> ]
///   - ( <A1B1> + <A1B2> + <A2B1> + <A2B2> )
///   + alpha3 [ <A3B1> - <A3B2> + <A1B3> - <A2B3> ]
/// ```
///
/// Related to [`evaluate`] by the B-side relabeling
/// [`Behavior::flip_b_relabel`]; both representations have the same optimal
/// value over every relabeling-closed set (local, no-signalling, quantum).
pub fn evaluate_flipped(params: &FunctionalParams, b: &Behavior) -> Result<f64> {
    if params.alpha2 != 1 {
        return Err(Error::Unsupported(
            "the flipped representation applies to alpha2 = 1 members".into(),
        ));
    }
    b.validate()?;
    Ok(evaluate_flipped_unchecked(params, b))
}

/// [`evaluate_flipped`] without the range check.
pub fn evaluate_flipped_unchecked(params: &FunctionalParams, b: &Behavior) -> f64 {
    let c = &b.corr;
    let marg = b.marg_a[0] + b.marg_a[1] + b.marg_b[0] + b.marg_b[1];
    let block = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    let cross = c[2][0] - c[2][1] + c[0][2] - c[1][2];
    params.alpha1 * marg - block + params.alpha3 * cross
}

/// The I3322 functional over 0/1-outcome projector expectations:
/// a constant plus signed coefficients on `p(1|x)`, `p(1|y)`, `p(11|xy)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorForm {
    pub constant: f64,
    /// Coefficient of Alice's single-party term `p(a=1|x)`.
    pub marg_a: [f64; 3],
    /// Coefficient of Bob's single-party term `p(b=1|y)`.
    pub marg_b: [f64; 3],
    /// Coefficient of the joint term `p(a=1, b=1|xy)` at `[x][y]`.
    pub prod: [[f64; 3]; 3],
}

impl ProjectorForm {
    /// Evaluates the form on a probability table.
    pub fn evaluate_table(&self, t: &ProbabilityTable) -> Result<f64> {
        t.validate()?;
        let mut v = self.constant;
        for x in 0..3 {
            // p(a=1|x) averaged over y (exact for NS tables).
            let pa: f64 = (0..3).map(|y| t.p[x][y][0][0] + t.p[x][y][0][1]).sum::<f64>() / 3.0;
            v += self.marg_a[x] * pa;
        }
        for y in 0..3 {
            let pb: f64 = (0..3).map(|x| t.p[x][y][0][0] + t.p[x][y][1][0]).sum::<f64>() / 3.0;
            v += self.marg_b[y] * pb;
        }
        for x in 0..3 {
            for y in 0..3 {
                v += self.prod[x][y] * t.p[x][y][0][0];
            }
        }
        Ok(v)
    }
}

/// The projector form of the I3322 member `(1, 1, 1)`:
///
/// ```text
/// 4 - p(1|A2) - p(1|B1) - 2 p(1|B2)
///   + sum_{x,y in {1,2}} p(11|xy)
///   - p(11|13) + p(11|23) - p(11|31) + p(11|32)
/// ```
///
/// For any table `t` with behavior `b`, writing `g` for the relabeling that
/// swaps `A1<->A2` and `B1<->B2` and negates `A3, B1, B2`:
///
/// ```text
/// 4 * value(t) - 12 = evaluate_flipped((1,1,1), g(b))
///                   = evaluate((1,1,1), b with A3 -> -A3, B3 -> -B3)
/// ```
pub fn to_projector_form(params: &FunctionalParams) -> Result<ProjectorForm> {
    let is_i3322 = params.alpha2 == 1 && params.alpha1 == 1.0 && params.alpha3 == 1.0;
    if !is_i3322 {
        return Err(Error::Unsupported(
            "projector form is defined for the I3322 member (1, 1, 1) only".into(),
        ));
    }
    let mut prod = [[0.0; 3]; 3];
    for x in 0..2 {
        for y in 0..2 {
            prod[x][y] = 1.0;
        }
    }
    prod[0][2] = -1.0;
    prod[1][2] = 1.0;
    prod[2][0] = -1.0;
    prod[2][1] = 1.0;
    Ok(ProjectorForm {
        constant: 4.0,
        marg_a: [0.0, -1.0, 0.0],
        marg_b: [-1.0, -2.0, 0.0],
        prod,
    })
}

/// The behavior relabeling linking the projector form to the flipped
/// representation: swap `A1<->A2`, swap `B1<->B2`, negate `A3`, `B1`, `B2`.
pub fn projector_form_relabel(b: &Behavior) -> Behavior {
    let swapped = SignFlip { swap_a12: true, swap_b12: true, flip_a3: true, ..SignFlip::default() }
        .apply(b);
    let mut out = swapped;
    out.marg_b[0] = -swapped.marg_b[0];
    out.marg_b[1] = -swapped.marg_b[1];
    for x in 0..3 {
        out.corr[x][0] = -swapped.corr[x][0];
        out.corr[x][1] = -swapped.corr[x][1];
    }
    out
}
