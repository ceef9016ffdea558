//! Exact quantum values, optimal realizations, and operator certificates.
//!
//! For the `alpha2 = 0` branch the quantum value is known in closed form.
//! With `gamma^2 = (alpha3^2 - alpha1^2)/2 > 0` the number
//!
//! ```text
//! nu = 2 (gamma^2 + alpha3^2 / gamma^2)
//! ```
//!
//! upper-bounds the quantum value because `nu I - W` is a sum of three
//! squares of Hermitian polynomials in the observables — an algebraic
//! identity valid for every projective realization. The bound is attained by
//! a one-parameter family of two-qubit realizations built from a partially
//! entangled state `cos(phi/2)|00> + sin(phi/2)|11>` and observables at angle
//! `theta` about `sigma_z`, with a free angle `mu` rotating the third
//! measurements in the equatorial plane. Where the attainability conditions
//! fail the quantum value collapses to the local value (`4 (alpha1 + 1)`
//! above the `1 + alpha1 = sqrt(alpha3^2 + 1)` curve, `4 alpha3` below the
//! `alpha1 = sqrt(alpha3 (alpha3 - 2))` curve for `alpha3 > 2`).
//!
//! For `alpha2 = 1` two closed-form families are provided: a maximally
//! entangled two-qubit realization reaching `4 + alpha3^2` in the triangle
//! `alpha1 + alpha3 <= 2`, and the best realization with one trivial
//! measurement per side, whose value reduces to a one-dimensional concave-ish
//! maximization solved here numerically to machine precision.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::functional::{evaluate_unchecked, Behavior, FunctionalParams};
use crate::linalg::{
    expectation, fro_norm, hermiticity_error, kron, pauli_combo, sigma_x, sigma_z,
    spectral_norm_hermitian, CMat, CVec,
};
use crate::{Error, Result};

/// Hermiticity / state-normalization tolerance for realizations.
pub const HERM_TOL: f64 = 1e-12;
/// Tolerance for the projectivity check `O^2 = I`.
pub const PROJ_TOL: f64 = 1e-10;

/// A finite-dimensional quantum realization: three ±1-valued observables per
/// side and a pure state on the joint space.
#[derive(Clone, Debug)]
pub struct Realization {
    pub d_a: usize,
    pub d_b: usize,
    pub a: [CMat; 3],
    pub b: [CMat; 3],
    /// Unit vector in `C^{d_a * d_b}`, Alice-major ordering.
    pub state: CVec,
}

/// Serde bridge: dimensions, row-major matrices as `[re, im]` pairs, state.
#[derive(Serialize, Deserialize)]
struct RealizationJson {
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[f64; 2]>>,
    state: Vec<[f64; 2]>,
}

fn mat_to_rows(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

fn mat_from_rows(d: usize, rows: &[[f64; 2]]) -> Result<CMat> {
    if rows.len() != d * d {
        return Err(Error::Malformed(format!("expected {} matrix entries, got {}", d * d, rows.len())));
    }
    Ok(CMat::from_fn(d, d, |r, c| Complex::new(rows[r * d + c][0], rows[r * d + c][1])))
}

impl From<&Realization> for RealizationJson {
    fn from(r: &Realization) -> Self {
        Self {
            d_a: r.d_a,
            d_b: r.d_b,
            a: r.a.iter().map(mat_to_rows).collect(),
            b: r.b.iter().map(mat_to_rows).collect(),
            state: r.state.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Serialize for Realization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RealizationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Realization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RealizationJson::deserialize(d)?;
        Realization::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<RealizationJson> for Realization {
    type Error = Error;

    fn try_from(j: RealizationJson) -> Result<Self> {
        if j.a.len() != 3 || j.b.len() != 3 {
            return Err(Error::Malformed("expected three observables per side".into()));
        }
        if j.state.len() != j.d_a * j.d_b {
            return Err(Error::Malformed("state length must be dA*dB".into()));
        }
        let mut a_ops = Vec::new();
        let mut b_ops = Vec::new();
        for m in &j.a {
            a_ops.push(mat_from_rows(j.d_a, m)?);
        }
        for m in &j.b {
            b_ops.push(mat_from_rows(j.d_b, m)?);
        }
        let state = CVec::from_iterator(j.state.len(), j.state.iter().map(|p| Complex::new(p[0], p[1])));
        let r = Realization {
            d_a: j.d_a,
            d_b: j.d_b,
            a: a_ops.try_into().expect("length checked"),
            b: b_ops.try_into().expect("length checked"),
            state,
        };
        r.validate()?;
        Ok(r)
    }
}

impl Realization {
    /// Checks dimensions, Hermiticity (1e-12), `‖O‖ <= 1 + 1e-12`, and state
    /// normalization (1e-12).
    pub fn validate(&self) -> Result<()> {
        if self.d_a == 0 || self.d_b == 0 {
            return Err(Error::Domain("realization dimensions must be positive".into()));
        }
        if self.state.len() != self.d_a * self.d_b {
            return Err(Error::Domain(format!(
                "state has length {}, expected dA*dB = {}",
                self.state.len(),
                self.d_a * self.d_b
            )));
        }
        for (side, d, ops) in [("A", self.d_a, &self.a), ("B", self.d_b, &self.b)] {
            for (i, op) in ops.iter().enumerate() {
                if op.nrows() != d || op.ncols() != d {
                    return Err(Error::Domain(format!("{side}{} has wrong dimensions", i + 1)));
                }
                if hermiticity_error(op) > HERM_TOL {
                    return Err(Error::Domain(format!("{side}{} is not Hermitian", i + 1)));
                }
                if spectral_norm_hermitian(op) > 1.0 + HERM_TOL {
                    return Err(Error::Domain(format!("{side}{} has norm above one", i + 1)));
                }
            }
        }
        if (self.state.norm() - 1.0).abs() > HERM_TOL {
            return Err(Error::Domain("state is not normalized".into()));
        }
        Ok(())
    }

    /// Largest violation of `O^2 = I` across the six observables.
    pub fn projectivity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (d, ops) in [(self.d_a, &self.a), (self.d_b, &self.b)] {
            let eye = CMat::identity(d, d);
            for op in ops.iter() {
                worst = worst.max(fro_norm(&(op * op - &eye)));
            }
        }
        worst
    }

    /// Whether all observables square to the identity within [`PROJ_TOL`].
    pub fn is_projective(&self) -> bool {
        self.projectivity_error() <= PROJ_TOL
    }

    /// Marginals and correlators of the state under the observables.
    pub fn behavior(&self) -> Behavior {
        let eye_a = CMat::identity(self.d_a, self.d_a);
        let eye_b = CMat::identity(self.d_b, self.d_b);
        let mut beh = Behavior::zero();
        for x in 0..3 {
            beh.marg_a[x] = expectation(&kron(&self.a[x], &eye_b), &self.state);
            beh.marg_b[x] = expectation(&kron(&eye_a, &self.b[x]), &self.state);
            for y in 0..3 {
                beh.corr[x][y] = expectation(&kron(&self.a[x], &self.b[y]), &self.state);
            }
        }
        beh
    }
}

/// Assembles the Bell operator whose expectation reproduces
/// [`evaluate`](crate::functional::evaluate) on the realization's behavior:
///
/// ```text
/// W = alpha1 [ (A1+A2)⊗1 + (-1)^alpha2 1⊗(B1+B2) ]
///   + (A1+A2)⊗(B1+B2)
///   + alpha3 [ (A1-A2)⊗B3 + A3⊗(B1-B2) ]
/// ```
pub fn bell_operator(params: &FunctionalParams, r: &Realization) -> Result<CMat> {
    r.validate()?;
    let sa = &r.a[0] + &r.a[1];
    let da = &r.a[0] - &r.a[1];
    let sb = &r.b[0] + &r.b[1];
    let db = &r.b[0] - &r.b[1];
    let eye_a = CMat::identity(r.d_a, r.d_a);
    let eye_b = CMat::identity(r.d_b, r.d_b);
    let c = |v: f64| Complex::new(v, 0.0);
    let w = kron(&sa, &eye_b) * c(params.alpha1)
        + kron(&eye_a, &sb) * c(params.alpha1 * params.b_sign())
        + kron(&sa, &sb)
        + (kron(&da, &r.b[2]) + kron(&r.a[2], &db)) * c(params.alpha3);
    Ok(w)
}

/// The `alpha2 = 1` Bell operator in the block-negated form obtained by
/// relabelling `B1 -> -B2`, `B2 -> -B1`: marginal terms add on both sides
/// while the block enters with a minus sign. Its expectation reproduces
/// [`evaluate_flipped`](crate::functional::evaluate_flipped).
pub fn bell_operator_flipped(params: &FunctionalParams, r: &Realization) -> Result<CMat> {
    if params.alpha2 != 1 {
        return Err(Error::Unsupported("the flipped operator form exists only for alpha2 = 1".into()));
    }
    r.validate()?;
    let sa = &r.a[0] + &r.a[1];
    let da = &r.a[0] - &r.a[1];
    let sb = &r.b[0] + &r.b[1];
    let db = &r.b[0] - &r.b[1];
    let eye_a = CMat::identity(r.d_a, r.d_a);
    let eye_b = CMat::identity(r.d_b, r.d_b);
    let c = |v: f64| Complex::new(v, 0.0);
    let w = (kron(&sa, &eye_b) + kron(&eye_a, &sb)) * c(params.alpha1) - kron(&sa, &sb)
        + (kron(&da, &r.b[2]) + kron(&r.a[2], &db)) * c(params.alpha3);
    Ok(w)
}

/// Which closed-form regime determines the `alpha2 = 0` quantum value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchZeroRegime {
    /// `nu = 2 (gamma^2 + alpha3^2/gamma^2)` attained by an entangled
    /// two-qubit family.
    Entangled,
    /// Quantum equals local `4 (alpha1 + 1)`; product state suffices.
    MarginalAligned,
    /// `alpha3 > 2` with `alpha1 < sqrt(alpha3 (alpha3 - 2))`: quantum equals
    /// local `4 alpha3`, reached at the maximally entangled end of the family.
    CrossAligned,
}

/// Closed-form solution data for an `alpha2 = 0` member.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BranchZeroSolution {
    /// The quantum value.
    pub value: f64,
    pub regime: BranchZeroRegime,
    /// `(alpha3^2 - alpha1^2) / 2`; positive iff `alpha1 < alpha3`.
    pub gamma2: f64,
    /// `2 (gamma^2 + alpha3^2 / gamma^2)`; `NaN` when `gamma^2 <= 0`.
    pub nu: f64,
    /// Observable angle of the attaining two-qubit family, in `[0, pi/2]`.
    pub theta: f64,
    /// State angle (Schmidt weights `cos(phi/2), sin(phi/2)`), in `[0, pi]`.
    pub phi: f64,
    /// Representative third-measurement angle; every `mu` gives the same
    /// value, so the solution stores `0`.
    pub mu: f64,
    /// `1 + alpha1 - sqrt(alpha3^2 + 1)`; the entangled family exists iff
    /// this is `<= 0` (and, for `alpha3 > 2`, `alpha1` is not below the
    /// `sqrt(alpha3 (alpha3 - 2))` curve).
    pub f_value: f64,
}

fn require_branch0(params: &FunctionalParams) -> Result<()> {
    if params.alpha2 != 0 {
        return Err(Error::Unsupported("closed-form quantum value requires alpha2 = 0".into()));
    }
    Ok(())
}

/// Lower boundary of the entangled regime for `alpha3 > 2`, else `0`.
fn cross_curve(alpha3: f64) -> f64 {
    if alpha3 > 2.0 {
        (alpha3 * (alpha3 - 2.0)).sqrt()
    } else {
        0.0
    }
}

/// Exact quantum value of an `alpha2 = 0` member with the regime that
/// produced it.
pub fn quantum_value_branch0(params: &FunctionalParams) -> Result<BranchZeroSolution> {
    require_branch0(params)?;
    let (a1, a3) = (params.alpha1, params.alpha3);
    let gamma2 = 0.5 * (a3 * a3 - a1 * a1);
    let f_value = 1.0 + a1 - (a3 * a3 + 1.0).sqrt();
    let nu = if gamma2 > 0.0 { 2.0 * (gamma2 + a3 * a3 / gamma2) } else { f64::NAN };

    if a3 > 2.0 && a1 < cross_curve(a3) {
        return Ok(BranchZeroSolution {
            value: 4.0 * a3,
            regime: BranchZeroRegime::CrossAligned,
            gamma2,
            nu,
            theta: std::f64::consts::FRAC_PI_2,
            phi: std::f64::consts::FRAC_PI_2,
            mu: 0.0,
            f_value,
        });
    }
    if f_value <= 0.0 && gamma2 > 0.0 {
        let (theta, phi) = branch0_angles(a1, a3, gamma2);
        return Ok(BranchZeroSolution {
            value: nu,
            regime: BranchZeroRegime::Entangled,
            gamma2,
            nu,
            theta,
            phi,
            mu: 0.0,
            f_value,
        });
    }
    Ok(BranchZeroSolution {
        value: 4.0 * (a1 + 1.0),
        regime: BranchZeroRegime::MarginalAligned,
        gamma2,
        nu,
        theta: 0.0,
        phi: 0.0,
        mu: 0.0,
        f_value,
    })
}

/// Angles of the attaining family: `sin^2(theta) = (gamma^2 -
/// alpha1^2/gamma^2) / 2`, `cos(phi) = (alpha1/gamma^2) cos(theta)`,
/// `sin(phi) = (alpha3/gamma^2) sin(theta)`.
fn branch0_angles(a1: f64, a3: f64, gamma2: f64) -> (f64, f64) {
    let sin2 = (0.5 * (gamma2 - a1 * a1 / gamma2)).clamp(0.0, 1.0);
    let theta = sin2.sqrt().asin();
    let cos_phi = a1 / gamma2 * theta.cos();
    let sin_phi = a3 / gamma2 * theta.sin();
    let phi = sin_phi.atan2(cos_phi);
    (theta, phi)
}

/// Builds the two-qubit realization attaining the branch value at third-
/// measurement angle `mu`:
///
/// ```text
/// A1,A2 = cos(theta) sigma_z ± sin(theta) sigma_x
/// A3    = cos(mu) sigma_x + sin(mu) sigma_y
/// B1,B2 = cos(theta) sigma_z ± sin(theta) (cos(mu) sigma_x - sin(mu) sigma_y)
/// B3    = sigma_x
/// |Psi> = cos(phi/2)|00> + sin(phi/2)|11>
/// ```
pub fn optimal_realization_branch0(params: &FunctionalParams, mu: f64) -> Result<Realization> {
    require_branch0(params)?;
    let sol = quantum_value_branch0(params)?;
    match sol.regime {
        BranchZeroRegime::Entangled => {}
        BranchZeroRegime::MarginalAligned => {
            return Err(Error::Domain(format!(
                "no entangled optimal family: alpha1 <= sqrt(alpha3^2 + 1) - 1 is violated \
                 (f = {:.6} > 0)",
                sol.f_value
            )));
        }
        BranchZeroRegime::CrossAligned => {
            return Err(Error::Domain(format!(
                "no entangled optimal family: alpha1 >= sqrt(alpha3 (alpha3 - 2)) is violated \
                 ({} < {:.6})",
                params.alpha1,
                cross_curve(params.alpha3)
            )));
        }
    }
    Ok(two_qubit_model(sol.theta, sol.phi, mu))
}

/// The two-qubit model family at explicit angles (no optimality implied).
pub fn two_qubit_model(theta: f64, phi: f64, mu: f64) -> Realization {
    let (ct, st) = (theta.cos(), theta.sin());
    let (cm, sm) = (mu.cos(), mu.sin());
    let a1 = pauli_combo(st, 0.0, ct);
    let a2 = pauli_combo(-st, 0.0, ct);
    let a3 = pauli_combo(cm, sm, 0.0);
    let b1 = pauli_combo(st * cm, -st * sm, ct);
    let b2 = pauli_combo(-st * cm, st * sm, ct);
    let b3 = sigma_x();
    let half = 0.5 * phi;
    let mut state = CVec::zeros(4);
    state[0] = Complex::new(half.cos(), 0.0);
    state[3] = Complex::new(half.sin(), 0.0);
    Realization { d_a: 2, d_b: 2, a: [a1, a2, a3], b: [b1, b2, b3], state }
}

/// Closed-form behavior of the attaining family at angle `mu`.
///
/// Every entry is affine in `cos(mu)`, so the set of optimal points is a
/// line segment in behavior space. The marginals carry no `mu` dependence:
/// the Schmidt state has `<sigma_x> = <sigma_y> = 0` on each side, so the
/// equatorial components of the observables cannot contribute.
pub fn probability_point(params: &FunctionalParams, mu: f64) -> Result<Behavior> {
    require_branch0(params)?;
    let sol = quantum_value_branch0(params)?;
    if sol.regime != BranchZeroRegime::Entangled {
        return Err(Error::Domain("closed-form optimal points exist only in the entangled regime".into()));
    }
    Ok(model_behavior(sol.theta, sol.phi, mu))
}

/// Behavior of [`two_qubit_model`] in closed form.
pub fn model_behavior(theta: f64, phi: f64, mu: f64) -> Behavior {
    let (ct, st) = (theta.cos(), theta.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let cm = mu.cos();
    let marg = ct * cp;
    let mut beh = Behavior::zero();
    beh.marg_a = [marg, marg, 0.0];
    beh.marg_b = [marg, marg, 0.0];
    let same = ct * ct + st * st * sp * cm;
    let diff = ct * ct - st * st * sp * cm;
    let cross = st * sp;
    beh.corr = [
        [same, diff, cross],
        [diff, same, -cross],
        [cross, -cross, cm * sp],
    ];
    beh
}

/// The three sum-of-squares polynomials certifying `W ⪯ nu I` on projective
/// realizations, evaluated on the realization's observables. The third
/// polynomial carries a minus sign between the parties for `alpha2 = 0` and
/// a plus sign for the flipped `alpha2 = 1` form.
pub fn sos_polynomials(params: &FunctionalParams, r: &Realization) -> Result<[CMat; 3]> {
    r.validate()?;
    let (a1, a3) = (params.alpha1, params.alpha3);
    let gamma2 = 0.5 * (a3 * a3 - a1 * a1);
    if gamma2 <= 0.0 {
        return Err(Error::Domain(format!(
            "the certificate requires alpha1 < alpha3 (gamma^2 = {gamma2:.6} <= 0)"
        )));
    }
    if !r.is_projective() {
        return Err(Error::Domain("the certificate identity holds only for projective observables".into()));
    }
    let gamma = gamma2.sqrt();
    let sa = &r.a[0] + &r.a[1];
    let da = &r.a[0] - &r.a[1];
    let sb = &r.b[0] + &r.b[1];
    let db = &r.b[0] - &r.b[1];
    let eye_a = CMat::identity(r.d_a, r.d_a);
    let eye_b = CMat::identity(r.d_b, r.d_b);
    let eye = CMat::identity(r.d_a * r.d_b, r.d_a * r.d_b);
    let c = |v: f64| Complex::new(v, 0.0);
    let p1 = (kron(&sa, &eye_b) * c(a1) + kron(&da, &r.b[2]) * c(a3) - &eye * c(2.0 * gamma2))
        * c(0.5 / gamma);
    let p2 = (kron(&eye_a, &sb) * c(a1) + kron(&r.a[2], &db) * c(a3) - &eye * c(2.0 * gamma2))
        * c(0.5 / gamma);
    let sign = if params.alpha2 == 0 { -1.0 } else { 1.0 };
    let p3 = (kron(&sa, &eye_b) + kron(&eye_a, &sb) * c(sign)) * c(std::f64::consts::FRAC_1_SQRT_2);
    Ok([p1, p2, p3])
}

/// Frobenius norm of `nu I - W - sum_i P_i^2` for the realization: zero (to
/// rounding) for every projective realization, regardless of optimality.
/// Uses the direct operator for `alpha2 = 0` and the flipped one for
/// `alpha2 = 1`.
pub fn sos_residual(params: &FunctionalParams, r: &Realization) -> Result<f64> {
    let ps = sos_polynomials(params, r)?;
    let w = if params.alpha2 == 0 { bell_operator(params, r)? } else { bell_operator_flipped(params, r)? };
    let gamma2 = 0.5 * (params.alpha3 * params.alpha3 - params.alpha1 * params.alpha1);
    let nu = 2.0 * (gamma2 + params.alpha3 * params.alpha3 / gamma2);
    let d = r.d_a * r.d_b;
    let mut resid = CMat::identity(d, d) * Complex::new(nu, 0.0) - w;
    for p in &ps {
        resid -= p * p;
    }
    Ok(fro_norm(&resid))
}

/// Residuals of the operator relations characterizing optimal `alpha2 = 0`
/// realizations; all vanish on the attaining family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StructuralReport {
    /// Largest `‖O^2 - I‖_F`.
    pub projectivity: f64,
    /// `‖{A1, A2} - 2 (1 - gamma^2 + alpha1^2/gamma^2) I‖_F` (= `2 cos(2 theta) I`).
    pub anticommutator_a12: f64,
    pub anticommutator_b12: f64,
    /// `‖{A1 + A2, A3}‖_F`.
    pub anticommutator_a3: f64,
    pub anticommutator_b3: f64,
    /// `‖W|psi> - beta_Q |psi>‖`.
    pub eigen_equation: f64,
    /// `‖(A1+A2)⊗(B1+B2)|psi> - 4 cos^2(theta) |psi>‖`: the state is the
    /// eigenvector of the block product with its largest (positive)
    /// eigenvalue `‖A1+A2‖ ‖B1+B2‖ = 4 cos^2(theta)`.
    pub block_eigenvector: f64,
    /// `‖P_i|psi>‖` for the three certificate polynomials.
    pub sos_kernel: [f64; 3],
}

impl StructuralReport {
    /// Largest violation across all checks.
    pub fn max_violation(&self) -> f64 {
        let mut worst = self
            .projectivity
            .max(self.anticommutator_a12)
            .max(self.anticommutator_b12)
            .max(self.anticommutator_a3)
            .max(self.anticommutator_b3)
            .max(self.eigen_equation)
            .max(self.block_eigenvector);
        for v in self.sos_kernel {
            worst = worst.max(v);
        }
        worst
    }

    pub fn all_pass(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Verifies the operator relations a realization must satisfy to attain the
/// `alpha2 = 0` quantum value in the entangled regime.
pub fn structural_checks(params: &FunctionalParams, r: &Realization) -> Result<StructuralReport> {
    require_branch0(params)?;
    r.validate()?;
    let sol = quantum_value_branch0(params)?;
    if sol.regime != BranchZeroRegime::Entangled {
        return Err(Error::Domain("structural relations characterize the entangled regime only".into()));
    }
    let gamma2 = sol.gamma2;
    let a1 = params.alpha1;
    let cos2t = 1.0 - gamma2 + a1 * a1 / gamma2;

    let anti = |p: &CMat, q: &CMat| p * q + q * p;
    let eye_a = CMat::identity(r.d_a, r.d_a);
    let eye_b = CMat::identity(r.d_b, r.d_b);
    let c = |v: f64| Complex::new(v, 0.0);

    let sa = &r.a[0] + &r.a[1];
    let sb = &r.b[0] + &r.b[1];
    let anticommutator_a12 = fro_norm(&(anti(&r.a[0], &r.a[1]) - &eye_a * c(2.0 * cos2t)));
    let anticommutator_b12 = fro_norm(&(anti(&r.b[0], &r.b[1]) - &eye_b * c(2.0 * cos2t)));
    let anticommutator_a3 = fro_norm(&anti(&sa, &r.a[2]));
    let anticommutator_b3 = fro_norm(&anti(&sb, &r.b[2]));

    let w = bell_operator(params, r)?;
    let eigen_equation = (&w * &r.state - &r.state * c(sol.value)).norm();
    let block = kron(&sa, &sb);
    let block_eigval = 4.0 * (1.0 + cos2t) / 2.0;
    let block_eigenvector = (&block * &r.state - &r.state * c(block_eigval)).norm();

    let ps = sos_polynomials(params, r)?;
    let sos_kernel = [
        (&ps[0] * &r.state).norm(),
        (&ps[1] * &r.state).norm(),
        (&ps[2] * &r.state).norm(),
    ];

    Ok(StructuralReport {
        projectivity: r.projectivity_error(),
        anticommutator_a12,
        anticommutator_b12,
        anticommutator_a3,
        anticommutator_b3,
        eigen_equation,
        block_eigenvector,
        sos_kernel,
    })
}

/// Result of restricting one measurement per side to be trivial
/// (`alpha2 = 1`): the value reduces to a one-dimensional maximization over
/// the state angle `phi`.
#[derive(Clone, Debug)]
pub struct TrivialMeasurementSolution {
    pub value: f64,
    /// Maximizing state angle in `[0, pi]`.
    pub phi: f64,
    /// Induced observable angle `atan2(alpha3 sin(phi), (alpha1-1) cos(phi) - 1)`.
    pub theta: f64,
    /// `|d value / d phi|` at the reported maximizer.
    pub derivative_residual: f64,
    /// Two-qubit realization attaining the value, stated so that the plain
    /// (unflipped) functional evaluates to `value` on its behavior.
    pub realization: Realization,
}

/// The trivial-measurement objective at a fixed state angle `phi`; its
/// maximum over `[0, pi]` is [`trivial_measurement_value`]. At `phi = pi` it
/// degenerates to the product-strategy value `2 (alpha1 + alpha3)`.
pub fn trivial_objective_value(params: &FunctionalParams, phi: f64) -> Result<f64> {
    if params.alpha2 != 1 {
        return Err(Error::Unsupported("the trivial-measurement family exists for alpha2 = 1".into()));
    }
    Ok(trivial_objective(params.alpha1, params.alpha3, phi))
}

/// The one-dimensional objective: `alpha1 (1 + cos phi) + alpha3 (1 - cos
/// phi) + 2 sqrt(h)` with `h = ((alpha1-1) cos phi - 1)^2 + alpha3^2 sin^2
/// phi`.
fn trivial_objective(a1: f64, a3: f64, phi: f64) -> f64 {
    let (cp, sp) = (phi.cos(), phi.sin());
    let u = (a1 - 1.0) * cp - 1.0;
    let h = u * u + a3 * a3 * sp * sp;
    a1 * (1.0 + cp) + a3 * (1.0 - cp) + 2.0 * h.sqrt()
}

fn trivial_derivative(a1: f64, a3: f64, phi: f64) -> f64 {
    let (cp, sp) = (phi.cos(), phi.sin());
    let u = (a1 - 1.0) * cp - 1.0;
    let h = (u * u + a3 * a3 * sp * sp).max(1e-300);
    let hp = 2.0 * u * (-(a1 - 1.0) * sp) + 2.0 * a3 * a3 * sp * cp;
    (a3 - a1) * sp + hp / h.sqrt()
}

/// Maximizes the trivial-measurement value over the state angle and returns
/// the attaining realization.
pub fn trivial_measurement_value(params: &FunctionalParams) -> Result<TrivialMeasurementSolution> {
    if params.alpha2 != 1 {
        return Err(Error::Unsupported("the trivial-measurement family exists for alpha2 = 1".into()));
    }
    let (a1, a3) = (params.alpha1, params.alpha3);
    let f = |phi: f64| trivial_objective(a1, a3, phi);

    // Coarse scan (the objective need not be unimodal over the whole range),
    // then golden-section on the bracketing cell, then Newton polish.
    let n: usize = 512;
    let step = std::f64::consts::PI / n as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let v = f(i as f64 * step);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut lo = (best_i.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_i + 1).min(n)) as f64 * step;
    let inv_gold = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_gold * (hi - lo);
    let mut x2 = lo + inv_gold * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_gold * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_gold * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut phi = 0.5 * (lo + hi);
    // Newton polish on the stationarity condition; the derivative vanishes
    // at the endpoints too (a sin(phi) factor), so an endpoint maximum needs
    // no special casing.
    for _ in 0..60 {
        let g = trivial_derivative(a1, a3, phi);
        if g.abs() < 1e-14 {
            break;
        }
        let eps = 1e-6;
        let g2 = (trivial_derivative(a1, a3, phi + eps) - trivial_derivative(a1, a3, phi - eps)) / (2.0 * eps);
        if g2.abs() < 1e-14 {
            break;
        }
        let next = (phi - g / g2).clamp(0.0, std::f64::consts::PI);
        if (next - phi).abs() < 1e-15 {
            phi = next;
            break;
        }
        phi = next;
    }
    // Keep whichever candidate evaluates best (guards against a Newton step
    // drifting to a different stationary point).
    for cand in [0.0, std::f64::consts::PI, 0.5 * (lo + hi)] {
        if f(cand) > f(phi) {
            phi = cand;
        }
    }

    let value = f(phi);
    let (cp, sp) = (phi.cos(), phi.sin());
    let theta = (a3 * sp).atan2((a1 - 1.0) * cp - 1.0);
    let derivative_residual = trivial_derivative(a1, a3, phi).abs();

    // Observables with A1 and B3 trivial, stated in the flipped convention,
    // then converted (B1 -> -B2, B2 -> -B1) so the plain functional sees the
    // value directly.
    let (ct, st) = (theta.cos(), theta.sin());
    let a_ops = [CMat::identity(2, 2), sigma_z(), sigma_x()];
    let flipped_b1 = pauli_combo(st, 0.0, ct);
    let flipped_b2 = pauli_combo(-st, 0.0, ct);
    let b_ops = [-&flipped_b2, -&flipped_b1, CMat::identity(2, 2)];
    let half = 0.5 * phi;
    let mut state = CVec::zeros(4);
    state[0] = Complex::new(half.cos(), 0.0);
    state[3] = Complex::new(half.sin(), 0.0);
    let realization = Realization { d_a: 2, d_b: 2, a: a_ops, b: b_ops, state };

    Ok(TrivialMeasurementSolution { value, phi, theta, derivative_residual, realization })
}

/// Maximally entangled two-qubit realization attaining `4 + alpha3^2` for
/// `alpha2 = 1` members inside the triangle `alpha1 + alpha3 <= 2`:
/// both sides measure `cos(theta) sigma_z ± sin(theta) sigma_x` with
/// `sin(theta) = alpha3 / 2` plus `sigma_x`, on `(|00> + |11>)/sqrt(2)`;
/// all marginals vanish, so the marginal term contributes nothing.
pub fn triangular_region_realization(params: &FunctionalParams) -> Result<Realization> {
    if params.alpha2 != 1 {
        return Err(Error::Unsupported("the maximally entangled family targets alpha2 = 1".into()));
    }
    if params.alpha1 + params.alpha3 > 2.0 {
        return Err(Error::Domain(format!(
            "outside the triangle: alpha1 + alpha3 = {} > 2",
            params.alpha1 + params.alpha3
        )));
    }
    let st = params.alpha3 / 2.0;
    let ct = (1.0 - st * st).sqrt();
    let a1 = pauli_combo(st, 0.0, ct);
    let a2 = pauli_combo(-st, 0.0, ct);
    let mut state = CVec::zeros(4);
    state[0] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    state[3] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(Realization {
        d_a: 2,
        d_b: 2,
        a: [a1.clone(), a2.clone(), sigma_x()],
        b: [a1, a2, sigma_x()],
        state,
    })
}

/// Convenience: the value the triangular-region realization attains.
pub fn triangular_region_value(params: &FunctionalParams) -> Result<f64> {
    let r = triangular_region_realization(params)?;
    Ok(evaluate_unchecked(params, &r.behavior()))
}

