//! Classical, no-signalling, and quantum values for a three-parameter family of
//! I3322-like Bell functionals.
//!
//! The family is indexed by `(alpha1, alpha2, alpha3)` with `alpha2 ∈ {0, 1}`
//! and acts on two-party boxes with three binary-outcome settings per side:
//!
//! ```text
//! beta = alpha1 [ <A1> + <A2> + (-1)^alpha2 (<B1> + <B2>) ]
//!      + <A1B1> + <A1B2> + <A2B1> + <A2B2>
//!      + alpha3 [ <A3B1> - <A3B2> + <A1B3> - <A2B3> ]
//! ```
//!
//! The crate computes the local and no-signalling values in closed form and by
//! independent oracles (strategy enumeration, LP over the no-signalling
//! polytope), the exact two-qubit quantum value and sum-of-squares certificate
//! on the branch where it is known, and numerical bounds elsewhere: see-saw
//! lower bounds, NPA moment-hierarchy upper bounds via an in-crate SDP solver,
//! and high-dimensional lower bounds from a banded realization ladder.
//!
//! Entry points by task:
//! - [`functional`]: the family itself, behaviors, symmetries, the projector
//!   (Collins-Gisin style) form of the I3322 member.
//! - [`bounds`]: local and no-signalling values, region classification.
//! - [`quantum`]: exact branch values, realizations, SOS certificates.
//! - [`seesaw`]: alternating optimization over states and observables.
//! - [`npa`]: moment-matrix relaxations at levels 1, 1+AB, 2, 3.
//! - [`pv`]: banded high-dimensional realizations and the dimension ladder.
//! - [`sweep`]: grid sweeps over the parameter plane and CSV/JSON reporting.

pub mod bounds;
pub mod functional;
pub mod linalg;
pub mod npa;
pub mod optim;
pub mod pv;
pub mod quantum;
pub mod seesaw;
pub mod sweep;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Operation defined only for a subfamily (e.g. the I3322 member).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative solver failed to reach its target accuracy.
    #[error("solver failure: {0}")]
    Solver(String),
    /// A linear program has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A linear program is unbounded in the optimization direction.
    #[error("unbounded: {0}")]
    Unbounded(String),
    /// Malformed artifact (CSV/JSON) content.
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Mixes a base seed with task indices into an independent stream seed
/// (splitmix64 chain), so parallel trials and sweep nodes draw reproducible,
/// decorrelated randomness regardless of scheduling.
pub(crate) fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = base ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        h ^= h >> 30;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}
