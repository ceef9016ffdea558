//! Complex linear-algebra helpers shared by the quantum modules.
//!
//! Observables are Hermitian matrices with spectrum in `[-1, 1]`; states are
//! unit vectors in the tensor-product space, stored with Alice's factor first
//! (`kron(A, B)` acts as `A ⊗ B`).

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// 2x2 identity.
pub fn id2() -> CMat {
    CMat::identity(2, 2)
}

/// Pauli X.
pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
}

/// Pauli Y.
pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)])
}

/// Pauli Z.
pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)])
}

/// Real linear combination `c_x σx + c_y σy + c_z σz`.
pub fn pauli_combo(c_x: f64, c_y: f64, c_z: f64) -> CMat {
    sigma_x() * C64::new(c_x, 0.0) + sigma_y() * C64::new(c_y, 0.0) + sigma_z() * C64::new(c_z, 0.0)
}

/// Largest deviation from Hermiticity, `max |M - M†|` entrywise.
pub fn hermiticity_error(m: &CMat) -> f64 {
    (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of `M`.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations:
/// eigenvalues ascending, eigenvectors as the matching columns of a unitary.
///
/// nalgebra's `symmetric_eigen` mispairs eigenvectors with eigenvalues on
/// complex Hermitian inputs whose spectrum contains a (near-)degenerate pair
/// — reconstruction errors of order one on matrices the see-saw contractions
/// produce routinely — so every complex eigendecomposition in the crate goes
/// through this solver instead. Jacobi applies exact 2x2 unitaries until the
/// off-diagonal mass is gone, which keeps the eigenvectors orthonormal to
/// machine precision regardless of spectral gaps.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut q = CMat::identity(n, n);
    let scale = fro_norm(&a).max(f64::MIN_POSITIVE);
    let target = 1e-15 * scale;
    for _sweep in 0..40 {
        let mut off2 = 0.0;
        for p in 0..n {
            for r in p + 1..n {
                off2 += 2.0 * a[(p, r)].norm_sqr();
            }
        }
        if off2.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let beta = a[(p, r)];
                let b = beta.norm();
                if b <= 1e-300 {
                    continue;
                }
                // Phase rotation making the pivot real, then a real Jacobi
                // rotation zeroing it: U = diag(1, e^{-i phi}) * G(theta).
                let phase = beta / C64::new(b, 0.0);
                let alpha = a[(p, p)].re;
                let gamma = a[(r, r)].re;
                let tau = (gamma - alpha) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u00 = C64::new(c, 0.0);
                let u01 = C64::new(s, 0.0);
                let u10 = phase.conj() * C64::new(-s, 0.0);
                let u11 = phase.conj() * C64::new(c, 0.0);
                for row in 0..n {
                    let (ap, ar) = (a[(row, p)], a[(row, r)]);
                    a[(row, p)] = ap * u00 + ar * u10;
                    a[(row, r)] = ap * u01 + ar * u11;
                    let (qp, qr) = (q[(row, p)], q[(row, r)]);
                    q[(row, p)] = qp * u00 + qr * u10;
                    q[(row, r)] = qp * u01 + qr * u11;
                }
                for col in 0..n {
                    let (ap, ar) = (a[(p, col)], a[(r, col)]);
                    a[(p, col)] = ap * u00.conj() + ar * u10.conj();
                    a[(r, col)] = ap * u01.conj() + ar * u11.conj();
                }
                a[(p, r)] = C64::new(0.0, 0.0);
                a[(r, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &q.column(src));
    }
    (values, vectors)
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
pub fn spectral_norm_hermitian(m: &CMat) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Eigenvector of a Hermitian matrix with the largest eigenvalue.
pub fn top_eigenpair(m: &CMat) -> (f64, CVec) {
    let (values, vectors) = hermitian_eigen(m);
    let best = values.len() - 1;
    (values[best], vectors.column(best).into_owned())
}

/// Maps a Hermitian matrix to the involution `sign(M)`: eigenvalues below
/// `-zero_tol` go to -1, all others (including near-zero) to +1, eigenvectors
/// kept. The near-zero rule is a deterministic tie-break.
pub fn sign_involution(m: &CMat, zero_tol: f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let mut out = CMat::zeros(m.nrows(), m.nrows());
    for (k, &v) in values.iter().enumerate() {
        let sign = if v < -zero_tol { -1.0 } else { 1.0 };
        let col = vectors.column(k);
        for i in 0..m.nrows() {
            for j in 0..m.nrows() {
                out[(i, j)] += col[i] * col[j].conj() * C64::new(sign, 0.0);
            }
        }
    }
    out
}

/// Real part of `<psi| M |psi>`.
pub fn expectation(m: &CMat, psi: &CVec) -> f64 {
    (psi.adjoint() * m * psi)[(0, 0)].re
}

/// `A ⊗ B` with Alice's factor first.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Partial trace over Bob's factor of `|psi><psi|` contracted with `1 ⊗ M`:
/// returns the `dA x dA` Hermitian matrix `X` with
/// `tr(X A) = <psi| A ⊗ M |psi>` for every `A`.
pub fn contract_bob(psi: &CVec, m: &CMat, d_a: usize, d_b: usize) -> CMat {
    let mut x = CMat::zeros(d_a, d_a);
    // <psi| A ⊗ M |psi> = sum_ij A[i,j] sum_kl conj(psi[i*dB+k]) M[k,l] psi[j*dB+l],
    // so the inner sum lands at X[j,i] to make the pairing a trace.
    for i in 0..d_a {
        for j in 0..d_a {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d_b {
                for l in 0..d_b {
                    s += psi[i * d_b + k].conj() * m[(k, l)] * psi[j * d_b + l];
                }
            }
            x[(j, i)] = s;
        }
    }
    x
}

/// Partial trace over Alice's factor: returns `Y` with
/// `tr(Y B) = <psi| M ⊗ B |psi>` for every `B`.
pub fn contract_alice(psi: &CVec, m: &CMat, d_a: usize, d_b: usize) -> CMat {
    let mut y = CMat::zeros(d_b, d_b);
    for k in 0..d_b {
        for l in 0..d_b {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d_a {
                for j in 0..d_a {
                    s += psi[i * d_b + k].conj() * m[(i, j)] * psi[j * d_b + l];
                }
            }
            y[(l, k)] = s;
        }
    }
    y
}

/// Random matrix from the Gaussian unitary ensemble (Hermitian).
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = C64::new(re, im);
        }
    }
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-random pure state of dimension `n`.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> CVec {
    let mut v = CVec::zeros(n);
    for i in 0..n {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        v[i] = C64::new(re, im);
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random projective ±1 observable (sign of a GUE matrix).
pub fn random_observable<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let h = random_hermitian(rng, n);
    sign_involution(&h, 1e-12)
}
