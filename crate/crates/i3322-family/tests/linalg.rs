//! The complex Hermitian eigensolver behind `sign_involution` and
//! `top_eigenpair`, including the degenerate spectra that break a naive
//! QR-based decomposition.

use i3322_family::linalg::{
    expectation, fro_norm, hermitian_eigen, random_hermitian, sign_involution,
    spectral_norm_hermitian, top_eigenpair, CMat,
};
use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reconstruction_error(c: &CMat) -> f64 {
    let (values, q) = hermitian_eigen(c);
    let n = c.nrows();
    let mut rec = CMat::zeros(n, n);
    for k in 0..n {
        let col = q.column(k);
        for i in 0..n {
            for j in 0..n {
                rec[(i, j)] += col[i] * col[j].conj() * Complex::new(values[k], 0.0);
            }
        }
    }
    fro_norm(&(c - rec))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let m = random_hermitian(rng, n) + random_hermitian(rng, n) * Complex::new(0.0, 1.0);
    m.qr().q()
}

fn with_spectrum(rng: &mut ChaCha8Rng, spec: &[f64]) -> CMat {
    let n = spec.len();
    let q = random_unitary(rng, n);
    let mut d = CMat::zeros(n, n);
    for (k, &v) in spec.iter().enumerate() {
        d[(k, k)] = Complex::new(v, 0.0);
    }
    &q * d * q.adjoint()
}

#[test]
fn eigen_reconstructs_generic_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1usize, 2, 3, 4, 6, 9, 16] {
        for _ in 0..40 {
            let h = random_hermitian(&mut rng, n);
            let err = reconstruction_error(&h);
            assert!(err < 1e-12, "n = {n}: reconstruction error {err}");
            let (values, q) = hermitian_eigen(&h);
            // Ascending order and unitary eigenvectors.
            for w in values.windows(2) {
                assert!(w[0] <= w[1]);
            }
            let unit = fro_norm(&(q.adjoint() * &q - CMat::identity(n, n)));
            assert!(unit < 1e-13, "n = {n}: unitarity error {unit}");
        }
    }
}

#[test]
fn eigen_handles_degenerate_spectra() {
    // Spectra with repeated or near-zero eigenvalue pairs — the cases the
    // see-saw contractions produce (rank-deficient partial traces, clustered
    // involution eigenvalues).
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let specs: [&[f64]; 6] = [
        &[1.586e-5, -2.0, 0.0],
        &[1.0, 1.0, -1.0],
        &[1e-8, -1e-8, 2.0],
        &[3.0, 3.0, 3.0 + 1e-9],
        &[1.0, 1.0, 1.0, -1.0],
        &[0.0, 0.0, 0.0, 2.0],
    ];
    for spec in specs {
        for _ in 0..60 {
            let c = with_spectrum(&mut rng, spec);
            let err = reconstruction_error(&c);
            assert!(err < 1e-12, "spectrum {spec:?}: reconstruction error {err}");
            let (values, _) = hermitian_eigen(&c);
            let mut expected = spec.to_vec();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in values.iter().zip(&expected) {
                assert!((got - want).abs() < 1e-12, "spectrum {spec:?}: {values:?}");
            }
        }
    }
}

#[test]
fn sign_involution_maximizes_linear_pairing() {
    // Tr(C * sign(C)) = sum |lambda_i|, the maximum of Tr(C * B) over
    // Hermitian involutions B — including on degenerate inputs.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in [&[1.586e-5, -2.0, 0.0][..], &[1.0, 1.0, -1.0], &[2.0, -0.5, 0.3]] {
        for _ in 0..40 {
            let c = with_spectrum(&mut rng, spec);
            let s = sign_involution(&c, 1e-12);
            // s is an involution.
            let inv_err = fro_norm(&(&s * &s - CMat::identity(c.nrows(), c.nrows())));
            assert!(inv_err < 1e-12, "involution error {inv_err}");
            let attained = (&c * &s).trace().re;
            let bound: f64 = spec.iter().map(|v| v.abs()).sum();
            assert!(
                (attained - bound).abs() < 1e-10,
                "spectrum {spec:?}: attained {attained}, bound {bound}"
            );
        }
    }
}

#[test]
fn top_eigenpair_is_the_rayleigh_maximizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [2usize, 3, 5, 8] {
        for _ in 0..30 {
            let h = random_hermitian(&mut rng, n);
            let (lam, psi) = top_eigenpair(&h);
            assert!(((&h * &psi) - &psi * Complex::new(lam, 0.0)).norm() < 1e-12);
            assert!((expectation(&h, &psi) - lam).abs() < 1e-12);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            // No larger eigenvalue exists.
            assert!(spectral_norm_hermitian(&h) >= lam - 1e-12);
            let (values, _) = hermitian_eigen(&h);
            assert!((values.last().unwrap() - lam).abs() < 1e-13);
        }
    }
}
