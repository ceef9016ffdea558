//! Dense primal-dual interior-point SDP solver.
//!
//! Solves `maximize c·y subject to S(y) = M0 + sum_i y_i M_i ⪰ 0` by a
//! path-following method with Nesterov-Todd scaling and a Mehrotra
//! predictor-corrector step, factoring the dense K×K Schur complement each
//! iteration. Designed for moment-matrix relaxations: `m` up to ~200 and a
//! few thousand sparse constraint blocks.
//!
//! In textbook terms this is the dual side of the pair
//!
//! ```text
//! (P) min <C, X>  s.t. <A_i, X> = b_i, X ⪰ 0
//! (D) max b·y     s.t. sum_i y_i A_i + S = C, S ⪰ 0
//! ```
//!
//! with `A_i = -M_i`, `C = M0`, `b = c`. The primal variable `X` doubles as
//! the certificate: any feasible `y` satisfies
//! `c·y = <M0 - S(y), X> <= <M0, X>` whenever `X ⪰ 0` and `<M_i, X> = -c_i`.

use nalgebra::{DMatrix, DVector, Dyn};

use crate::{Error, Result};

/// Symmetric sparse matrix stored as upper-triangle entries `(r, c, v)` with
/// `r <= c`; the value at `(c, r)` is implied.
#[derive(Clone, Debug, Default)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// `<self, D>` for symmetric dense `D`, counting mirrored entries.
    pub fn dot(&self, d: &DMatrix<f64>) -> f64 {
        let mut s = 0.0;
        for &(r, c, v) in &self.entries {
            s += if r == c { v * d[(r, c)] } else { v * (d[(r, c)] + d[(c, r)]) };
        }
        s
    }

    /// Adds `scale * self` into a dense symmetric matrix.
    pub fn add_into(&self, target: &mut DMatrix<f64>, scale: f64) {
        for &(r, c, v) in &self.entries {
            target[(r, c)] += scale * v;
            if r != c {
                target[(c, r)] += scale * v;
            }
        }
    }

    pub fn to_dense(&self, m: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(m, m);
        self.add_into(&mut d, 1.0);
        d
    }
}

/// The SDP `maximize c·y s.t. M0 + sum y_i M_i ⪰ 0`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub m: usize,
    pub m0: DMatrix<f64>,
    pub blocks: Vec<SparseSym>,
    pub objective: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    /// Relative duality-gap and feasibility target.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iters: 150 }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Best dual objective `c·y` found.
    pub value: f64,
    pub y: Vec<f64>,
    /// Primal certificate `X ⪰ 0` with `<M_i, X> ≈ -c_i`.
    pub certificate: DMatrix<f64>,
    /// Certified upper bound `<M0, X>` on the optimum.
    pub certificate_bound: f64,
    /// Worst of relative gap and feasibility residuals at termination.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.len() != self.objective.len() {
            return Err(Error::Domain("SDP needs K >= 1 blocks matching the objective".into()));
        }
        if self.m0.nrows() != self.m || self.m0.ncols() != self.m {
            return Err(Error::Domain("M0 dimension mismatch".into()));
        }
        let asym = (&self.m0 - self.m0.transpose()).abs().max();
        if asym > 1e-14 {
            return Err(Error::Domain(format!("M0 not symmetric: {asym:.2e}")));
        }
        for b in &self.blocks {
            for &(r, c, v) in &b.entries {
                if r > c || c >= self.m || !v.is_finite() {
                    return Err(Error::Domain("constraint block entry out of range".into()));
                }
            }
        }
        Ok(())
    }

    /// Writes the instance as text, one line per nonzero: `i row col value`
    /// with `i = 0` for `M0` and `i >= 1` for the blocks; objective lines are
    /// prefixed `obj i value`.
    pub fn dump(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "# m = {}, K = {}", self.m, self.blocks.len())?;
        for (i, v) in self.objective.iter().enumerate() {
            writeln!(w, "obj {} {v:.17e}", i + 1)?;
        }
        for r in 0..self.m {
            for c in r..self.m {
                let v = self.m0[(r, c)];
                if v != 0.0 {
                    writeln!(w, "0 {r} {c} {v:.17e}")?;
                }
            }
        }
        for (i, b) in self.blocks.iter().enumerate() {
            for &(r, c, v) in &b.entries {
                writeln!(w, "{} {r} {c} {v:.17e}", i + 1)?;
            }
        }
        Ok(())
    }
}

/// Largest `alpha <= 1` with `P + alpha * dP ⪰ 0`, for `P ≻ 0`.
fn max_step(p: &DMatrix<f64>, dp: &DMatrix<f64>) -> f64 {
    let Some(chol) = p.clone().cholesky() else {
        return 0.0;
    };
    let l = chol.l();
    // P + a dP ⪰ 0  <=>  I + a Y ⪰ 0 with Y = L^-1 dP L^-T.
    let Some(z) = l.solve_lower_triangular(dp) else {
        return 0.0;
    };
    let Some(yt) = l.solve_lower_triangular(&z.transpose()) else {
        return 0.0;
    };
    let y = (&yt + yt.transpose()) * 0.5;
    let lam_min = y.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lam_min >= -1e-13 {
        1.0
    } else {
        (-1.0 / lam_min).clamp(0.0, 1.0)
    }
}

/// Solves the SDP with default options.
pub fn solve_sdp(p: &SdpProblem) -> Result<SdpSolution> {
    solve_sdp_with(p, &SdpOptions::default())
}

pub fn solve_sdp_with(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let m = p.m;
    let k = p.blocks.len();
    // Standard form A_i = -M_i, C = M0, b = c.
    let a: Vec<SparseSym> = p
        .blocks
        .iter()
        .map(|b| SparseSym { entries: b.entries.iter().map(|&(r, c, v)| (r, c, -v)).collect() })
        .collect();
    let c_mat = p.m0.clone();
    let b = p.objective.clone();

    let scale = 1.0 + c_mat.abs().max().max(b.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())));
    let mut x = DMatrix::<f64>::identity(m, m) * scale;
    let mut s = DMatrix::<f64>::identity(m, m) * scale;
    let mut y = vec![0.0; k];

    let norm_b = 1.0 + b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = 1.0 + c_mat.norm();

    let mut best: Option<SdpSolution> = None;
    let mut best_iter = 0;
    for iter in 0..opts.max_iters {
        let mut rp = vec![0.0; k];
        for i in 0..k {
            rp[i] = b[i] - a[i].dot(&x);
        }
        let mut rd = &c_mat - &s;
        for i in 0..k {
            a[i].add_into(&mut rd, -y[i]);
        }
        let gap_inner = (&x * &s).trace();
        let mu = gap_inner / m as f64;
        let obj_d: f64 = b.iter().zip(&y).map(|(u, v)| u * v).sum();
        let obj_p = (&c_mat * &x).trace();
        let rel_gap = (obj_p - obj_d).abs() / (1.0 + obj_p.abs() + obj_d.abs());
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b;
        let dinf = rd.norm() / norm_c;

        let current = SdpSolution {
            value: obj_d,
            y: y.clone(),
            certificate: x.clone(),
            certificate_bound: obj_p,
            gap: rel_gap.max(pinf).max(dinf),
            iterations: iter,
            converged: rel_gap < opts.tol && pinf < opts.tol && dinf < opts.tol,
        };
        if best.as_ref().map_or(true, |prev| current.gap < prev.gap) {
            best = Some(current.clone());
            best_iter = iter;
        }
        if current.converged {
            return Ok(current);
        }
        // Numerical noise floor reached: the gap has stopped improving.
        if iter - best_iter > 25 {
            break;
        }

        // Nesterov-Todd scaling point W = G Gᵀ with W S W = X. If an iterate
        // loses positive definiteness to rounding, stop and report the best
        // iterate found (its gap field says how good it is).
        let Some(x_chol) = x.clone().cholesky() else {
            break;
        };
        let lx = x_chol.l();
        let Some(s_chol) = s.clone().cholesky() else {
            break;
        };
        let ls = s_chol.l();
        let s_inv = s_chol.inverse();
        let svd = (ls.transpose() * &lx).svd(true, true);
        let v_t = svd.v_t.as_ref().expect("svd requested with vectors");
        let mut g = &lx * v_t.transpose();
        for j in 0..m {
            let d = svd.singular_values[j].max(1e-300).sqrt();
            for i in 0..m {
                g[(i, j)] /= d;
            }
        }
        let w = &g * g.transpose();

        // Schur complement H[i][j] = <A_i, W A_j W>, built from sparse outer
        // products of W's columns.
        let mut h = DMatrix::<f64>::zeros(k, k);
        let mut t_j = DMatrix::<f64>::zeros(m, m);
        for j in 0..k {
            t_j.fill(0.0);
            for &(r, c, v) in &a[j].entries {
                if r == c {
                    for bi in 0..m {
                        let f = v * w[(bi, r)];
                        for bj in 0..m {
                            t_j[(bi, bj)] += f * w[(bj, c)];
                        }
                    }
                } else {
                    for bi in 0..m {
                        let f1 = v * w[(bi, r)];
                        let f2 = v * w[(bi, c)];
                        for bj in 0..m {
                            t_j[(bi, bj)] += f1 * w[(bj, c)] + f2 * w[(bj, r)];
                        }
                    }
                }
            }
            for i in 0..=j {
                h[(i, j)] = a[i].dot(&t_j);
                h[(j, i)] = h[(i, j)];
            }
        }

        // Jacobi-scale H to unit diagonal before factoring: the Schur
        // complement's condition number blows up like 1/mu^2, and the solve
        // accuracy directly limits how far the gap can close.
        let mut d = DVector::<f64>::from_element(k, 1.0);
        for i in 0..k {
            d[i] = 1.0 / h[(i, i)].abs().max(1e-300).sqrt();
        }
        let mut hs = DMatrix::<f64>::zeros(k, k);
        for j in 0..k {
            for i in 0..k {
                hs[(i, j)] = h[(i, j)] * d[i] * d[j];
            }
        }
        let mut bump = 1e-14;
        let h_chol: Option<nalgebra::Cholesky<f64, Dyn>> = loop {
            match hs.clone().cholesky() {
                Some(chol) => break Some(chol),
                None => {
                    for i in 0..k {
                        hs[(i, i)] += bump;
                    }
                    bump *= 100.0;
                    if bump > 1e-2 {
                        break None;
                    }
                }
            }
        };
        // A hopelessly ill-conditioned Schur complement means the iterates
        // cannot be refined further; settle for the best point so far.
        let Some(h_chol) = h_chol else {
            break;
        };
        // Solve H z = rhs through the scaled factorization, with two rounds
        // of iterative refinement against the unmodified H (this also undoes
        // any diagonal ridge the factorization needed).
        let solve_h = |rhs: &DVector<f64>| -> DVector<f64> {
            let mut z = h_chol.solve(&rhs.component_mul(&d)).component_mul(&d);
            for _ in 0..2 {
                let r = rhs - &h * &z;
                z += h_chol.solve(&r.component_mul(&d)).component_mul(&d);
            }
            z
        };

        let w_rd_w = &w * &rd * &w;
        let solve_dir = |rc: &DMatrix<f64>| -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>) {
            let mut rhs = DVector::<f64>::zeros(k);
            for i in 0..k {
                rhs[i] = rp[i] - a[i].dot(rc) + a[i].dot(&w_rd_w);
            }
            let dy = solve_h(&rhs);
            let mut ds = rd.clone();
            for i in 0..k {
                a[i].add_into(&mut ds, -dy[i]);
            }
            let dx = rc - &w * &ds * &w;
            let dx = (&dx + dx.transpose()) * 0.5;
            (dy, dx, ds)
        };

        // Predictor: pure affine direction (sigma = 0).
        let rc_aff = -&x;
        let (_, dx_aff, ds_aff) = solve_dir(&rc_aff);
        let ap_aff = max_step(&x, &dx_aff);
        let ad_aff = max_step(&s, &ds_aff);
        let gap_aff = ((&x + &dx_aff * ap_aff) * (&s + &ds_aff * ad_aff)).trace();
        let sigma = (gap_aff / gap_inner).clamp(0.0, 1.0).powi(3);

        // Centered corrector step. Mehrotra's second-order cross term is
        // deliberately omitted: its crude symmetrization points the corrector
        // outside the cone on degenerate moment relaxations and the step
        // lengths collapse; the sigma heuristic alone converges robustly.
        let rc = &s_inv * (sigma * mu) - &x;
        let rc = (&rc + rc.transpose()) * 0.5;
        let (dy, dx, ds) = solve_dir(&rc);

        let tau = 0.98;
        let ap = tau * max_step(&x, &dx);
        let ad = tau * max_step(&s, &ds);
        if ap < 1e-10 && ad < 1e-10 {
            break;
        }
        x += &dx * ap;
        s += &ds * ad;
        for i in 0..k {
            y[i] += ad * dy[i];
        }
        x = (&x + x.transpose()) * 0.5;
        s = (&s + s.transpose()) * 0.5;
    }
    best.ok_or_else(|| Error::Solver("SDP made no progress".into()))
}
