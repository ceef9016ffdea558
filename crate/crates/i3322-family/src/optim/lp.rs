//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Built for small polytopes (tens of variables); everything is a dense
//! tableau. Maximizes `c·x` subject to `A_eq x = b_eq` and box bounds.

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;

/// An equality-constrained LP with per-variable box bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    /// Maximized objective.
    pub objective: Vec<f64>,
    /// Equality rows; may contain redundant rows.
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    /// Lower bounds (finite).
    pub lower: Vec<f64>,
    /// Upper bounds; `f64::INFINITY` disables one.
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    fn check(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Domain("LP bound length mismatch".into()));
        }
        if self.a_eq.len() != self.b_eq.len() {
            return Err(Error::Domain("LP constraint length mismatch".into()));
        }
        for row in &self.a_eq {
            if row.len() != n {
                return Err(Error::Domain("LP row length mismatch".into()));
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(self.b_eq.iter())
            .chain(self.lower.iter())
            .chain(self.a_eq.iter().flatten())
            .all(|v| v.is_finite());
        if !finite || self.upper.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("LP entries must be finite".into()));
        }
        for i in 0..n {
            if !self.lower[i].is_finite() {
                return Err(Error::Domain("LP lower bounds must be finite".into()));
            }
            if self.upper[i] < self.lower[i] {
                return Err(Error::Infeasible(format!("empty box for variable {i}")));
            }
        }
        Ok(())
    }
}

/// Maximizes the LP; distinguishes infeasible from unbounded instances.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let n = lp.objective.len();

    // Shift to s = x - lower >= 0; finite uppers become slack rows.
    let mut obj = lp.objective.clone();
    let mut offset = 0.0;
    for i in 0..n {
        offset += lp.objective[i] * lp.lower[i];
    }
    let uppers: Vec<(usize, f64)> = (0..n)
        .filter(|&i| lp.upper[i].is_finite())
        .map(|i| (i, lp.upper[i] - lp.lower[i]))
        .collect();
    let n_slack = uppers.len();
    let m = lp.a_eq.len() + n_slack;
    let n_total = n + n_slack;
    obj.resize(n_total, 0.0);

    // rows: [A_eq | 0 | b'] then [e_i | I | u - l]
    let mut rows = vec![vec![0.0; n_total + 1]; m];
    for (r, row) in lp.a_eq.iter().enumerate() {
        rows[r][..n].copy_from_slice(row);
        let shift: f64 = (0..n).map(|i| row[i] * lp.lower[i]).sum();
        rows[r][n_total] = lp.b_eq[r] - shift;
    }
    for (k, &(i, cap)) in uppers.iter().enumerate() {
        let r = lp.a_eq.len() + k;
        rows[r][i] = 1.0;
        rows[r][n + k] = 1.0;
        rows[r][n_total] = cap;
    }
    for row in rows.iter_mut() {
        if row[n_total] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }

    let mut t = Tableau::new(rows, n_total);
    t.phase1()?;
    t.phase2(&obj)?;

    let s = t.primal_point();
    let mut x = vec![0.0; n];
    for i in 0..n {
        x[i] = lp.lower[i] + s[i];
    }
    let value = offset + (0..n).map(|i| lp.objective[i] * s[i]).sum::<f64>();
    Ok(LpSolution { value, x })
}

struct Tableau {
    /// `m x (n_all + 1)` rows, last column is the RHS (kept nonnegative).
    rows: Vec<Vec<f64>>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    /// Structural + slack variables (artificials live past this index).
    n_struct: usize,
    n_all: usize,
}

impl Tableau {
    fn new(rows: Vec<Vec<f64>>, n_struct: usize) -> Self {
        Self { rows: rows.clone(), basis: Vec::new(), n_struct, n_all: n_struct }
    }

    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.n_all]
    }

    /// Adds one artificial column per row and minimizes their sum.
    fn phase1(&mut self) -> Result<()> {
        let m = self.rows.len();
        self.n_all = self.n_struct + m;
        for (r, row) in self.rows.iter_mut().enumerate() {
            let rhs = row.pop().expect("rhs present");
            row.resize(self.n_struct + m, 0.0);
            row[self.n_struct + r] = 1.0;
            row.push(rhs);
            self.basis.push(self.n_struct + r);
        }
        // Reduced costs for minimizing the artificial sum, written as
        // maximizing its negation; artificials start basic.
        let mut cost = vec![0.0; self.n_all + 1];
        for j in 0..self.n_all {
            if j < self.n_struct {
                cost[j] = self.rows.iter().map(|row| row[j]).sum::<f64>();
            }
        }
        cost[self.n_all] = self.rows.iter().map(|row| row[self.n_all]).sum::<f64>();
        self.simplex(&mut cost)?;
        if cost[self.n_all] > 1e-8 {
            return Err(Error::Infeasible(format!(
                "phase-1 residual {:.3e}",
                cost[self.n_all]
            )));
        }
        // Pivot leftover artificials out of the basis; drop dependent rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.n_struct {
                let col = (0..self.n_struct).find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        // Strip artificial columns.
        for row in self.rows.iter_mut() {
            let rhs = row[self.n_all];
            row.truncate(self.n_struct);
            row.push(rhs);
        }
        self.n_all = self.n_struct;
        Ok(())
    }

    /// Maximizes `obj` from the feasible basis left by phase 1.
    fn phase2(&mut self, obj: &[f64]) -> Result<()> {
        let mut cost = vec![0.0; self.n_all + 1];
        // Reduced cost row: c_j - c_B · (tableau column j), rhs = -c_B · b.
        for j in 0..=self.n_all {
            let mut v = if j < self.n_struct { obj[j] } else { 0.0 };
            for (r, &b) in self.basis.iter().enumerate() {
                let cb = if b < obj.len() { obj[b] } else { 0.0 };
                v -= cb * self.rows[r][j];
            }
            cost[j] = if j == self.n_all { -v } else { v };
        }
        // simplex() maximizes with reduced costs stored negated (entering when
        // cost[j] > 0), matching the phase-1 convention.
        self.simplex(&mut cost)
    }

    /// Bland-rule simplex on the current tableau. `cost[j] > PIVOT_TOL` marks
    /// an improving column; `cost[n_all]` accumulates the objective.
    fn simplex(&mut self, cost: &mut [f64]) -> Result<()> {
        loop {
            let Some(enter) = (0..self.n_all)
                .find(|&j| cost[j] > PIVOT_TOL && !self.basis.contains(&j))
            else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || (ratio < lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded("no blocking row for entering column".into()));
            };
            self.pivot(r, enter);
            let factor = cost[enter];
            for j in 0..=self.n_all {
                cost[j] -= factor * self.rows[r][j];
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (rr, row) in self.rows.iter_mut().enumerate() {
            if rr != r && row[j].abs() > 0.0 {
                let f = row[j];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        }
        self.basis[r] = j;
    }

    fn primal_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(r);
            }
        }
        x
    }
}
