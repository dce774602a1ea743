//! Dense two-phase simplex with Bland's rule, sized for the sequence-form
//! programs of toy poker games.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpConstraint {
    LessEq,
    Eq,
}

/// Maximize `objective . w` subject to the given rows; variables marked
/// `free` are unbounded, the rest are non-negative.
#[derive(Debug, Clone)]
pub struct LpProblem<S: Scalar = f64> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub rows: Vec<(Vec<S>, LpConstraint, S)>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S: Scalar = f64> {
    pub value: S,
    pub point: Vec<S>,
}

struct Tableau<S: Scalar> {
    // rows x cols coefficient matrix, rhs, objective row
    a: Vec<Vec<S>>,
    b: Vec<S>,
    c: Vec<S>,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, row: usize, col: usize) {
        let m = self.a.len();
        let n = self.c.len();
        let p = self.a[row][col];
        for j in 0..n {
            self.a[row][j] /= p;
        }
        self.b[row] /= p;
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f == S::zero() {
                continue;
            }
            for j in 0..n {
                let delta = f * self.a[row][j];
                self.a[i][j] -= delta;
            }
            let delta = f * self.b[row];
            self.b[i] -= delta;
        }
        let f = self.c[col];
        if f != S::zero() {
            for j in 0..n {
                let delta = f * self.a[row][j];
                self.c[j] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Simplex iterations with Bland's smallest-index rule (maximization:
    /// enter on positive reduced cost). Returns false when unbounded.
    fn run(&mut self, max_iters: usize) -> Result<bool> {
        let tol = S::cast(1e-9);
        for _ in 0..max_iters {
            let Some(col) = (0..self.c.len()).find(|&j| self.c[j] > tol) else {
                return Ok(true);
            };
            let mut row = None;
            let mut best = S::infinity();
            for i in 0..self.a.len() {
                if self.a[i][col] > tol {
                    let ratio = self.b[i] / self.a[i][col];
                    if ratio < best - tol
                        || (ratio < best + tol
                            && row.is_some_and(|r: usize| self.basis[i] < self.basis[r]))
                    {
                        best = ratio;
                        row = Some(i);
                    }
                }
            }
            let Some(row) = row else {
                return Ok(false);
            };
            self.pivot(row, col);
        }
        Err(Error::Numeric {
            what: "simplex iteration limit".into(),
            dump: format!("{} rows, {} cols", self.a.len(), self.c.len()),
        })
    }
}

/// Two-phase primal simplex.
pub fn solve_lp<S: Scalar>(problem: &LpProblem<S>) -> Result<LpSolution<S>> {
    let n_orig = problem.num_vars;
    assert_eq!(problem.objective.len(), n_orig);
    assert_eq!(problem.free.len(), n_orig);
    let m = problem.rows.len();

    // standard form: free variables split into (+, -), slack per inequality
    let n_split: usize = n_orig + problem.free.iter().filter(|&&f| f).count();
    let n_slack = problem.rows.iter().filter(|r| r.1 == LpConstraint::LessEq).count();
    let n = n_split + n_slack + m; // + artificials

    let mut split_col = vec![usize::MAX; n_orig];
    let mut next = n_orig;
    for (v, &is_free) in problem.free.iter().enumerate() {
        if is_free {
            split_col[v] = next;
            next += 1;
        }
    }

    let mut a = vec![vec![S::zero(); n]; m];
    let mut b = vec![S::zero(); m];
    let mut slack_idx = n_split;
    let mut basis = vec![0usize; m];
    for (i, (coeffs, kind, rhs)) in problem.rows.iter().enumerate() {
        assert_eq!(coeffs.len(), n_orig);
        for v in 0..n_orig {
            a[i][v] = coeffs[v];
            if problem.free[v] {
                a[i][split_col[v]] = -coeffs[v];
            }
        }
        b[i] = *rhs;
        if *kind == LpConstraint::LessEq {
            a[i][slack_idx] = S::one();
            slack_idx += 1;
        }
        // flip rows to non-negative rhs
        if b[i] < S::zero() {
            for j in 0..n {
                a[i][j] = -a[i][j];
            }
            b[i] = -b[i];
        }
        let art = n_split + n_slack + i;
        a[i][art] = S::one();
        basis[i] = art;
    }

    // phase 1: maximize -sum(artificials)
    let mut c1 = vec![S::zero(); n];
    for i in 0..m {
        let art = n_split + n_slack + i;
        c1[art] = -S::one();
    }
    let mut t = Tableau { a, b, c: c1, basis };
    // price out the initial basis
    for i in 0..m {
        let f = t.c[t.basis[i]];
        if f != S::zero() {
            for j in 0..t.c.len() {
                let delta = f * t.a[i][j];
                t.c[j] -= delta;
            }
        }
    }
    let max_iters = 200 * (n + m);
    t.run(max_iters)?;
    let phase1: S = (0..m)
        .map(|i| if t.basis[i] >= n_split + n_slack { t.b[i] } else { S::zero() })
        .sum();
    if phase1 > S::cast(1e-7) {
        return Err(Error::Config("linear program is infeasible".into()));
    }
    // drive any zero-level artificials out of the basis
    for i in 0..m {
        if t.basis[i] >= n_split + n_slack {
            if let Some(col) = (0..n_split + n_slack).find(|&j| t.a[i][j].abs() > S::cast(1e-9)) {
                t.pivot(i, col);
            }
        }
    }

    // phase 2: original objective, artificials forbidden
    let mut c2 = vec![S::zero(); n];
    for v in 0..n_orig {
        c2[v] = problem.objective[v];
        if problem.free[v] {
            c2[split_col[v]] = -problem.objective[v];
        }
    }
    t.c = c2;
    for i in 0..m {
        let f = t.c[t.basis[i]];
        if f != S::zero() {
            for j in 0..t.c.len() {
                let delta = f * t.a[i][j];
                t.c[j] -= delta;
            }
        }
    }
    // forbid re-entering artificial columns
    for i in 0..m {
        let art = n_split + n_slack + i;
        if t.basis.contains(&art) {
            continue;
        }
        for row in t.a.iter_mut() {
            row[art] = S::zero();
        }
        t.c[art] = S::cast(-1e30);
    }
    if !t.run(max_iters)? {
        return Err(Error::Config("linear program is unbounded".into()));
    }

    let mut z = vec![S::zero(); n];
    for i in 0..m {
        z[t.basis[i]] = t.b[i];
    }
    let mut point = vec![S::zero(); n_orig];
    let mut value = S::zero();
    for v in 0..n_orig {
        point[v] = z[v];
        if problem.free[v] {
            point[v] -= z[split_col[v]];
        }
        value += problem.objective[v] * point[v];
    }
    Ok(LpSolution { value, point })
}
