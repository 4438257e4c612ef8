//! Dense two-phase simplex for `min cᵀx  s.t.  Ax = b, x >= 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable. The
//! artificial columns stay in the tableau after phase one so that the phase-one
//! duals (and hence a Farkas certificate of infeasibility) can be read off the
//! reduced costs.

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITERATIONS: usize = 20_000;
const PIVOT_TOL: f64 = 1e-10;
const REDUCED_COST_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct StandardLp {
    /// `m × n` constraint matrix, row-major.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<f64>,
        objective: f64,
    },
    /// `y` with `yᵀA <= 0` componentwise and `yᵀb > 0`.
    Infeasible {
        farkas: Vec<f64>,
        phase_one_value: f64,
    },
    Unbounded,
}

struct Tableau {
    rows: usize,
    /// structural + artificial columns
    cols: usize,
    structural: usize,
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// reduced costs followed by the negated objective value
    cost: Vec<f64>,
    cost_rhs: f64,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.t[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.t[i][col];
            if f != 0.0 {
                for (v, pv) in self.t[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-13 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost_rhs -= f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` if
    /// the objective is unbounded below.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        loop {
            let Some(enter) = (0..allowed)
                .find(|&j| self.cost[j] < -REDUCED_COST_TOL && !self.basis.contains(&j))
            else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.t[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, enter);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::SolverStall {
                    iterations: self.max_iterations,
                });
            }
        }
    }
}

pub fn solve(lp: &StandardLp, feasibility_tol: f64) -> Result<LpOutcome> {
    solve_with_limit(lp, feasibility_tol, DEFAULT_MAX_ITERATIONS)
}

pub fn solve_with_limit(
    lp: &StandardLp,
    feasibility_tol: f64,
    max_iterations: usize,
) -> Result<LpOutcome> {
    let m = lp.b.len();
    let n = lp.c.len();
    if lp.a.len() != m || lp.a.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "LP with {m} right-hand sides and {n} costs"
        )));
    }
    let signs: Vec<f64> =
        lp.b.iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
    let cols = n + m;
    let t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = lp.a[i].iter().map(|v| v * signs[i]).collect();
            row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let rhs: Vec<f64> = lp.b.iter().zip(&signs).map(|(v, s)| v * s).collect();

    // phase one: minimize the sum of artificials
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = -t.iter().map(|row| row[j]).sum::<f64>();
    }
    let cost_rhs = -rhs.iter().sum::<f64>();
    let mut tab = Tableau {
        rows: m,
        cols,
        structural: n,
        t,
        rhs,
        basis: (n..n + m).collect(),
        cost,
        cost_rhs,
        iterations: 0,
        max_iterations,
    };
    tab.optimize(n)?;
    let phase_one_value = -tab.cost_rhs;
    if phase_one_value > feasibility_tol {
        let farkas = (0..m).map(|i| (1.0 - tab.cost[n + i]) * signs[i]).collect();
        return Ok(LpOutcome::Infeasible {
            farkas,
            phase_one_value,
        });
    }

    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > 1e-9 && !tab.basis.contains(&j)) {
                tab.pivot(i, j);
            }
        }
    }

    // phase two
    let mut cost = vec![0.0; tab.cols];
    cost[..n].copy_from_slice(&lp.c);
    let mut cost_rhs = 0.0;
    for i in 0..m {
        let cb = if tab.basis[i] < n {
            lp.c[tab.basis[i]]
        } else {
            0.0
        };
        if cb != 0.0 {
            for j in 0..tab.cols {
                cost[j] -= cb * tab.t[i][j];
            }
            cost_rhs -= cb * tab.rhs[i];
        }
    }
    tab.cost = cost;
    tab.cost_rhs = cost_rhs;
    if !tab.optimize(tab.structural)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs[i].max(0.0);
        }
    }
    let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = StandardLp {
            a: vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]],
            b: vec![4.0, 6.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
        };
        let LpOutcome::Optimal { x, objective } = solve(&lp, 1e-9).unwrap() else {
            panic!()
        };
        assert!((objective + 2.8).abs() < 1e-12);
        assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_farkas() {
        // x1 + x2 = 1 and x1 + x2 = 2
        let lp = StandardLp {
            a: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            b: vec![1.0, 2.0],
            c: vec![0.0, 0.0],
        };
        let LpOutcome::Infeasible { farkas, .. } = solve(&lp, 1e-9).unwrap() else {
            panic!()
        };
        for j in 0..2 {
            let ya: f64 = (0..2).map(|i| farkas[i] * lp.a[i][j]).sum();
            assert!(ya <= 1e-12);
        }
        let yb: f64 = farkas.iter().zip(&lp.b).map(|(y, b)| y * b).sum();
        assert!(yb > 0.5);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x = -1 twice, y free of constraints
        let lp = StandardLp {
            a: vec![vec![-1.0, 0.0], vec![-1.0, 0.0]],
            b: vec![-1.0, -1.0],
            c: vec![1.0, 1.0],
        };
        let LpOutcome::Optimal { x, objective } = solve(&lp, 1e-9).unwrap() else {
            panic!()
        };
        assert_eq!(x, vec![1.0, 0.0]);
        assert_eq!(objective, 1.0);
    }

    #[test]
    fn unbounded() {
        let lp = StandardLp {
            a: vec![vec![1.0, -1.0]],
            b: vec![1.0],
            c: vec![0.0, -1.0],
        };
        assert_eq!(solve(&lp, 1e-9).unwrap(), LpOutcome::Unbounded);
    }
}
