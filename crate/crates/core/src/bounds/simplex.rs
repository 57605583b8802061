//! Dense two-phase primal simplex for small problems in equality form:
//! minimize c·x subject to A x = b, x ≥ 0.
//!
//! The entering column is the most negative reduced cost. After a run of
//! degenerate pivots the solver switches to Bland's rule (lowest-index
//! entering column, ties in the ratio test broken by the lowest basic
//! variable), which cannot cycle. Runs are deterministic.

const PIVOT_EPS: f64 = 1e-11;
/// Consecutive degenerate pivots tolerated before falling back to Bland.
const DEGENERATE_RUN: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Optimal {
        x: Vec<f64>,
        value: f64,
    },
    /// Phase one could not drive the artificial variables below the
    /// requested threshold; `residual` is their optimal sum.
    Infeasible {
        residual: f64,
    },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let f = row[col];
            if i != r && f != 0.0 {
                row.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            self.cost
                .iter_mut()
                .zip(&pivot_row)
                .for_each(|(v, p)| *v -= f * p);
        }
        self.basis[r] = col;
    }

    /// Runs to optimality over columns `0..allowed`. Returns false when the
    /// objective is unbounded below.
    fn optimize(&mut self, allowed: usize) -> bool {
        let mut degenerate = 0;
        loop {
            let entering = if degenerate < DEGENERATE_RUN {
                (0..allowed)
                    .filter(|&j| self.cost[j] < -PIVOT_EPS)
                    .min_by(|&i, &j| self.cost[i].total_cmp(&self.cost[j]))
            } else {
                (0..allowed).find(|&j| self.cost[j] < -PIVOT_EPS)
            };
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] > PIVOT_EPS {
                    let ratio = row[self.rhs] / row[col];
                    let better = match leave {
                        None => true,
                        Some((k, best)) => {
                            ratio < best - PIVOT_EPS
                                || (ratio <= best + PIVOT_EPS && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, ratio)) => {
                    if ratio <= PIVOT_EPS {
                        degenerate += 1;
                    } else if degenerate < DEGENERATE_RUN {
                        degenerate = 0;
                    }
                    self.pivot(r, col);
                }
                None => return false,
            }
        }
    }
}

/// Solves the problem, declaring it infeasible when the phase-one optimum
/// exceeds `feasibility`.
pub(crate) fn minimize(a: &[Vec<f64>], b: &[f64], c: &[f64], feasibility: f64) -> Outcome {
    let m = a.len();
    let n = c.len();
    let rhs = n + m;
    let rows: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (ai, &bi))| {
            let sign = if bi < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; rhs + 1];
            ai.iter().enumerate().for_each(|(j, v)| row[j] = sign * v);
            row[n + i] = 1.0;
            row[rhs] = sign * bi;
            row
        })
        .collect();
    let mut cost = vec![0.0; rhs + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[rhs] -= row[rhs];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        rhs,
    };
    t.optimize(n + m);

    let residual: f64 = t
        .basis
        .iter()
        .zip(&t.rows)
        .filter(|(&k, _)| k >= n)
        .map(|(_, row)| row[rhs])
        .sum();
    if residual > feasibility {
        return Outcome::Infeasible { residual };
    }
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| t.rows[r][j].abs() > PIVOT_EPS) {
                t.pivot(r, col);
            }
        }
    }

    t.cost = vec![0.0; rhs + 1];
    t.cost[..n].copy_from_slice(c);
    for r in 0..m {
        let k = t.basis[r];
        let ck = if k < n { c[k] } else { 0.0 };
        if ck != 0.0 {
            for j in 0..=rhs {
                t.cost[j] -= ck * t.rows[r][j];
            }
        }
    }
    if !t.optimize(n) {
        return Outcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (r, &k) in t.basis.iter().enumerate() {
        if k < n {
            x[k] = t.rows[r][rhs].max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Outcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: Outcome) -> (Vec<f64>, f64) {
        match o {
            Outcome::Optimal { x, value } => (x, value),
            other => panic!("expected an optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 (optimum 36 at (2, 6))
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let (x, v) = optimal(minimize(
            &a,
            &[4.0, 12.0, 18.0],
            &[-3.0, -5.0, 0.0, 0.0, 0.0],
            1e-9,
        ));
        assert!((v + 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1 and x + y = 2
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        match minimize(&a, &[1.0, 2.0], &[0.0, 0.0], 1e-9) {
            Outcome::Infeasible { residual } => assert!((residual - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_unboundedness() {
        // min −x s.t. x − y = 0
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(minimize(&a, &[0.0], &[-1.0, 0.0], 1e-9), Outcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        // x + y = 1 stated twice, and −x = −0.25
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![-1.0, 0.0]];
        let (x, _) = optimal(minimize(&a, &[1.0, 1.0, -0.25], &[0.0, 1.0], 1e-9));
        assert!((x[0] - 0.25).abs() < 1e-12 && (x[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule
        let a = vec![
            vec![0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let c = [-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0];
        let (_, v) = optimal(minimize(&a, &[0.0, 0.0, 1.0], &c, 1e-9));
        assert!((v + 0.05).abs() < 1e-9);
    }
}
