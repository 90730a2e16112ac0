//! Two-phase bounded-variable primal simplex on an explicit basis inverse.
//!
//! Nonbasic variables sit at their lower bound, their upper bound, or at zero
//! when free. Phase one starts from an all-artificial basis; phase two keeps
//! the artificials fixed at zero. Pricing is Dantzig's largest reduced cost
//! until a run of degenerate pivots triggers Bland's smallest-index rule.

use super::{LinearProgram, LpSolution, LpStatus, SOLVER_TOLERANCE};
use crate::error::LpError;

const PIVOT_TOLERANCE: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
const DRIVE_OUT_TOLERANCE: f64 = 1e-7;
const REFACTOR_EVERY: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub tolerance: f64,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
    /// Overrides the default limit of `max(200, 10 * (vars + rows))`.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            tolerance: SOLVER_TOLERANCE,
            bland_after: 20,
            max_iterations: None,
        }
    }
}

impl SimplexOptions {
    pub fn iteration_limit(&self, lp: &LinearProgram) -> usize {
        self.max_iterations
            .unwrap_or_else(|| (10 * (lp.num_vars() + lp.num_rows())).max(200))
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &SimplexOptions::default())
}

pub fn solve_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution, LpError> {
    let mut s = Simplex::new(lp, *opts);
    let n = lp.num_vars();
    let m = lp.num_rows();

    let phase_one_cost: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    s.run(&phase_one_cost, n)?;

    let infeasibility: f64 = s.x[n..].iter().sum();
    let scale = 1.0 + lp.eq_rhs().iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    if infeasibility > opts.tolerance * scale {
        return Ok(s.extract(&phase_one_cost, LpStatus::Infeasible));
    }

    for a in n..n + m {
        s.upper[a] = 0.0;
        if s.pos[a] != Position::Basic {
            s.x[a] = 0.0;
            s.pos[a] = Position::Lower;
        }
    }
    s.drive_out_artificials()?;

    let mut phase_two_cost = lp.objective().to_vec();
    phase_two_cost.resize(n + m, 0.0);
    let status = match s.run(&phase_two_cost, n)? {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
    };
    Ok(s.extract(&phase_two_cost, status))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable parked at zero.
    Zero,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    opts: SimplexOptions,
    m: usize,
    /// Column-major copy of `[A | artificials]`.
    cols: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    pos: Vec<Position>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    iterations: usize,
    limit: usize,
    degenerate_run: usize,
    pivots_since_refactor: usize,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, opts: SimplexOptions) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let a = lp.eq_matrix();

        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
        let mut lower = lp.lower_bounds().to_vec();
        let mut upper = lp.upper_bounds().to_vec();
        let mut x = Vec::with_capacity(n + m);
        let mut pos = Vec::with_capacity(n + m);
        for j in 0..n {
            let (v, p) = if lower[j].is_finite() {
                (lower[j], Position::Lower)
            } else if upper[j].is_finite() {
                (upper[j], Position::Upper)
            } else {
                (0.0, Position::Zero)
            };
            x.push(v);
            pos.push(p);
        }

        let mut binv = vec![vec![0.0; m]; m];
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let activity: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
            let residual = lp.eq_rhs()[i] - activity;
            let sign = if residual >= 0.0 { 1.0 } else { -1.0 };
            let mut col = vec![0.0; m];
            col[i] = sign;
            cols.push(col);
            binv[i][i] = sign;
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push(residual.abs());
            pos.push(Position::Basic);
            basis.push(n + i);
        }

        let limit = opts.iteration_limit(lp);
        Self {
            lp,
            opts,
            m,
            cols,
            lower,
            upper,
            x,
            pos,
            basis,
            binv,
            iterations: 0,
            limit,
            degenerate_run: 0,
            pivots_since_refactor: 0,
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (k, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (yi, bi) in y.iter_mut().zip(&self.binv[k]) {
                    *yi += cb * bi;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        cost[j] - y.iter().zip(&self.cols[j]).map(|(a, b)| a * b).sum::<f64>()
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        self.binv
            .iter()
            .map(|row| row.iter().zip(col).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Iterates until optimal or unbounded for `cost`. Only variables with
    /// index below `enter_below` may enter the basis.
    fn run(&mut self, cost: &[f64], enter_below: usize) -> Result<PhaseEnd, LpError> {
        let tol = self.opts.tolerance;
        loop {
            let y = self.duals(cost);
            let bland = self.degenerate_run >= self.opts.bland_after;

            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..enter_below {
                if self.pos[j] == Position::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.reduced_cost(j, cost, &y);
                let dir = match self.pos[j] {
                    Position::Lower if d < -tol => 1.0,
                    Position::Upper if d > tol => -1.0,
                    Position::Zero if d.abs() > tol => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }

            let alpha = self.ftran(&self.cols[q]);
            let mut step = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                let rate = dir * a;
                if rate.abs() <= PIVOT_TOLERANCE {
                    continue;
                }
                let b = self.basis[i];
                let (limit, to_upper) = if rate > 0.0 {
                    if !self.lower[b].is_finite() {
                        continue;
                    }
                    ((self.x[b] - self.lower[b]).max(0.0) / rate, false)
                } else {
                    if !self.upper[b].is_finite() {
                        continue;
                    }
                    ((self.upper[b] - self.x[b]).max(0.0) / -rate, true)
                };
                let better = match leave {
                    _ if limit < step - RATIO_TIE => true,
                    Some((r, _)) if (limit - step).abs() <= RATIO_TIE => {
                        if bland {
                            b < self.basis[r]
                        } else {
                            a.abs() > alpha[r].abs()
                        }
                    }
                    _ => false,
                };
                if better {
                    step = step.min(limit);
                    leave = Some((i, to_upper));
                }
            }

            if !step.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }

            self.x[q] += dir * step;
            for (i, &a) in alpha.iter().enumerate() {
                let b = self.basis[i];
                self.x[b] -= dir * a * step;
            }

            match leave {
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    if to_upper {
                        self.x[out] = self.upper[out];
                        self.pos[out] = Position::Upper;
                    } else {
                        self.x[out] = self.lower[out];
                        self.pos[out] = Position::Lower;
                    }
                    self.pivot(r, q, &alpha)?;
                }
                None => {
                    if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        self.pos[q] = Position::Upper;
                    } else {
                        self.x[q] = self.lower[q];
                        self.pos[q] = Position::Lower;
                    }
                }
            }

            if step <= tol {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            self.recompute_basics();
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) -> Result<(), LpError> {
        let p = alpha[r];
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|v| v / p).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == r {
                row.copy_from_slice(&pivot_row);
            } else if alpha[i] != 0.0 {
                let f = alpha[i];
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
            }
        }
        self.basis[r] = q;
        self.pos[q] = Position::Basic;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial pivoting.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut work: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row: Vec<f64> = self.basis.iter().map(|&b| self.cols[b][i]).collect();
                row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| work[a][c].abs().total_cmp(&work[b][c].abs()))
                .unwrap_or(c);
            if work[p][c].abs() < 1e-12 {
                return Err(LpError::SingularBasis);
            }
            work.swap(c, p);
            let pv = work[c][c];
            for v in work[c].iter_mut() {
                *v /= pv;
            }
            let pivot_row = work[c].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i != c && row[c] != 0.0 {
                    let f = row[c];
                    for (v, pr) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pr;
                    }
                }
            }
        }
        // Column k of B corresponds to basis position k, so rows of the
        // inverse come out in basis order.
        self.binv = work.into_iter().map(|row| row[m..].to_vec()).collect();
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let mut rhs = self.lp.eq_rhs().to_vec();
        for (j, col) in self.cols.iter().enumerate() {
            if self.pos[j] != Position::Basic && self.x[j] != 0.0 {
                for (r, a) in rhs.iter_mut().zip(col) {
                    *r -= a * self.x[j];
                }
            }
        }
        let xb = self.ftran(&rhs);
        for (k, &b) in self.basis.iter().enumerate() {
            self.x[b] = xb[k];
        }
    }

    /// Replaces basic artificials (all at zero after a feasible phase one) with
    /// structural columns wherever the row allows it. Rows where no structural
    /// column has a usable entry are redundant and keep their artificial.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        let n = self.lp.num_vars();
        for r in 0..self.m {
            if self.basis[r] < n {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.pos[j] == Position::Basic {
                    continue;
                }
                let v: f64 = self.binv[r]
                    .iter()
                    .zip(&self.cols[j])
                    .map(|(a, b)| a * b)
                    .sum();
                if v.abs() > DRIVE_OUT_TOLERANCE && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let art = self.basis[r];
                let alpha = self.ftran(&self.cols[j]);
                self.pivot(r, j, &alpha)?;
                self.x[art] = 0.0;
                self.pos[art] = Position::Lower;
            }
        }
        self.refactor()?;
        self.recompute_basics();
        Ok(())
    }

    fn extract(&self, cost: &[f64], status: LpStatus) -> LpSolution {
        let n = self.lp.num_vars();
        let duals = self.duals(cost);
        let reduced_costs = (0..n)
            .map(|j| {
                if self.pos[j] == Position::Basic {
                    0.0
                } else {
                    self.reduced_cost(j, cost, &duals)
                }
            })
            .collect();
        let primal = self.x[..n].to_vec();
        let mut basis: Vec<usize> = self.basis.iter().copied().filter(|&b| b < n).collect();
        basis.sort_unstable();
        let objective_value = match status {
            LpStatus::Optimal => self.lp.objective_at(&primal),
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
        };
        LpSolution {
            status,
            primal,
            duals,
            reduced_costs,
            basis,
            objective_value,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>, l: Vec<f64>, u: Vec<f64>) -> LinearProgram {
        LinearProgram::new(c, a, b, l, u).unwrap()
    }

    #[test]
    fn single_equality() {
        let sol = solve(&lp(
            vec![1.0],
            vec![vec![1.0]],
            vec![5.0],
            vec![0.0],
            vec![10.0],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 5.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
        assert!((sol.objective_value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bound_excludes_rhs() {
        let sol = solve(&lp(
            vec![0.0],
            vec![vec![1.0]],
            vec![5.0],
            vec![0.0],
            vec![3.0],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_below() {
        // min -x0 with x0 - x1 = 0, both nonnegative and unbounded above.
        let sol = solve(&lp(
            vec![-1.0, 0.0],
            vec![vec![1.0, -1.0]],
            vec![0.0],
            vec![0.0, 0.0],
            vec![f64::INFINITY; 2],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.objective_value, f64::NEG_INFINITY);
    }

    #[test]
    fn no_rows_moves_to_cheaper_bounds() {
        let sol = solve(&lp(
            vec![1.0, -2.0],
            vec![],
            vec![],
            vec![-1.0, 0.0],
            vec![4.0, 3.0],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal, vec![-1.0, 3.0]);
        assert_eq!(sol.objective_value, -7.0);
    }

    #[test]
    fn free_variable_enters() {
        // min x0 + x1, x0 - x1 = 2, x0 free, x1 in [1, 4]  ->  x1 = 1, x0 = 3.
        let sol = solve(&lp(
            vec![1.0, 1.0],
            vec![vec![1.0, -1.0]],
            vec![2.0],
            vec![f64::NEG_INFINITY, 1.0],
            vec![f64::INFINITY, 4.0],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 3.0).abs() < 1e-12);
        assert!((sol.primal[1] - 1.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let sol = solve(&lp(
            vec![1.0, 2.0],
            vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![3.0, 6.0],
            vec![0.0, 0.0],
            vec![2.0, 5.0],
        ))
        .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_limit_is_an_error() {
        let opts = SimplexOptions {
            max_iterations: Some(0),
            ..SimplexOptions::default()
        };
        let err = solve_with(
            &lp(
                vec![1.0, 1.0],
                vec![vec![1.0, 1.0]],
                vec![1.0],
                vec![0.0; 2],
                vec![1.0; 2],
            ),
            &opts,
        )
        .unwrap_err();
        assert_eq!(err, LpError::IterationLimit { limit: 0 });
    }

    #[test]
    fn default_iteration_limit() {
        let small = lp(vec![1.0], vec![vec![1.0]], vec![1.0], vec![0.0], vec![1.0]);
        assert_eq!(SimplexOptions::default().iteration_limit(&small), 200);
        let n = 30;
        let wide = lp(
            vec![0.0; n],
            vec![vec![1.0; n]; 3],
            vec![1.0; 3],
            vec![0.0; n],
            vec![1.0; n],
        );
        assert_eq!(SimplexOptions::default().iteration_limit(&wide), 330);
    }

    #[test]
    fn repeated_solves_are_identical() {
        let p = lp(
            vec![3.0, -1.0, 2.0, 0.5],
            vec![vec![1.0, 1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0, 2.0]],
            vec![2.0, 0.5],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 1.0, 2.0, 1.0],
        );
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
