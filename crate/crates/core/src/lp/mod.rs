//! Dense linear programs in bounded equality form:
//!
//! ```text
//! minimize    c . x
//! subject to  A x = b
//!             l <= x <= u      (l may be -inf, u may be +inf)
//! ```
//!
//! Intended for small problems (up to roughly a hundred variables). The solver
//! is a two-phase primal simplex with explicit bound handling, so the equality
//! duals are read off the final basis.

mod kkt;
mod simplex;

use std::fmt::Write as _;

pub use kkt::{verify_kkt, verify_kkt_with_tolerance, KktCondition, KktReport, KktViolation};
pub use simplex::{solve, solve_with, SimplexOptions};

use crate::error::LpError;

/// Default feasibility / optimality tolerance used inside the simplex.
pub const SOLVER_TOLERANCE: f64 = 1e-9;

/// Tolerance used by [`verify_kkt`] unless another one is supplied.
pub const KKT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq_matrix: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
    upper_bounds: Vec<f64>,
}

impl LinearProgram {
    /// Builds a program after checking shapes and bound ordering.
    ///
    /// Coefficients, right-hand sides and costs must be finite. Bounds may be
    /// infinite in the natural direction only.
    pub fn new(
        objective: Vec<f64>,
        eq_matrix: Vec<Vec<f64>>,
        eq_rhs: Vec<f64>,
        lower_bounds: Vec<f64>,
        upper_bounds: Vec<f64>,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        if eq_matrix.len() != eq_rhs.len() {
            return Err(LpError::DimensionMismatch(format!(
                "{} constraint rows but {} right-hand side entries",
                eq_matrix.len(),
                eq_rhs.len()
            )));
        }
        if let Some((i, row)) = eq_matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(LpError::DimensionMismatch(format!(
                "constraint row {i} has {} columns, expected {n}",
                row.len()
            )));
        }
        if lower_bounds.len() != n || upper_bounds.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{n} variables but {} lower and {} upper bounds",
                lower_bounds.len(),
                upper_bounds.len()
            )));
        }
        let finite = objective
            .iter()
            .chain(eq_rhs.iter())
            .chain(eq_matrix.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite);
        }
        for (i, (&l, &u)) in lower_bounds.iter().zip(&upper_bounds).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds {
                    index: i,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self {
            objective,
            eq_matrix,
            eq_rhs,
            lower_bounds,
            upper_bounds,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.eq_rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq_matrix(&self) -> &[Vec<f64>] {
        &self.eq_matrix
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text dump for bug reports.
    ///
    /// One line per row, values separated by single spaces:
    ///
    /// ```text
    /// objective c_1 ... c_n
    /// row a_i1 ... a_in rhs b_i        (one line per equality row)
    /// lower l_1 ... l_n
    /// upper u_1 ... u_n
    /// ```
    ///
    /// Numbers use Rust's shortest round-trip decimal form; infinite bounds are
    /// written `inf` / `-inf`.
    pub fn to_debug_text(&self) -> String {
        fn join(values: &[f64]) -> String {
            values
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(" ")
        }
        let mut out = String::new();
        let _ = writeln!(out, "objective {}", join(&self.objective));
        for (row, rhs) in self.eq_matrix.iter().zip(&self.eq_rhs) {
            let _ = writeln!(out, "row {} rhs {}", join(row), rhs);
        }
        let _ = writeln!(out, "lower {}", join(&self.lower_bounds));
        let _ = writeln!(out, "upper {}", join(&self.upper_bounds));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve.
///
/// For `Infeasible` and `Unbounded` the vectors hold the last iterate and are
/// only useful for diagnostics; `objective_value` is `+inf` or `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per equality row: the change in optimal cost per unit
    /// increase of that row's right-hand side.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Indices of the basic structural variables, ascending.
    pub basis: Vec<usize>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_rows() {
        let err = LinearProgram::new(
            vec![1.0, 2.0],
            vec![vec![1.0]],
            vec![1.0],
            vec![0.0; 2],
            vec![1.0; 2],
        )
        .unwrap_err();
        assert!(matches!(err, LpError::DimensionMismatch(_)));
    }

    #[test]
    fn rejects_rhs_length_mismatch() {
        let err = LinearProgram::new(
            vec![1.0],
            vec![vec![1.0]],
            vec![1.0, 2.0],
            vec![0.0],
            vec![1.0],
        )
        .unwrap_err();
        assert!(matches!(err, LpError::DimensionMismatch(_)));
    }

    #[test]
    fn rejects_crossed_bounds() {
        let err = LinearProgram::new(vec![1.0], vec![], vec![], vec![2.0], vec![1.0]).unwrap_err();
        assert!(matches!(err, LpError::InvalidBounds { index: 0, .. }));
    }

    #[test]
    fn rejects_nan_coefficients() {
        let err =
            LinearProgram::new(vec![f64::NAN], vec![], vec![], vec![0.0], vec![1.0]).unwrap_err();
        assert_eq!(err, LpError::NonFinite);
    }

    #[test]
    fn debug_text_layout() {
        let lp = LinearProgram::new(
            vec![0.0, 1.5],
            vec![vec![1.0, -1.0]],
            vec![2.0],
            vec![0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY, 3.0],
        )
        .unwrap();
        assert_eq!(
            lp.to_debug_text(),
            "objective 0 1.5\nrow 1 -1 rhs 2\nlower 0 -inf\nupper inf 3\n"
        );
    }
}
