use std::fmt;

use super::{LinearProgram, LpSolution, KKT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KktCondition {
    /// Row residual of `A x = b`.
    PrimalEquality { row: usize },
    /// Distance outside `[l, u]`.
    PrimalBound { var: usize },
    /// Reduced cost with the wrong sign for the bound the variable sits on.
    DualSign { var: usize },
    /// Nonzero reduced cost on a variable strictly inside its bounds.
    ComplementarySlackness { var: usize },
    /// Relative gap between primal and dual objective.
    DualityGap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktViolation {
    pub condition: KktCondition,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub tolerance: f64,
    pub max_primal: f64,
    pub max_dual: f64,
    pub max_complementarity: f64,
    pub duality_gap: f64,
    /// Every condition whose magnitude exceeds `tolerance`.
    pub violations: Vec<KktViolation>,
}

impl KktReport {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self) -> f64 {
        self.max_primal
            .max(self.max_dual)
            .max(self.max_complementarity)
            .max(self.duality_gap)
    }
}

impl fmt::Display for KktReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "primal {:.3e}, dual {:.3e}, complementarity {:.3e}, gap {:.3e}",
            self.max_primal, self.max_dual, self.max_complementarity, self.duality_gap
        )
    }
}

pub fn verify_kkt(lp: &LinearProgram, sol: &LpSolution) -> KktReport {
    verify_kkt_with_tolerance(lp, sol, KKT_TOLERANCE)
}

/// Checks the optimality conditions of `sol` against `lp`.
///
/// Reduced costs are recomputed from `sol.duals` rather than trusted from the
/// solution. A variable counts as "at a bound" when within `tolerance` of it.
pub fn verify_kkt_with_tolerance(
    lp: &LinearProgram,
    sol: &LpSolution,
    tolerance: f64,
) -> KktReport {
    let x = &sol.primal;
    let y = &sol.duals;
    let mut violations = Vec::new();
    let mut push = |condition, magnitude: f64| {
        if magnitude > tolerance {
            violations.push(KktViolation {
                condition,
                magnitude,
            });
        }
    };

    let mut max_primal = 0.0_f64;
    for (row, (coeffs, &rhs)) in lp.eq_matrix().iter().zip(lp.eq_rhs()).enumerate() {
        let activity: f64 = coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let r = (activity - rhs).abs();
        max_primal = max_primal.max(r);
        push(KktCondition::PrimalEquality { row }, r);
    }
    for (var, ((&v, &l), &u)) in x
        .iter()
        .zip(lp.lower_bounds())
        .zip(lp.upper_bounds())
        .enumerate()
    {
        let out = (l - v).max(v - u).max(0.0);
        max_primal = max_primal.max(out);
        push(KktCondition::PrimalBound { var }, out);
    }

    let mut max_dual = 0.0_f64;
    let mut max_cs = 0.0_f64;
    let mut dual_objective: f64 = y.iter().zip(lp.eq_rhs()).map(|(a, b)| a * b).sum();
    for var in 0..lp.num_vars() {
        let column_dot: f64 = lp
            .eq_matrix()
            .iter()
            .zip(y)
            .map(|(row, yi)| row[var] * yi)
            .sum();
        let d = lp.objective()[var] - column_dot;
        let (l, u, v) = (lp.lower_bounds()[var], lp.upper_bounds()[var], x[var]);
        let at_lower = l.is_finite() && v - l <= tolerance;
        let at_upper = u.is_finite() && u - v <= tolerance;
        match (at_lower, at_upper) {
            (true, true) => dual_objective += d * l,
            (true, false) => {
                let bad = (-d).max(0.0);
                max_dual = max_dual.max(bad);
                push(KktCondition::DualSign { var }, bad);
                dual_objective += d * l;
            }
            (false, true) => {
                let bad = d.max(0.0);
                max_dual = max_dual.max(bad);
                push(KktCondition::DualSign { var }, bad);
                dual_objective += d * u;
            }
            (false, false) => {
                max_cs = max_cs.max(d.abs());
                push(KktCondition::ComplementarySlackness { var }, d.abs());
            }
        }
    }

    let primal_objective = lp.objective_at(x);
    let duality_gap = (primal_objective - dual_objective).abs() / (1.0 + primal_objective.abs());
    push(KktCondition::DualityGap, duality_gap);

    KktReport {
        tolerance,
        max_primal,
        max_dual,
        max_complementarity: max_cs,
        duality_gap,
        violations,
    }
}
