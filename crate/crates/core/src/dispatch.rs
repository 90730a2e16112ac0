//! Economic dispatch on the three-bus network and the settlement-style cost
//! evaluation built on its duals.
//!
//! Variables are `(y0, y1, y2, f01, f02, f12)`: curtailed renewables, the two
//! dispatchable outputs, and signed line flows (`f_ij > 0` flows from i to j).
//! The balance rows are
//!
//! ```text
//! -y0 - f01 - f02 = l0
//!  y1 + f01 - f12 = l1 + delta
//!  y2 + f02 + f12 = l2 - delta
//! ```
//!
//! so each row's dual is the marginal system cost of one more MW of load at
//! that bus, i.e. the LMP.

use crate::error::DispatchError;
use crate::format::num;
use crate::lp::{self, LinearProgram, LpSolution, LpStatus};
use crate::scenario::ThreeBusScenario;

/// Distance from `0`, `c1` or `c2` within which a price is mapped to an
/// emissions rate.
pub const LMP_MATCH_TOLERANCE: f64 = 1e-6;

/// Relative size of the step used to take left-limit duals at degenerate shifts.
pub const LEFT_LIMIT_STEP: f64 = 1e-7;

const BOUND_TOLERANCE: f64 = 1e-9;

/// Which dispatch basis serves bus 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Bus 1 served by renewables at zero marginal cost.
    Renewable,
    /// The bus-1 generator is marginal.
    LocalGeneration,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Renewable => "renewable",
            Regime::LocalGeneration => "local-generation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispatchOutcome {
    pub delta: f64,
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
    pub f01: f64,
    pub f02: f64,
    pub f12: f64,
    /// Bus-0 price, kept for diagnostics only.
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub total_cost: f64,
    /// True when the solve at `delta` was degenerate and the prices were taken
    /// from a solve slightly to the left.
    pub left_limit_prices: bool,
}

impl DispatchOutcome {
    pub const CSV_HEADER: &'static str =
        "delta,y0,y1,y2,f01,f02,f12,lambda0,lambda1,lambda2,pi1,pi2,total_cost";

    pub fn csv_row(&self) -> String {
        [
            self.delta,
            self.y0,
            self.y1,
            self.y2,
            self.f01,
            self.f02,
            self.f12,
            self.lambda0,
            self.lambda1,
            self.lambda2,
            self.pi1,
            self.pi2,
            self.total_cost,
        ]
        .iter()
        .map(|v| num(*v))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn regime(&self, s: &ThreeBusScenario) -> Regime {
        if (self.lambda1 - s.c1).abs() < (self.lambda1).abs() {
            Regime::LocalGeneration
        } else {
            Regime::Renewable
        }
    }
}

/// Dispatch LP for arbitrary net loads `[bus0, bus1, bus2]`.
pub fn dispatch_lp(
    s: &ThreeBusScenario,
    net_loads: [f64; 3],
) -> Result<LinearProgram, DispatchError> {
    let inf = f64::INFINITY;
    Ok(LinearProgram::new(
        vec![0.0, s.c1, s.c2, 0.0, 0.0, 0.0],
        vec![
            vec![-1.0, 0.0, 0.0, -1.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0],
        ],
        net_loads.to_vec(),
        vec![0.0, 0.0, 0.0, -s.f01, -s.f02, -s.f12],
        vec![inf, inf, inf, s.f01, s.f02, s.f12],
    )?)
}

pub fn build_ed(s: &ThreeBusScenario, delta: f64) -> Result<LinearProgram, DispatchError> {
    if !(0.0..=s.dc_load).contains(&delta) {
        return Err(DispatchError::ShiftOutOfRange {
            delta,
            max: s.dc_load,
        });
    }
    dispatch_lp(s, [s.l0, s.l1 + delta, s.l2 - delta])
}

/// Minimum dispatch cost for the given net loads.
pub fn dispatch_cost(s: &ThreeBusScenario, net_loads: [f64; 3]) -> Result<f64, DispatchError> {
    let lp = dispatch_lp(s, net_loads)?;
    let sol = solve_checked(s, &lp)?;
    Ok(sol.objective_value)
}

fn solve_checked(s: &ThreeBusScenario, lp: &LinearProgram) -> Result<LpSolution, DispatchError> {
    let sol = lp::solve(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        LpStatus::Unbounded => Err(DispatchError::Unbounded),
        LpStatus::Infeasible => Err(DispatchError::Infeasible {
            binding: format!(
                "bus 0 net load {} exceeds import capacity F01 + F02 = {}",
                lp.eq_rhs()[0],
                s.f01 + s.f02
            ),
        }),
    }
}

/// True when some basic variable sits on one of its bounds.
pub fn is_degenerate(lp: &LinearProgram, sol: &LpSolution) -> bool {
    sol.basis.iter().any(|&j| {
        let v = sol.primal[j];
        (v - lp.lower_bounds()[j]).abs() <= BOUND_TOLERANCE
            || (lp.upper_bounds()[j] - v).abs() <= BOUND_TOLERANCE
    })
}

/// Everything produced by one dispatch solve.
#[derive(Debug, Clone)]
pub struct DispatchSolve {
    pub outcome: DispatchOutcome,
    pub lp: LinearProgram,
    pub solution: LpSolution,
}

pub fn solve_ed(s: &ThreeBusScenario, delta: f64) -> Result<DispatchOutcome, DispatchError> {
    solve_ed_detailed(s, delta).map(|d| d.outcome)
}

/// Solves the dispatch at `delta` and prices it.
///
/// At a degenerate optimum the equality duals are not unique. Prices are then
/// taken from a solve at `delta - 1e-7 * max(1, L)` so that a breakpoint
/// carries the prices of the regime to its left.
pub fn solve_ed_detailed(s: &ThreeBusScenario, delta: f64) -> Result<DispatchSolve, DispatchError> {
    let lp = build_ed(s, delta)?;
    let solution = solve_checked(s, &lp)?;

    let mut duals = solution.duals.clone();
    let mut left_limit_prices = false;
    if delta > 0.0 && is_degenerate(&lp, &solution) {
        let step = LEFT_LIMIT_STEP * s.dc_load.max(1.0);
        let left_lp = build_ed(s, (delta - step).max(0.0))?;
        duals = solve_checked(s, &left_lp)?.duals;
        left_limit_prices = true;
    }

    let x = &solution.primal;
    let outcome = DispatchOutcome {
        delta,
        y0: x[0],
        y1: x[1],
        y2: x[2],
        f01: x[3],
        f02: x[4],
        f12: x[5],
        lambda0: duals[0],
        lambda1: duals[1],
        lambda2: duals[2],
        pi1: lme_from_lmp(s, 1, duals[1])?,
        pi2: lme_from_lmp(s, 2, duals[2])?,
        total_cost: solution.objective_value,
        left_limit_prices,
    };
    Ok(DispatchSolve {
        outcome,
        lp,
        solution,
    })
}

/// Maps a price to the emissions rate of the marginal unit: 0 for
/// renewables, `e1` when priced at `c1`, `e2` when priced at `c2`.
pub fn lme_from_lmp(s: &ThreeBusScenario, bus: usize, lambda: f64) -> Result<f64, DispatchError> {
    [(0.0, 0.0), (s.c1, s.e1), (s.c2, s.e2)]
        .into_iter()
        .map(|(price, rate)| ((lambda - price).abs(), rate))
        .filter(|(gap, _)| *gap <= LMP_MATCH_TOLERANCE)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, rate)| rate)
        .ok_or(DispatchError::UnmappedLmp { bus, lambda })
}

/// Data-center objective evaluated at the outcome's prices and shift.
pub fn dc_cost_numeric(s: &ThreeBusScenario, out: &DispatchOutcome) -> f64 {
    let a = s.alpha_dc;
    let (at1, at2) = (out.delta, s.dc_load - out.delta);
    a * (out.lambda1 * at1 + out.lambda2 * at2) + (1.0 - a) * (out.pi1 * at1 + out.pi2 * at2)
}

/// Social-welfare objective evaluated at the outcome's prices and shift.
pub fn sw_cost_numeric(s: &ThreeBusScenario, out: &DispatchOutcome) -> f64 {
    let a = s.alpha_sw;
    let (at1, at2) = (s.l1 + out.delta, s.l2 - out.delta);
    a * (out.lambda1 * at1 + out.lambda2 * at2) + (1.0 - a) * (out.pi1 * at1 + out.pi2 * at2)
}
