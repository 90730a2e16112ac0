//! Carbon-aware load shifting on a three-bus network.
//!
//! A data center at bus 2 can move up to `L` MW of load to bus 1. Bus 0
//! supplies free renewable energy over capacity-limited lines. Two agents
//! judge each shift: the data center, which counts only its own load at the
//! local marginal rate, and a social planner, which counts every bus. The
//! crate computes both objectives two ways (an economic dispatch LP solved
//! by an in-tree simplex, and closed-form piecewise-linear expressions),
//! finds each agent's optimal shift and classifies whether they agree.

pub mod closed_form;
pub mod dispatch;
pub mod error;
pub mod format;
pub mod lp;
pub mod par;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use closed_form::{
    alignment_clause, classify_alignment, objective_dc, objective_sw, optimal_shift_dc,
    optimal_shift_sw, AlignmentClause, AlignmentReport, OptimalShift, PiecewiseObjective,
    ShiftChoice, Verdict,
};
pub use dispatch::{solve_ed, DispatchOutcome, Regime};
pub use error::{ClosedFormError, DispatchError, LpError, ScenarioError, SweepError};
pub use lp::{solve, verify_kkt, KktReport, LinearProgram, LpSolution, LpStatus};
pub use par::Execution;
pub use scenario::{Agent, GenBus, ThreeBusScenario, ValidityReport};
