//! Closed-form objectives, optimal shifts and the alignment classification.
//!
//! Inside the validated setting both objectives are two-piece linear in the
//! shift with a breakpoint at τ. The left piece (δ ≤ τ) prices bus 1 at zero;
//! the right piece prices it at the bus-1 generator. Since the left piece
//! always decreases, only τ and L can minimize either objective.

use std::fmt;

use crate::error::ClosedFormError;
use crate::format::num;
use crate::scenario::{Agent, GenBus, ThreeBusScenario};

/// Tolerance for ties between τ and a shift threshold. Ties go to τ.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn require_valid(s: &ThreeBusScenario) -> Result<f64, ClosedFormError> {
    let report = s.validate();
    if !report.is_valid() {
        return Err(ClosedFormError::InvalidScenario(Box::new(report)));
    }
    Ok(report.tau.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseObjective {
    pub agent: Agent,
    pub breakpoint: f64,
    pub left_intercept: f64,
    pub left_slope: f64,
    pub right_intercept: f64,
    pub right_slope: f64,
    /// End of the domain `[0, L]`.
    pub domain_end: f64,
}

impl PiecewiseObjective {
    pub const CSV_HEADER: &'static str =
        "agent,breakpoint,left_intercept,left_slope,right_intercept,right_slope,domain_end";

    /// Evaluates the objective; the breakpoint belongs to the left piece.
    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= self.breakpoint {
            self.left_intercept + self.left_slope * delta
        } else {
            self.right_intercept + self.right_slope * delta
        }
    }

    /// `right(τ) - left(τ)`.
    pub fn jump(&self) -> f64 {
        let t = self.breakpoint;
        (self.right_intercept + self.right_slope * t) - (self.left_intercept + self.left_slope * t)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.agent,
            num(self.breakpoint),
            num(self.left_intercept),
            num(self.left_slope),
            num(self.right_intercept),
            num(self.right_slope),
            num(self.domain_end)
        )
    }
}

impl fmt::Display for PiecewiseObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C_{}(delta) = {} + ({}) delta   for 0 <= delta <= {}\n{:>w$} {} + ({}) delta   for {} < delta <= {}",
            self.agent,
            num(self.left_intercept),
            num(self.left_slope),
            num(self.breakpoint),
            "",
            num(self.right_intercept),
            num(self.right_slope),
            num(self.breakpoint),
            num(self.domain_end),
            w = 12
        )
    }
}

/// Data-center objective: left `η2 L - η2 δ`, right `η2 L + (η1 - η2) δ`.
pub fn objective_dc(s: &ThreeBusScenario) -> Result<PiecewiseObjective, ClosedFormError> {
    let tau = require_valid(s)?;
    Ok(objective_dc_unchecked(s, tau))
}

/// Social-welfare objective: left `η2 l2 - η2 δ`, right
/// `η1 l1 + η2 l2 + (η1 - η2) δ`.
pub fn objective_sw(s: &ThreeBusScenario) -> Result<PiecewiseObjective, ClosedFormError> {
    let tau = require_valid(s)?;
    Ok(objective_sw_unchecked(s, tau))
}

fn objective_dc_unchecked(s: &ThreeBusScenario, tau: f64) -> PiecewiseObjective {
    let agent = Agent::DataCenter;
    let (eta1, eta2) = (s.eta(GenBus::One, agent), s.eta(GenBus::Two, agent));
    PiecewiseObjective {
        agent,
        breakpoint: tau,
        left_intercept: eta2 * s.dc_load,
        left_slope: -eta2,
        right_intercept: eta2 * s.dc_load,
        right_slope: eta1 - eta2,
        domain_end: s.dc_load,
    }
}

fn objective_sw_unchecked(s: &ThreeBusScenario, tau: f64) -> PiecewiseObjective {
    let agent = Agent::SocialWelfare;
    let (eta1, eta2) = (s.eta(GenBus::One, agent), s.eta(GenBus::Two, agent));
    PiecewiseObjective {
        agent,
        breakpoint: tau,
        left_intercept: eta2 * s.l2,
        left_slope: -eta2,
        right_intercept: eta1 * s.l1 + eta2 * s.l2,
        right_slope: eta1 - eta2,
        domain_end: s.dc_load,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftChoice {
    /// Stop at the breakpoint τ.
    Threshold,
    /// Shift the whole load L.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalShift {
    pub agent: Agent,
    pub delta: f64,
    pub value: f64,
    pub choice: ShiftChoice,
    /// τ at or above this value makes stopping at τ optimal.
    pub threshold: f64,
}

/// DC threshold `L - (η1/η2) L`; SW threshold `L - (η1/η2)(L + l1)`.
pub fn shift_threshold(s: &ThreeBusScenario, agent: Agent) -> Result<f64, ClosedFormError> {
    let (eta1, eta2) = (s.eta(GenBus::One, agent), s.eta(GenBus::Two, agent));
    if eta2 == 0.0 {
        return Err(ClosedFormError::DegenerateWeights(agent));
    }
    let reach = match agent {
        Agent::DataCenter => s.dc_load,
        Agent::SocialWelfare => s.dc_load + s.l1,
    };
    Ok(s.dc_load - (eta1 / eta2) * reach)
}

fn optimal_shift(s: &ThreeBusScenario, agent: Agent) -> Result<OptimalShift, ClosedFormError> {
    let tau = require_valid(s)?;
    let threshold = shift_threshold(s, agent)?;
    let objective = match agent {
        Agent::DataCenter => objective_dc_unchecked(s, tau),
        Agent::SocialWelfare => objective_sw_unchecked(s, tau),
    };
    // τ may sit above L by the validity tolerance; never shift more than L.
    let (choice, delta) = if tau >= threshold - TIE_TOLERANCE {
        (ShiftChoice::Threshold, tau.min(s.dc_load))
    } else {
        (ShiftChoice::Full, s.dc_load)
    };
    Ok(OptimalShift {
        agent,
        delta,
        value: objective.eval(delta),
        choice,
        threshold,
    })
}

pub fn optimal_shift_dc(s: &ThreeBusScenario) -> Result<OptimalShift, ClosedFormError> {
    optimal_shift(s, Agent::DataCenter)
}

pub fn optimal_shift_sw(s: &ThreeBusScenario) -> Result<OptimalShift, ClosedFormError> {
    optimal_shift(s, Agent::SocialWelfare)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Aligned,
    Misaligned,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Aligned => "aligned",
            Verdict::Misaligned => "misaligned",
        })
    }
}

/// The alignment clause that decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignmentClause {
    /// `τ >= L - (η1/η2)^DC L`: both stop at τ.
    DcStopsAtThreshold,
    /// `τ < L - (η1/η2)^SW (L + l1)`: both shift fully.
    SwShiftsFully,
    /// `SW threshold <= τ < DC threshold`: the data center overshoots τ.
    MisalignmentBand,
    /// `DC threshold <= τ < SW threshold`: the data center stops at τ while
    /// the planner wants the full shift. Only possible when the SW threshold
    /// exceeds the DC threshold, which needs distinct weights.
    InvertedBand,
}

impl AlignmentClause {
    pub fn label(&self) -> &'static str {
        match self {
            AlignmentClause::DcStopsAtThreshold => "dc-stops-at-tau",
            AlignmentClause::SwShiftsFully => "sw-shifts-fully",
            AlignmentClause::MisalignmentBand => "misalignment-band",
            AlignmentClause::InvertedBand => "inverted-band",
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            AlignmentClause::DcStopsAtThreshold | AlignmentClause::SwShiftsFully => {
                Verdict::Aligned
            }
            AlignmentClause::MisalignmentBand | AlignmentClause::InvertedBand => {
                Verdict::Misaligned
            }
        }
    }
}

/// Picks the clause from τ and the two thresholds alone.
pub fn alignment_clause(tau: f64, dc_threshold: f64, sw_threshold: f64) -> AlignmentClause {
    let dc_stops = tau >= dc_threshold - TIE_TOLERANCE;
    let sw_stops = tau >= sw_threshold - TIE_TOLERANCE;
    match (dc_stops, sw_stops) {
        (true, false) => AlignmentClause::InvertedBand,
        (true, true) => AlignmentClause::DcStopsAtThreshold,
        (false, false) => AlignmentClause::SwShiftsFully,
        (false, true) => AlignmentClause::MisalignmentBand,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentReport {
    pub tau: f64,
    pub dc_threshold: f64,
    pub sw_threshold: f64,
    pub delta_star_dc: f64,
    pub delta_star_sw: f64,
    pub verdict: Verdict,
    pub clause: AlignmentClause,
    pub sw_at_dc_opt: f64,
    pub sw_at_sw_opt: f64,
    pub dc_at_dc_opt: f64,
    pub dc_at_sw_opt: f64,
    /// `C_SW(δ*_DC) - C_SW(δ*_SW)`.
    pub externality_at_dc_choice: f64,
    /// `C_SW(δ*_DC) / C_SW(δ*_SW)`.
    pub suboptimality_ratio: f64,
    /// `C_SW - C_DC` at `δ*_DC`.
    pub residual_at_dc_opt: f64,
    /// `C_SW - C_DC` at `δ*_SW`.
    pub residual_at_sw_opt: f64,
}

impl AlignmentReport {
    pub const CSV_HEADER: &'static str = "tau,dc_threshold,sw_threshold,delta_star_dc,delta_star_sw,verdict,clause,\
sw_at_dc_opt,sw_at_sw_opt,dc_at_dc_opt,dc_at_sw_opt,externality,suboptimality_ratio,residual_at_dc_opt,residual_at_sw_opt";

    pub fn csv_row(&self) -> String {
        let nums = |xs: &[f64]| xs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",");
        format!(
            "{},{},{},{}",
            nums(&[
                self.tau,
                self.dc_threshold,
                self.sw_threshold,
                self.delta_star_dc,
                self.delta_star_sw
            ]),
            self.verdict,
            self.clause.label(),
            nums(&[
                self.sw_at_dc_opt,
                self.sw_at_sw_opt,
                self.dc_at_dc_opt,
                self.dc_at_sw_opt,
                self.externality_at_dc_choice,
                self.suboptimality_ratio,
                self.residual_at_dc_opt,
                self.residual_at_sw_opt,
            ])
        )
    }
}

impl fmt::Display for AlignmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verdict              {} ({})",
            self.verdict,
            self.clause.label()
        )?;
        writeln!(f, "tau                  {}", num(self.tau))?;
        writeln!(f, "DC threshold         {}", num(self.dc_threshold))?;
        writeln!(f, "SW threshold         {}", num(self.sw_threshold))?;
        writeln!(f, "delta*_DC            {}", num(self.delta_star_dc))?;
        writeln!(f, "delta*_SW            {}", num(self.delta_star_sw))?;
        writeln!(f, "C_SW(delta*_DC)      {}", num(self.sw_at_dc_opt))?;
        writeln!(f, "C_SW(delta*_SW)      {}", num(self.sw_at_sw_opt))?;
        writeln!(
            f,
            "externality          {}",
            num(self.externality_at_dc_choice)
        )?;
        writeln!(f, "suboptimality ratio  {}", num(self.suboptimality_ratio))?;
        writeln!(f, "residual at DC opt   {}", num(self.residual_at_dc_opt))?;
        write!(f, "residual at SW opt   {}", num(self.residual_at_sw_opt))
    }
}

pub fn classify_alignment(s: &ThreeBusScenario) -> Result<AlignmentReport, ClosedFormError> {
    let dc = optimal_shift_dc(s)?;
    let sw = optimal_shift_sw(s)?;
    let tau = s.tau().value;
    let dc_obj = objective_dc_unchecked(s, tau);
    let sw_obj = objective_sw_unchecked(s, tau);

    let clause = alignment_clause(tau, dc.threshold, sw.threshold);
    let verdict = clause.verdict();
    debug_assert_eq!(
        verdict == Verdict::Aligned,
        (dc.delta - sw.delta).abs() <= TIE_TOLERANCE,
        "clause disagrees with optimal shifts"
    );

    let sw_at_dc_opt = sw_obj.eval(dc.delta);
    let sw_at_sw_opt = sw.value;
    // Positive on valid scenarios: the bus-2 check keeps l2 - L above zero and
    // both candidate values contain an η2 (l2 - δ) term with δ <= L.
    assert!(
        sw_at_sw_opt > 0.0,
        "social cost at its optimum must be positive"
    );
    let dc_at_dc_opt = dc.value;
    let dc_at_sw_opt = dc_obj.eval(sw.delta);

    Ok(AlignmentReport {
        tau,
        dc_threshold: dc.threshold,
        sw_threshold: sw.threshold,
        delta_star_dc: dc.delta,
        delta_star_sw: sw.delta,
        verdict,
        clause,
        sw_at_dc_opt,
        sw_at_sw_opt,
        dc_at_dc_opt,
        dc_at_sw_opt,
        externality_at_dc_choice: sw_at_dc_opt - sw_at_sw_opt,
        suboptimality_ratio: sw_at_dc_opt / sw_at_sw_opt,
        residual_at_dc_opt: sw_at_dc_opt - dc_at_dc_opt,
        residual_at_sw_opt: sw_at_sw_opt - dc_at_sw_opt,
    })
}
