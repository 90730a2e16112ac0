//! Shift sweeps, capacity heatmaps and the closed-form vs dispatch cross-check.

use std::fmt;

use crate::closed_form::{self, AlignmentClause, AlignmentReport, TIE_TOLERANCE};
use crate::dispatch::{self, DispatchOutcome, Regime};
use crate::error::SweepError;
use crate::format::num;
use crate::lp::verify_kkt;
use crate::par::{self, Execution};
use crate::scenario::{Agent, ThreeBusScenario};

/// Max allowed |closed form - dispatch| on either objective.
pub const CROSS_PATH_TOLERANCE: f64 = 1e-6;

/// Grid points closer than this to τ are excluded from the cross-check.
pub const BREAKPOINT_EXCLUSION: f64 = 1e-6;

/// `n` evenly spaced points from `a` to `b`, with both endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn require_valid(s: &ThreeBusScenario) -> Result<f64, SweepError> {
    let report = s.validate();
    if report.is_valid() {
        Ok(report.tau.value)
    } else {
        Err(SweepError::Invalid(Box::new(report)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    /// Regime by closed-form membership: `delta <= tau` is renewable.
    pub regime: Regime,
    pub dc_analytic: f64,
    pub dc_numeric: f64,
    pub sw_analytic: f64,
    pub sw_numeric: f64,
    pub outcome: DispatchOutcome,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "delta,regime,c_dc,c_sw,residual,lambda1,pi1,\
c_dc_numeric,c_sw_numeric,c_dc_diff,c_sw_diff";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            num(self.delta),
            self.regime.label(),
            num(self.dc_analytic),
            num(self.sw_analytic),
            num(self.sw_analytic - self.dc_analytic),
            num(self.outcome.lambda1),
            num(self.outcome.pi1),
            num(self.dc_numeric),
            num(self.sw_numeric),
            num(self.dc_numeric - self.dc_analytic),
            num(self.sw_numeric - self.sw_analytic),
        )
    }
}

/// Evaluates both objectives on `resolution` shifts spanning `[0, L]`.
pub fn sweep(
    s: &ThreeBusScenario,
    resolution: usize,
    exec: Execution,
) -> Result<Vec<SweepRow>, SweepError> {
    let tau = require_valid(s)?;
    let dc = closed_form::objective_dc(s)?;
    let sw = closed_form::objective_sw(s)?;
    let grid = linspace(0.0, s.dc_load, resolution);
    par::map(exec, &grid, |&delta| {
        let outcome = dispatch::solve_ed(s, delta)?;
        Ok(SweepRow {
            delta,
            regime: if delta <= tau {
                Regime::Renewable
            } else {
                Regime::LocalGeneration
            },
            dc_analytic: dc.eval(delta),
            dc_numeric: dispatch::dc_cost_numeric(s, &outcome),
            sw_analytic: sw.eval(delta),
            sw_numeric: dispatch::sw_cost_numeric(s, &outcome),
            outcome,
        })
    })
    .into_iter()
    .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv(SweepRow::CSV_HEADER, rows.iter().map(SweepRow::csv_row))
}

pub fn dispatch_csv(rows: &[SweepRow]) -> String {
    csv(
        DispatchOutcome::CSV_HEADER,
        rows.iter().map(|r| r.outcome.csv_row()),
    )
}

fn csv(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapGrid {
    pub f01: (f64, f64),
    pub f12: (f64, f64),
    pub resolution: usize,
}

impl HeatmapGrid {
    pub const DEFAULT_RESOLUTION: usize = 50;

    /// `F12` over `[0, 1]` and `F01` over `[l1 + F12_min, 3]`.
    pub fn default_for(s: &ThreeBusScenario) -> Self {
        Self::with_ranges(s, None, None, Self::DEFAULT_RESOLUTION)
    }

    pub fn with_ranges(
        s: &ThreeBusScenario,
        f01: Option<(f64, f64)>,
        f12: Option<(f64, f64)>,
        resolution: usize,
    ) -> Self {
        let f12 = f12.unwrap_or((0.0, 1.0));
        let f01 = f01.unwrap_or((s.l1 + f12.0, 3.0));
        Self {
            f01,
            f12,
            resolution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellVerdict {
    Aligned,
    Misaligned,
    Invalid,
}

impl CellVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            CellVerdict::Aligned => "aligned",
            CellVerdict::Misaligned => "misaligned",
            CellVerdict::Invalid => "invalid",
        }
    }
}

/// One `(F01, F12)` cell. Numeric fields are NaN for invalid cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapCell {
    pub f01: f64,
    pub f12: f64,
    pub tau: f64,
    pub delta_star_dc: f64,
    pub delta_star_sw: f64,
    pub sw_at_sw_opt: f64,
    pub sw_at_dc_opt: f64,
    pub ratio: f64,
    pub verdict: CellVerdict,
    pub clause: Option<AlignmentClause>,
}

impl HeatmapCell {
    pub const CSV_HEADER: &'static str =
        "f01,f12,tau,delta_star_dc,delta_star_sw,sw_at_sw_opt,sw_at_dc_opt,ratio,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            num(self.f01),
            num(self.f12),
            num(self.tau),
            num(self.delta_star_dc),
            num(self.delta_star_sw),
            num(self.sw_at_sw_opt),
            num(self.sw_at_dc_opt),
            num(self.ratio),
            self.verdict.label()
        )
    }

    fn from_report(f01: f64, f12: f64, r: &AlignmentReport) -> Self {
        Self {
            f01,
            f12,
            tau: r.tau,
            delta_star_dc: r.delta_star_dc,
            delta_star_sw: r.delta_star_sw,
            sw_at_sw_opt: r.sw_at_sw_opt,
            sw_at_dc_opt: r.sw_at_dc_opt,
            ratio: r.suboptimality_ratio,
            verdict: match r.verdict {
                closed_form::Verdict::Aligned => CellVerdict::Aligned,
                closed_form::Verdict::Misaligned => CellVerdict::Misaligned,
            },
            clause: Some(r.clause),
        }
    }

    fn invalid(f01: f64, f12: f64, tau: f64) -> Self {
        Self {
            f01,
            f12,
            tau,
            delta_star_dc: f64::NAN,
            delta_star_sw: f64::NAN,
            sw_at_sw_opt: f64::NAN,
            sw_at_dc_opt: f64::NAN,
            ratio: f64::NAN,
            verdict: CellVerdict::Invalid,
            clause: None,
        }
    }
}

/// The `F01` capacity at which τ equals one agent's shift threshold, for a
/// given `F12`. `f01` is `None` when τ stays below the threshold for every
/// `F01` because renewable supply caps it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub f12: f64,
    pub agent: Agent,
    pub threshold: f64,
    pub f01: Option<f64>,
}

impl BoundaryPoint {
    pub const CSV_HEADER: &'static str = "f12,agent,threshold,f01";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            num(self.f12),
            self.agent,
            num(self.threshold),
            self.f01.map(num).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub grid: HeatmapGrid,
    /// Row-major: `F12` outer, `F01` inner.
    pub cells: Vec<HeatmapCell>,
    pub boundary: Vec<BoundaryPoint>,
}

impl Heatmap {
    pub fn cells_csv(&self) -> String {
        csv(
            HeatmapCell::CSV_HEADER,
            self.cells.iter().map(HeatmapCell::csv_row),
        )
    }

    pub fn boundary_csv(&self) -> String {
        csv(
            BoundaryPoint::CSV_HEADER,
            self.boundary.iter().map(BoundaryPoint::csv_row),
        )
    }

    /// Misalignment as read off the boundary curves: the cell sits on
    /// opposite sides of the DC and SW curves.
    pub fn boundary_predicts_misaligned(&self, cell: &HeatmapCell) -> bool {
        let beyond = |agent: Agent| {
            self.boundary
                .iter()
                .find(|b| b.agent == agent && b.f12 == cell.f12)
                .and_then(|b| b.f01)
                .is_some_and(|edge| cell.f01 >= edge - TIE_TOLERANCE)
        };
        beyond(Agent::DataCenter) != beyond(Agent::SocialWelfare)
    }
}

/// Solves `tau(F01, F12) = threshold` for `F01`.
fn boundary_f01(s: &ThreeBusScenario, f12: f64, threshold: f64) -> Option<f64> {
    let renewable_cap = -s.l0 - s.f02;
    let renewable_tau = renewable_cap - f12 - s.l1;
    if renewable_tau > threshold {
        Some(threshold + s.l1 + f12)
    } else if renewable_tau == threshold {
        Some(renewable_cap)
    } else {
        None
    }
}

pub fn heatmap(s: &ThreeBusScenario, grid: HeatmapGrid, exec: Execution) -> Heatmap {
    let f01s = linspace(grid.f01.0, grid.f01.1, grid.resolution);
    let f12s = linspace(grid.f12.0, grid.f12.1, grid.resolution);
    let points: Vec<(f64, f64)> = f12s
        .iter()
        .flat_map(|&f12| f01s.iter().map(move |&f01| (f01, f12)))
        .collect();

    let cells = par::map(exec, &points, |&(f01, f12)| {
        let cell = ThreeBusScenario { f01, f12, ..*s };
        match closed_form::classify_alignment(&cell) {
            Ok(r) => HeatmapCell::from_report(f01, f12, &r),
            Err(_) => HeatmapCell::invalid(f01, f12, cell.tau().value),
        }
    });

    let mut boundary = Vec::new();
    for &f12 in &f12s {
        for agent in [Agent::DataCenter, Agent::SocialWelfare] {
            if let Ok(threshold) = closed_form::shift_threshold(s, agent) {
                boundary.push(BoundaryPoint {
                    f12,
                    agent,
                    threshold,
                    f01: boundary_f01(s, f12, threshold),
                });
            }
        }
    }
    Heatmap {
        grid,
        cells,
        boundary,
    }
}

/// Closed form vs dispatch at one shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub delta: f64,
    pub dc_analytic: f64,
    pub dc_numeric: f64,
    pub sw_analytic: f64,
    pub sw_numeric: f64,
    pub lambda2_error: f64,
    pub kkt_worst: f64,
    pub kkt_ok: bool,
}

impl PointCheck {
    pub fn dc_error(&self) -> f64 {
        (self.dc_analytic - self.dc_numeric).abs()
    }

    pub fn sw_error(&self) -> f64 {
        (self.sw_analytic - self.sw_numeric).abs()
    }
}

pub fn check_point(s: &ThreeBusScenario, delta: f64) -> Result<PointCheck, SweepError> {
    let dc = closed_form::objective_dc(s)?;
    let sw = closed_form::objective_sw(s)?;
    let solved = dispatch::solve_ed_detailed(s, delta)?;
    let kkt = verify_kkt(&solved.lp, &solved.solution);
    let out = &solved.outcome;
    Ok(PointCheck {
        delta,
        dc_analytic: dc.eval(delta),
        dc_numeric: dispatch::dc_cost_numeric(s, out),
        sw_analytic: sw.eval(delta),
        sw_numeric: dispatch::sw_cost_numeric(s, out),
        lambda2_error: (out.lambda2 - s.c2).abs(),
        kkt_worst: kkt.worst(),
        kkt_ok: kkt.is_satisfied(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub tau: f64,
    pub dc_load: f64,
    pub resolution: usize,
    pub excluded: Vec<f64>,
    pub checks: Vec<PointCheck>,
    /// The breakpoint itself, priced with left-limit duals.
    pub breakpoint: PointCheck,
    pub tolerance: f64,
}

impl VerifyReport {
    fn worst_by(&self, key: impl Fn(&PointCheck) -> f64) -> Option<&PointCheck> {
        self.checks
            .iter()
            .fold(None, |best: Option<&PointCheck>, c| match best {
                Some(b) if key(b) >= key(c) => Some(b),
                _ => Some(c),
            })
    }

    pub fn max_dc_error(&self) -> f64 {
        self.worst_by(PointCheck::dc_error)
            .map_or(0.0, PointCheck::dc_error)
    }

    pub fn max_sw_error(&self) -> f64 {
        self.worst_by(PointCheck::sw_error)
            .map_or(0.0, PointCheck::sw_error)
    }

    pub fn kkt_failures(&self) -> usize {
        self.checks
            .iter()
            .chain([&self.breakpoint])
            .filter(|c| !c.kkt_ok)
            .count()
    }

    pub fn passed(&self) -> bool {
        let t = self.tolerance;
        self.max_dc_error() <= t
            && self.max_sw_error() <= t
            && self.breakpoint.dc_error() <= t
            && self.breakpoint.sw_error() <= t
            && self.kkt_failures() == 0
            && self.checks.iter().all(|c| c.lambda2_error <= t)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |x: f64| format!("{x:.3e}");
        writeln!(
            f,
            "cross-path verification: closed form vs economic dispatch"
        )?;
        writeln!(
            f,
            "tau = {}, L = {}, grid = {} points",
            num(self.tau),
            num(self.dc_load),
            self.resolution
        )?;
        if self.excluded.is_empty() {
            writeln!(
                f,
                "breakpoint exclusion: no grid point within {} of tau",
                e(BREAKPOINT_EXCLUSION)
            )?;
        } else {
            let list: Vec<String> = self.excluded.iter().map(|d| num(*d)).collect();
            writeln!(
                f,
                "breakpoint exclusion: skipped delta = {}",
                list.join(", ")
            )?;
        }
        writeln!(f, "points checked: {}", self.checks.len())?;
        for (name, key) in [
            ("C_DC", PointCheck::dc_error as fn(&PointCheck) -> f64),
            ("C_SW", PointCheck::sw_error),
        ] {
            match self.worst_by(key) {
                Some(w) => {
                    let (a, n) = if name == "C_DC" {
                        (w.dc_analytic, w.dc_numeric)
                    } else {
                        (w.sw_analytic, w.sw_numeric)
                    };
                    writeln!(
                        f,
                        "max |{name} analytic - numeric| = {} at delta = {} (analytic {}, numeric {})",
                        e(key(w)),
                        num(w.delta),
                        num(a),
                        num(n)
                    )?;
                }
                None => writeln!(f, "max |{name} analytic - numeric| = n/a")?,
            }
        }
        let b = &self.breakpoint;
        writeln!(
            f,
            "at delta = tau (left-limit prices): C_DC error {}, C_SW error {}",
            e(b.dc_error()),
            e(b.sw_error())
        )?;
        let l2 = self
            .checks
            .iter()
            .map(|c| c.lambda2_error)
            .fold(0.0, f64::max);
        writeln!(f, "max |lambda2 - c2| = {}", e(l2))?;
        let kkt = self
            .checks
            .iter()
            .chain([b])
            .map(|c| c.kkt_worst)
            .fold(0.0, f64::max);
        writeln!(
            f,
            "LP optimality conditions: worst violation {}, failures {}",
            e(kkt),
            self.kkt_failures()
        )?;
        write!(
            f,
            "tolerance {}: {}",
            e(self.tolerance),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs the cross-check on `resolution` shifts over `[0, L]`, skipping those
/// within [`BREAKPOINT_EXCLUSION`] of τ, plus τ itself.
pub fn verify(
    s: &ThreeBusScenario,
    resolution: usize,
    exec: Execution,
) -> Result<VerifyReport, SweepError> {
    let tau = require_valid(s)?;
    let (kept, excluded): (Vec<f64>, Vec<f64>) = linspace(0.0, s.dc_load, resolution)
        .into_iter()
        .partition(|d| (d - tau).abs() > BREAKPOINT_EXCLUSION);
    let checks = par::map(exec, &kept, |&d| check_point(s, d))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let breakpoint = check_point(s, tau.min(s.dc_load))?;
    Ok(VerifyReport {
        tau,
        dc_load: s.dc_load,
        resolution,
        excluded,
        checks,
        breakpoint,
        tolerance: CROSS_PATH_TOLERANCE,
    })
}
