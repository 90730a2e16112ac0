//! The three-bus system: parameters, the setting checks that the closed-form
//! results rely on, and the derived quantities η and τ.
//!
//! Bus 0 holds zero-cost, zero-emission renewable supply (`l0 < 0`, with
//! `-l0` MW available). Buses 1 and 2 hold dispatchable generators and
//! inflexible load. The data-center load `L` is counted inside `l2` at zero
//! shift; shifting `delta` MW moves the net loads to `l1 + delta` and
//! `l2 - delta`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::ScenarioError;

/// Margin below which a setting condition is reported as borderline.
pub const CONDITION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Agent {
    DataCenter,
    SocialWelfare,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::DataCenter => "DC",
            Agent::SocialWelfare => "SW",
        })
    }
}

/// A bus with a dispatchable generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenBus {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBusScenario {
    pub c1: f64,
    pub c2: f64,
    pub e1: f64,
    pub e2: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    /// Total shiftable data-center load `L`.
    pub dc_load: f64,
    pub f01: f64,
    pub f02: f64,
    pub f12: f64,
    pub alpha_dc: f64,
    pub alpha_sw: f64,
}

const KEYS: [&str; 13] = [
    "c1", "c2", "e1", "e2", "l0", "l1", "l2", "L", "F01", "F02", "F12", "alpha_dc", "alpha_sw",
];

impl ThreeBusScenario {
    /// Reference instance: `c = (1, 2)`, `e = (1, 2)`, `l0 = -2.5`, `l1 = 1`,
    /// `l2 = 2`, `L = 1`, `F = (1.5, 0.5, 0.4)`, both weights 1.
    pub fn canonical() -> Self {
        Self {
            c1: 1.0,
            c2: 2.0,
            e1: 1.0,
            e2: 2.0,
            l0: -2.5,
            l1: 1.0,
            l2: 2.0,
            dc_load: 1.0,
            f01: 1.5,
            f02: 0.5,
            f12: 0.4,
            alpha_dc: 1.0,
            alpha_sw: 1.0,
        }
    }

    fn values(&self) -> [f64; 13] {
        [
            self.c1,
            self.c2,
            self.e1,
            self.e2,
            self.l0,
            self.l1,
            self.l2,
            self.dc_load,
            self.f01,
            self.f02,
            self.f12,
            self.alpha_dc,
            self.alpha_sw,
        ]
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "e1" => &mut self.e1,
            "e2" => &mut self.e2,
            "l0" => &mut self.l0,
            "l1" => &mut self.l1,
            "l2" => &mut self.l2,
            "L" => &mut self.dc_load,
            "F01" => &mut self.f01,
            "F02" => &mut self.f02,
            "F12" => &mut self.f12,
            "alpha_dc" => &mut self.alpha_dc,
            "alpha_sw" => &mut self.alpha_sw,
            _ => return None,
        })
    }

    /// Checks the parameter domain. Returns the offending key and a message.
    pub fn check_domain(&self) -> Result<(), (&'static str, String)> {
        for (key, v) in KEYS.iter().zip(self.values()) {
            if !v.is_finite() {
                return Err((key, format!("{key} must be finite")));
            }
        }
        let nonneg = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("e1", self.e1),
            ("e2", self.e2),
            ("l1", self.l1),
            ("l2", self.l2),
            ("L", self.dc_load),
            ("F01", self.f01),
            ("F02", self.f02),
            ("F12", self.f12),
        ];
        for (key, v) in nonneg {
            if v < 0.0 {
                return Err((key, format!("{key} must be nonnegative, got {v}")));
            }
        }
        if self.l0 > 0.0 {
            return Err((
                "l0",
                format!(
                    "l0 is minus the renewable supply and must be <= 0, got {}",
                    self.l0
                ),
            ));
        }
        for (key, v) in [("alpha_dc", self.alpha_dc), ("alpha_sw", self.alpha_sw)] {
            if !(0.0..=1.0).contains(&v) {
                return Err((key, format!("{key} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn alpha(&self, agent: Agent) -> f64 {
        match agent {
            Agent::DataCenter => self.alpha_dc,
            Agent::SocialWelfare => self.alpha_sw,
        }
    }

    /// Weighted marginal rate `alpha * c + (1 - alpha) * e` of `bus` for `agent`.
    pub fn eta(&self, bus: GenBus, agent: Agent) -> f64 {
        let a = self.alpha(agent);
        let (c, e) = match bus {
            GenBus::One => (self.c1, self.e1),
            GenBus::Two => (self.c2, self.e2),
        };
        a * c + (1.0 - a) * e
    }

    pub fn tau(&self) -> Threshold {
        let congestion = self.f01 - self.f12 - self.l1;
        let renewable = -self.l0 - self.f02 - self.f12 - self.l1;
        let binding = if (congestion - renewable).abs() <= CONDITION_TOLERANCE {
            ThresholdBinding::Both
        } else if congestion < renewable {
            ThresholdBinding::Congestion
        } else {
            ThresholdBinding::RenewableSaturation
        };
        Threshold {
            value: congestion.min(renewable),
            binding,
        }
    }

    pub fn validate(&self) -> ValidityReport {
        let tau = self.tau();
        let strict = |margin: f64| margin > CONDITION_TOLERANCE;
        let mk = |condition, margin: f64, holds: bool, detail: String| ConditionCheck {
            condition,
            margin,
            holds,
            borderline: margin.abs() <= CONDITION_TOLERANCE,
            detail,
        };

        let m1 = self.c2 - self.c1;
        let m2 = self.l0 + self.l1 + self.l2;
        let m3a = self.f01 + self.f02.min(self.f12) - self.l1;
        let m3b = self.l0.abs() - self.l1;
        let m3 = m3a.min(m3b);
        let m4 = self.l2 - self.dc_load - (self.f02 + self.f12);
        let m5 = tau.value;
        let m6 = self.dc_load - tau.value;

        let checks = [
            mk(
                Condition::CheaperGeneratorAtBus1,
                m1,
                strict(m1),
                format!("c1 = {} vs c2 = {}", self.c1, self.c2),
            ),
            mk(
                Condition::PositiveNetLoad,
                m2,
                strict(m2),
                format!("l0 + l1 + l2 = {}", m2),
            ),
            mk(
                Condition::Bus1ServableByRenewables,
                m3,
                strict(m3),
                format!(
                    "l1 = {} vs F01 + min(F02, F12) = {} and |l0| = {}",
                    self.l1,
                    self.f01 + self.f02.min(self.f12),
                    self.l0.abs()
                ),
            ),
            mk(
                Condition::Bus2NeedsLocalGeneration,
                m4,
                strict(m4),
                format!(
                    "l2 - L = {} vs F02 + F12 = {}",
                    self.l2 - self.dc_load,
                    self.f02 + self.f12
                ),
            ),
            mk(
                Condition::ThresholdPositive,
                m5,
                strict(m5),
                format!("tau = {}", tau.value),
            ),
            mk(
                Condition::ThresholdWithinShift,
                m6,
                m6 >= -CONDITION_TOLERANCE,
                format!("tau = {} vs L = {}", tau.value, self.dc_load),
            ),
        ];
        ValidityReport { checks, tau }
    }

    /// Parses the `key = value` scenario format. See the crate README.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut s = Self {
            c1: f64::NAN,
            c2: f64::NAN,
            e1: f64::NAN,
            e2: f64::NAN,
            l0: f64::NAN,
            l1: f64::NAN,
            l2: f64::NAN,
            dc_load: f64::NAN,
            f01: f64::NAN,
            f02: f64::NAN,
            f12: f64::NAN,
            alpha_dc: f64::NAN,
            alpha_sw: f64::NAN,
        };
        let mut seen: [Option<usize>; 13] = [None; 13];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| ScenarioError::Parse { line, message };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
            let key = key.trim();
            let value = value.trim();
            let k = KEYS
                .iter()
                .position(|&k| k == key)
                .ok_or_else(|| err(format!("unknown key `{key}`")))?;
            if let Some(prev) = seen[k] {
                return Err(err(format!(
                    "duplicate key `{key}` (first set on line {prev})"
                )));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| err(format!("`{value}` is not a decimal number")))?;
            *s.slot(key).expect("key from KEYS") = v;
            seen[k] = Some(line);
        }
        if let Some(k) = seen.iter().position(Option::is_none) {
            return Err(ScenarioError::MissingKey(KEYS[k]));
        }
        if let Err((key, message)) = s.check_domain() {
            let k = KEYS.iter().position(|&k| k == key).expect("domain key");
            return Err(ScenarioError::Parse {
                line: seen[k].expect("seen"),
                message,
            });
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes in the scenario file format. Values use the shortest decimal
    /// form that parses back to the same `f64`.
    pub fn to_file_string(&self) -> String {
        KEYS.iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

impl FromStr for ThreeBusScenario {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Which limit sets the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdBinding {
    /// Line (0,1) saturates first.
    Congestion,
    /// Renewable supply runs out first.
    RenewableSaturation,
    /// Both limits coincide.
    Both,
}

impl fmt::Display for ThresholdBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdBinding::Congestion => "congestion",
            ThresholdBinding::RenewableSaturation => "renewable-saturation",
            ThresholdBinding::Both => "both",
        })
    }
}

/// Shift at which bus 1 stops being served at zero marginal cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub binding: ThresholdBinding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    CheaperGeneratorAtBus1,
    PositiveNetLoad,
    Bus1ServableByRenewables,
    Bus2NeedsLocalGeneration,
    ThresholdPositive,
    ThresholdWithinShift,
}

impl Condition {
    pub fn describe(&self) -> &'static str {
        match self {
            Condition::CheaperGeneratorAtBus1 => "1: c1 < c2",
            Condition::PositiveNetLoad => "2: l0 + l1 + l2 > 0",
            Condition::Bus1ServableByRenewables => "3: l1 < F01 + min(F02, F12) and l1 < |l0|",
            Condition::Bus2NeedsLocalGeneration => "4: l2 - L > F02 + F12",
            Condition::ThresholdPositive => "tau > 0",
            Condition::ThresholdWithinShift => "tau <= L",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: Condition,
    /// Signed slack of the inequality; positive when it holds.
    pub margin: f64,
    pub holds: bool,
    pub borderline: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: [ConditionCheck; 6],
    pub tau: Threshold,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, condition: Condition) -> &ConditionCheck {
        self.checks
            .iter()
            .find(|c| c.condition == condition)
            .expect("all conditions present")
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match (c.holds, c.borderline) {
                (true, false) => "ok  ",
                (true, true) => "ok? ",
                (false, true) => "FAIL?",
                (false, false) => "FAIL",
            };
            writeln!(f, "[{tag}] {:<44} {}", c.condition.describe(), c.detail)?;
        }
        write!(
            f,
            "tau = {} ({}), scenario {}",
            self.tau.value,
            self.tau.binding,
            if self.is_valid() { "valid" } else { "invalid" }
        )
    }
}
