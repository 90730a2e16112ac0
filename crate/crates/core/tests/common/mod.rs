//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use gridshift::lp::LinearProgram;
use gridshift::scenario::{Agent, GenBus, ThreeBusScenario};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Enumerated {
    Infeasible,
    Optimal { value: f64, x: Vec<f64> },
}

/// Solves `rows x = rhs` by Gaussian elimination with partial pivoting.
/// Returns `None` unless the system is consistent with a unique solution.
fn solve_unique(mut rows: Vec<Vec<f64>>, mut rhs: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    const EPS: f64 = 1e-9;
    let m = rows.len();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let best =
            (pivot_row..m).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let p = best.filter(|&p| rows[p][col].abs() > EPS)?;
        rows.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let pivot = rows[pivot_row].clone();
        for r in 0..m {
            if r != pivot_row {
                let f = rows[r][col] / pivot[col];
                if f != 0.0 {
                    for (v, p) in rows[r].iter_mut().zip(&pivot) {
                        *v -= f * p;
                    }
                    rhs[r] -= f * rhs[pivot_row];
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    let scale = 1.0 + rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if rhs[pivot_row..].iter().any(|v| v.abs() > EPS * scale) {
        return None;
    }
    Some((0..k).map(|i| rhs[i] / rows[i][pivots[i]]).collect())
}

/// Exhaustive vertex enumeration for an LP with finite bounds. Every vertex
/// fixes each variable at a bound or leaves it free; the free variables must
/// then be pinned down uniquely by the equalities.
pub fn enumerate_vertices(lp: &LinearProgram) -> Enumerated {
    let n = lp.num_vars();
    let (lo, hi) = (lp.lower_bounds(), lp.upper_bounds());
    assert!(
        lo.iter().chain(hi).all(|v| v.is_finite()),
        "oracle needs finite bounds"
    );
    let a = lp.eq_matrix();
    let b = lp.eq_rhs();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for code in 0..3usize.pow(n as u32) {
        // 0 = lower, 1 = upper, 2 = free.
        let states: Vec<usize> = (0..n).map(|j| code / 3usize.pow(j as u32) % 3).collect();
        let free: Vec<usize> = (0..n).filter(|&j| states[j] == 2).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|j| if states[j] == 1 { hi[j] } else { lo[j] })
            .collect();
        let rows: Vec<Vec<f64>> = a
            .iter()
            .map(|row| free.iter().map(|&j| row[j]).collect())
            .collect();
        let rhs: Vec<f64> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                bi - (0..n)
                    .filter(|j| states[*j] != 2)
                    .map(|j| row[j] * x[j])
                    .sum::<f64>()
            })
            .collect();
        if free.is_empty() {
            if rhs
                .iter()
                .any(|r| r.abs() > 1e-9 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()))))
            {
                continue;
            }
        } else {
            let Some(sol) = solve_unique(rows, rhs, free.len()) else {
                continue;
            };
            for (&j, v) in free.iter().zip(sol) {
                x[j] = v;
            }
        }
        if (0..n).any(|j| x[j] < lo[j] - 1e-9 || x[j] > hi[j] + 1e-9) {
            continue;
        }
        let value = lp.objective_at(&x);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, x));
        }
    }
    match best {
        Some((value, x)) => Enumerated::Optimal { value, x },
        None => Enumerated::Infeasible,
    }
}

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..10) {
        0..=2 => 0.0,
        3..=7 => rng.gen_range(-3i32..=3) as f64,
        _ => rng.gen_range(-3.0..3.0),
    }
}

/// Random LP with at most 4 variables, at most 3 equality rows and finite
/// bounds. Most right-hand sides come from a point inside the box, so most
/// instances are feasible.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(0..=3);
    let objective: Vec<f64> = (0..n).map(|_| coefficient(rng)).collect();
    let matrix: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| coefficient(rng)).collect())
        .collect();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let l = rng.gen_range(-4i32..=2) as f64;
        let width = match rng.gen_range(0..8) {
            0 => 0.0,
            1..=5 => rng.gen_range(1i32..=4) as f64,
            _ => rng.gen_range(0.1..4.0),
        };
        lower.push(l);
        upper.push(l + width);
    }
    let rhs: Vec<f64> = if rng.gen_bool(0.8) {
        let x0: Vec<f64> = (0..n)
            .map(|j| {
                if rng.gen_bool(0.5) {
                    lower[j] + (upper[j] - lower[j]) * rng.gen_range(0i32..=2) as f64 / 2.0
                } else {
                    rng.gen_range(lower[j]..=upper[j])
                }
            })
            .collect();
        matrix
            .iter()
            .map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum())
            .collect()
    } else {
        (0..m).map(|_| rng.gen_range(-6i32..=6) as f64).collect()
    };
    LinearProgram::new(objective, matrix, rhs, lower, upper).expect("generated LP is well formed")
}

fn base_parameters(rng: &mut ChaCha8Rng) -> ThreeBusScenario {
    let c1 = rng.gen_range(0.2..5.0);
    let shared = rng.gen_bool(0.5);
    let pick_alpha = |rng: &mut ChaCha8Rng| match rng.gen_range(0..6) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..1.0),
    };
    let alpha_dc = pick_alpha(rng);
    let alpha_sw = if shared { alpha_dc } else { pick_alpha(rng) };
    let dc_load = rng.gen_range(0.2..2.0);
    let f02 = rng.gen_range(0.0..1.5);
    let f12 = rng.gen_range(0.0..1.5);
    ThreeBusScenario {
        c1,
        c2: c1 + rng.gen_range(0.1..5.0),
        e1: rng.gen_range(0.0..5.0),
        e2: rng.gen_range(0.1..5.0),
        l0: 0.0,
        l1: if rng.gen_bool(0.1) {
            0.0
        } else {
            rng.gen_range(0.0..2.0)
        },
        l2: dc_load + f02 + f12 + rng.gen_range(0.05..2.0),
        dc_load,
        f01: 0.0,
        f02,
        f12,
        alpha_dc,
        alpha_sw,
    }
}

/// Sets `F01` and `l0` so that `tau` equals the target, with one of the two
/// limits binding and the other slack.
fn place_threshold(rng: &mut ChaCha8Rng, s: &mut ThreeBusScenario, tau: f64) {
    let congestion_cap = tau + s.f12 + s.l1;
    let renewable_need = tau + s.f02 + s.f12 + s.l1;
    match rng.gen_range(0..5) {
        0 => {
            s.l0 = -renewable_need;
            s.f01 = congestion_cap + rng.gen_range(0.05..1.0);
        }
        1 => {
            s.l0 = -renewable_need;
            s.f01 = congestion_cap;
        }
        _ => {
            s.f01 = congestion_cap;
            s.l0 = -(renewable_need + rng.gen_range(0.05..1.0));
        }
    }
}

/// Rejection-samples a scenario that passes every setting condition.
pub fn random_valid_scenario(rng: &mut ChaCha8Rng) -> ThreeBusScenario {
    loop {
        let mut s = base_parameters(rng);
        let tau = if rng.gen_bool(0.05) {
            s.dc_load
        } else {
            s.dc_load * rng.gen_range(0.02..1.0)
        };
        place_threshold(rng, &mut s, tau);
        if s.validate().is_valid() {
            return s;
        }
    }
}

pub fn threshold(s: &ThreeBusScenario, agent: Agent) -> f64 {
    let r = s.eta(GenBus::One, agent) / s.eta(GenBus::Two, agent);
    match agent {
        Agent::DataCenter => s.dc_load - r * s.dc_load,
        Agent::SocialWelfare => s.dc_load - r * (s.dc_load + s.l1),
    }
}

/// Rejection-samples a valid scenario with `T_SW <= tau < T_DC`.
pub fn random_band_scenario(rng: &mut ChaCha8Rng) -> ThreeBusScenario {
    loop {
        let mut s = base_parameters(rng);
        let lo = threshold(&s, Agent::SocialWelfare).max(0.02 * s.dc_load);
        let hi = threshold(&s, Agent::DataCenter).min(s.dc_load);
        if hi - lo < 1e-3 {
            continue;
        }
        let tau = rng.gen_range(lo..hi - 1e-6);
        place_threshold(rng, &mut s, tau);
        let t = s.tau().value;
        if s.validate().is_valid()
            && t >= threshold(&s, Agent::SocialWelfare)
            && t < threshold(&s, Agent::DataCenter)
        {
            return s;
        }
    }
}

/// A fixed mix: every tenth scenario is drawn from the misalignment band.
pub fn scenario_set(seed: u64, count: usize) -> Vec<(ThreeBusScenario, bool)> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            if k % 10 == 9 {
                (random_band_scenario(&mut r), true)
            } else {
                (random_valid_scenario(&mut r), false)
            }
        })
        .collect()
}
