//! Periodic-orbit detection and the random-initial-condition cycle census.
//!
//! Detection is deliberately heuristic: recurrence is measured by
//! Poincare-section crossings of the plane `x1 = mean(x1)` over the tail of a
//! trajectory, and a cycle is declared only when crossings are regular and
//! the orbit has genuine extent. No claim of exact orbit closure is made —
//! the linearization at the cycle centre is a centre, which is inconclusive
//! for the nonlinear system.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{integrate, PopulationState, Trajectory};
use crate::error::Result;
use crate::game::{GameParameters, Scenario};
use crate::stability::recourse_interior_point;

/// Endpoint-matching tolerance shared with basin classification.
pub const TOL_CORNER: f64 = 1e-3;

/// Minimum relative orbit extent: the largest per-coordinate amplitude must
/// exceed `10 * TOL_CORNER`, which rejects slow spirals into rest points.
const AMPLITUDE_FLOOR: f64 = 10.0 * TOL_CORNER;

/// Maximum relative spread of inter-crossing intervals for a cycle verdict.
const MAX_PERIOD_SPREAD: f64 = 0.05;

/// A detected periodic orbit.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    /// Mean inter-crossing time on the Poincare section.
    pub period: f64,
    /// Trapezoidal time-average over an integer number of periods.
    pub time_average: PopulationState,
    /// Per-coordinate max - min over one period.
    pub amplitude: [f64; 3],
    /// The analytic cycle centre of the recourse scenario, when defined.
    pub analytic_center: Option<PopulationState>,
    /// Euclidean distance between `time_average` and `analytic_center`.
    pub center_distance: Option<f64>,
}

/// The analytic centre of the recourse cycles,
/// `((b + c_F - c_I)/b, 1, rho p_G / (lambda (1 - p_G)))`, when it lies
/// inside the cube. Independent of the rate `r`.
pub fn recourse_center(params: &GameParameters) -> Option<PopulationState> {
    recourse_interior_point(params)
}

/// Looks for a periodic orbit in the final `window_fraction` of a
/// trajectory.
///
/// Crossing times of the plane `x1 = mean(x1)` (positive direction) are
/// collected; a cycle is declared only when there are at least three
/// crossings, the inter-crossing times vary by less than 5% relatively, and
/// the orbit's largest per-coordinate amplitude over the last period exceeds
/// the amplitude floor. Returns `None` (not an error) otherwise.
pub fn detect_cycle(traj: &Trajectory, window_fraction: f64) -> Option<CycleReport> {
    let n = traj.times.len();
    if n < 4 || !(0.0..=1.0).contains(&window_fraction) {
        return None;
    }
    let t_end = traj.t_end();
    let t_start = t_end - window_fraction * (t_end - traj.times[0]);
    let start = traj.times.partition_point(|&t| t < t_start);
    if n - start < 4 {
        return None;
    }
    let times = &traj.times[start..];
    let states = &traj.states[start..];

    let mean_x1 = states.iter().map(|s| s.x1).sum::<f64>() / states.len() as f64;

    // Positive-going crossings of x1 = mean_x1, linearly interpolated.
    let mut crossings = Vec::new();
    for i in 0..states.len() - 1 {
        let (a, b) = (states[i].x1, states[i + 1].x1);
        if a < mean_x1 && b >= mean_x1 {
            let frac = (mean_x1 - a) / (b - a);
            crossings.push(times[i] + frac * (times[i + 1] - times[i]));
        }
    }
    if crossings.len() < 3 {
        return None;
    }

    let intervals: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_interval = intervals.iter().sum::<f64>() / intervals.len() as f64;
    let max = intervals.iter().cloned().fold(f64::MIN, f64::max);
    let min = intervals.iter().cloned().fold(f64::MAX, f64::min);
    if mean_interval <= 0.0 || (max - min) / mean_interval >= MAX_PERIOD_SPREAD {
        return None;
    }
    let period = mean_interval;

    let last = *crossings.last().unwrap();
    let amplitude = amplitude_over(times, states, last - period, last);
    if amplitude.iter().cloned().fold(0.0, f64::max) <= AMPLITUDE_FLOOR {
        return None;
    }

    let time_average = PopulationState::from_array(trapezoid_mean(times, states, crossings[0], last));

    let analytic_center = match traj.scenario {
        Scenario::Recourse => recourse_center(&traj.params),
        _ => None,
    };
    let center_distance = analytic_center.map(|c| time_average.distance_to(&c));

    Some(CycleReport {
        period,
        time_average,
        amplitude,
        analytic_center,
        center_distance,
    })
}

fn amplitude_over(times: &[f64], states: &[PopulationState], from: f64, to: f64) -> [f64; 3] {
    let mut lo = [f64::MAX; 3];
    let mut hi = [f64::MIN; 3];
    for (t, s) in times.iter().zip(states) {
        if *t >= from && *t <= to {
            let a = s.as_array();
            for c in 0..3 {
                lo[c] = lo[c].min(a[c]);
                hi[c] = hi[c].max(a[c]);
            }
        }
    }
    let mut amp = [0.0; 3];
    for c in 0..3 {
        amp[c] = if hi[c] >= lo[c] { hi[c] - lo[c] } else { 0.0 };
    }
    amp
}

/// Trapezoidal mean of the state over `[from, to]`, with the window
/// endpoints linearly interpolated onto the sample grid.
fn trapezoid_mean(times: &[f64], states: &[PopulationState], from: f64, to: f64) -> [f64; 3] {
    debug_assert!(to > from);
    let value_at = |t: f64| -> [f64; 3] {
        let i = times.partition_point(|&u| u < t).min(times.len() - 1).max(1);
        let (t0, t1) = (times[i - 1], times[i]);
        let (a, b) = (states[i - 1].as_array(), states[i].as_array());
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        [
            a[0] + w * (b[0] - a[0]),
            a[1] + w * (b[1] - a[1]),
            a[2] + w * (b[2] - a[2]),
        ]
    };

    let mut acc = [0.0f64; 3];
    let mut prev_t = from;
    let mut prev_v = value_at(from);
    for (t, s) in times.iter().zip(states) {
        if *t <= from || *t >= to {
            continue;
        }
        let v = s.as_array();
        for c in 0..3 {
            acc[c] += (t - prev_t) * (prev_v[c] + v[c]) / 2.0;
        }
        prev_t = *t;
        prev_v = v;
    }
    let v_end = value_at(to);
    for c in 0..3 {
        acc[c] += (to - prev_t) * (prev_v[c] + v_end[c]) / 2.0;
        acc[c] /= to - from;
    }
    acc
}

/// Result of integrating many seeded random starts and counting cycles.
#[derive(Debug, Clone, Serialize)]
pub struct CycleCensus {
    pub scenario: String,
    pub n_random: usize,
    pub seed: u64,
    pub t_end: f64,
    /// Fraction of initial conditions whose trajectory is classified as a
    /// cycle.
    pub fraction: f64,
    pub analytic_center: Option<PopulationState>,
    pub cycles: Vec<CycleReport>,
}

/// Integrates `n_random` uniformly sampled interior starts for `t_end` time
/// units and runs [`detect_cycle`] on each. The generator seed is recorded
/// in the report; identical inputs give identical censuses.
pub fn cycle_census(
    scenario: &Scenario,
    params: &GameParameters,
    n_random: usize,
    seed: u64,
    t_end: f64,
    dt: f64,
) -> Result<CycleCensus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<PopulationState> = (0..n_random)
        .map(|_| PopulationState {
            x1: rng.random(),
            yg1: rng.random(),
            yb1: rng.random(),
        })
        .collect();

    let reports: Vec<Option<CycleReport>> = starts
        .par_iter()
        .map(|s0| {
            integrate(s0, scenario, params, t_end, dt, 1)
                .ok()
                .and_then(|traj| detect_cycle(&traj, 0.5))
        })
        .collect();

    let cycles: Vec<CycleReport> = reports.into_iter().flatten().collect();
    let fraction = if n_random == 0 {
        0.0
    } else {
        cycles.len() as f64 / n_random as f64
    };

    Ok(CycleCensus {
        scenario: scenario.name().to_string(),
        n_random,
        seed,
        t_end,
        fraction,
        analytic_center: match scenario {
            Scenario::Recourse => recourse_center(params),
            _ => None,
        },
        cycles,
    })
}
