//! Fixed-point enumeration, Jacobians, and local stability classification.
//!
//! Each built-in scenario has a closed-form Jacobian; a finite-difference
//! Jacobian covers custom outcome tables and doubles as a cross-check of the
//! analytic forms. Eigenvalues come from the closed-form cubic in [`crate::eigen`].

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{replicator_rhs, PopulationState};
use crate::eigen::{eigenvalues_3x3, solve_linear_3x3};
use crate::error::{Error, Result};
use crate::game::{GameParameters, Scenario};

/// Real parts within this margin of zero are treated as zero when
/// classifying; corner Jacobians sit exactly on invariant boundary lines and
/// a hard zero test would be fragile.
pub const STABILITY_MARGIN: f64 = 1e-10;

/// Default step for finite-difference Jacobians.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// How a rest point sits in the state cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Corner,
    LineMember,
    Interior,
}

/// Local stability read off the Jacobian eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    CenterOrInconclusive,
}

/// Location, spectrum and classification of one rest point.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub location: PopulationState,
    pub kind: PointKind,
    pub eigenvalues: [Complex64; 3],
    pub classification: Stability,
    pub label: Option<String>,
}

/// Critical proportion of Good users, `lambda / (lambda + rho)`. The
/// all-Medium/NotAdapt/Fake corner is linearly stable exactly when `p_G`
/// exceeds this threshold.
pub fn pg_star(params: &GameParameters) -> f64 {
    params.lambda / (params.lambda + params.rho)
}

/// Stability from eigenvalue real parts: stable when all are below
/// `-STABILITY_MARGIN`, unstable/saddle when any exceeds `+STABILITY_MARGIN`,
/// inconclusive otherwise (center or bifurcation point).
pub fn classify(eigs: &[Complex64; 3]) -> Stability {
    let any_positive = eigs.iter().any(|e| e.re > STABILITY_MARGIN);
    let any_negative = eigs.iter().any(|e| e.re < -STABILITY_MARGIN);
    let all_negative = eigs.iter().all(|e| e.re < -STABILITY_MARGIN);
    if all_negative {
        Stability::Stable
    } else if any_positive {
        if any_negative {
            Stability::Saddle
        } else {
            Stability::Unstable
        }
    } else {
        Stability::CenterOrInconclusive
    }
}

/// Closed-form Jacobian of the scenario's replicator system.
///
/// Only the built-in scenarios have one; custom outcome tables should use
/// [`jacobian_fd`] instead.
pub fn jacobian_analytic(
    state: &PopulationState,
    scenario: &Scenario,
    params: &GameParameters,
) -> Result<[[f64; 3]; 3]> {
    let (x, y, z) = (state.x1, state.yg1, state.yb1);
    let GameParameters {
        rho,
        lambda,
        b,
        c_i,
        c_f,
        p_g,
        r,
    } = *params;
    let p_b = 1.0 - p_g;
    let xf = x * (1.0 - x);
    let yf = y * (1.0 - y);
    let zf = z * (1.0 - z);

    let j = match scenario {
        Scenario::Baseline => {
            let bracket = rho - rho * p_g * (1.0 - y) - (lambda + rho) * p_b * z;
            [
                [
                    r * (1.0 - 2.0 * x) * bracket,
                    r * xf * rho * p_g,
                    -r * xf * (lambda + rho) * p_b,
                ],
                [b * yf, (1.0 - 2.0 * y) * (c_i - b * (1.0 - x)), 0.0],
                [0.0, 0.0, (c_i - c_f) * (1.0 - 2.0 * z)],
            ]
        }
        Scenario::ManipulationProof => {
            let bracket = 1.0 - p_g * (1.0 - y) - p_b * z;
            [
                [
                    r * rho * (1.0 - 2.0 * x) * bracket,
                    r * rho * xf * p_g,
                    -r * rho * xf * p_b,
                ],
                [b * yf, (1.0 - 2.0 * y) * (c_i - b * (1.0 - x)), 0.0],
                [-b * zf, 0.0, (1.0 - 2.0 * z) * (c_i - c_f - b * x)],
            ]
        }
        Scenario::Recourse => {
            let bracket = rho * p_g * y - lambda * p_b * z;
            [
                [
                    r * (1.0 - 2.0 * x) * bracket,
                    r * xf * rho * p_g,
                    -r * xf * lambda * p_b,
                ],
                [b * yf, (1.0 - 2.0 * y) * (c_i - b * (1.0 - x)), 0.0],
                [b * zf, 0.0, (1.0 - 2.0 * z) * (c_i - c_f - b * (1.0 - x))],
            ]
        }
        Scenario::Custom(_) => {
            return Err(Error::UnsupportedScenario(
                "no closed-form Jacobian for custom outcome tables; use jacobian_fd".into(),
            ))
        }
    };
    Ok(j)
}

/// Finite-difference Jacobian of the replicator vector field: central
/// differences of step `h`, one-sided at coordinates within `h` of the cube
/// boundary.
pub fn jacobian_fd(
    state: &PopulationState,
    scenario: &Scenario,
    params: &GameParameters,
    h: f64,
) -> [[f64; 3]; 3] {
    let base = state.as_array();
    let mut j = [[0.0f64; 3]; 3];
    for col in 0..3 {
        let up_ok = base[col] + h <= 1.0;
        let down_ok = base[col] - h >= 0.0;
        let (plus, minus, denom) = match (up_ok, down_ok) {
            (true, true) => (base[col] + h, base[col] - h, 2.0 * h),
            (true, false) => (base[col] + h, base[col], h),
            (false, true) => (base[col], base[col] - h, h),
            (false, false) => (base[col], base[col], 1.0), // degenerate h; derivative 0
        };
        let mut s_plus = base;
        s_plus[col] = plus;
        let mut s_minus = base;
        s_minus[col] = minus;
        let f_plus = replicator_rhs(&PopulationState::from_array(s_plus), scenario, params);
        let f_minus = replicator_rhs(&PopulationState::from_array(s_minus), scenario, params);
        for row in 0..3 {
            j[row][col] = (f_plus[row] - f_minus[row]) / denom;
        }
    }
    j
}

fn jacobian_for(state: &PopulationState, scenario: &Scenario, params: &GameParameters) -> [[f64; 3]; 3] {
    match jacobian_analytic(state, scenario, params) {
        Ok(j) => j,
        Err(_) => jacobian_fd(state, scenario, params, DEFAULT_FD_STEP),
    }
}

fn report_for(
    location: PopulationState,
    kind: PointKind,
    label: Option<String>,
    scenario: &Scenario,
    params: &GameParameters,
) -> FixedPointReport {
    let eigenvalues = eigenvalues_3x3(&jacobian_for(&location, scenario, params));
    FixedPointReport {
        location,
        kind,
        classification: classify(&eigenvalues),
        eigenvalues,
        label,
    }
}

/// Label of a monomorphic corner, e.g. `(H,A,F)` for all-High institutions,
/// adapting Good users and faking Bad users.
pub fn corner_label(x1: f64, yg1: f64, yb1: f64) -> String {
    format!(
        "({},{},{})",
        if x1 > 0.5 { "M" } else { "H" },
        if yg1 > 0.5 { "NA" } else { "A" },
        if yb1 > 0.5 { "F" } else { "I" },
    )
}

/// Location of the interior rest point of the recourse scenario, present
/// whenever both of its free coordinates fall inside the open unit interval
/// (the Good-user coordinate is pinned at full NotAdapt).
pub fn recourse_interior_point(params: &GameParameters) -> Option<PopulationState> {
    let x = (params.b + params.c_f - params.c_i) / params.b;
    let z = params.rho * params.p_g / (params.lambda * (1.0 - params.p_g));
    if x > 0.0 && x < 1.0 && z > 0.0 && z < 1.0 {
        Some(PopulationState { x1: x, yg1: 1.0, yb1: z })
    } else {
        None
    }
}

/// All rest points of a scenario: the eight corners, the scenario's fixed
/// line sampled at 11 points when it has one, the recourse interior point
/// when defined, and any isolated points found by Newton refinement from a
/// coarse interior grid.
pub fn enumerate_fixed_points(scenario: &Scenario, params: &GameParameters) -> Vec<FixedPointReport> {
    let mut reports = Vec::new();

    for x in [0.0, 1.0] {
        for yg in [0.0, 1.0] {
            for yb in [0.0, 1.0] {
                reports.push(report_for(
                    PopulationState { x1: x, yg1: yg, yb1: yb },
                    PointKind::Corner,
                    Some(corner_label(x, yg, yb)),
                    scenario,
                    params,
                ));
            }
        }
    }

    // Fixed lines: with manipulation-proof classifiers every (x1, 0, 1) is a
    // rest point; with recourse every (x1, 0, 0) is.
    let line = match scenario {
        Scenario::ManipulationProof => Some((1.0, "(x1,A,F)")),
        Scenario::Recourse => Some((0.0, "(x1,A,I)")),
        _ => None,
    };
    if let Some((yb, label)) = line {
        for k in 0..=10 {
            let x1 = k as f64 / 10.0;
            reports.push(report_for(
                PopulationState { x1, yg1: 0.0, yb1: yb },
                PointKind::LineMember,
                Some(label.to_string()),
                scenario,
                params,
            ));
        }
    }

    if matches!(scenario, Scenario::Recourse) {
        if let Some(center) = recourse_interior_point(params) {
            reports.push(report_for(center, PointKind::Interior, Some("interior".into()), scenario, params));
        }
    }

    // Unnamed isolated rest points: Newton refinement on rhs = 0 from a 9^3
    // interior grid, deduplicated against everything already collected.
    for candidate in newton_search(scenario, params) {
        let duplicate = reports.iter().any(|r| r.location.distance_to(&candidate) < 1e-6)
            || on_scenario_line(scenario, &candidate);
        if !duplicate {
            let kind = classify_kind(&candidate);
            reports.push(report_for(candidate, kind, None, scenario, params));
        }
    }

    reports
}

fn classify_kind(state: &PopulationState) -> PointKind {
    let on_boundary = |v: f64| !(1e-9..=1.0 - 1e-9).contains(&v);
    let boundary_coords = [state.x1, state.yg1, state.yb1]
        .iter()
        .filter(|&&v| on_boundary(v))
        .count();
    if boundary_coords == 3 {
        PointKind::Corner
    } else {
        PointKind::Interior
    }
}

fn on_scenario_line(scenario: &Scenario, state: &PopulationState) -> bool {
    match scenario {
        Scenario::ManipulationProof => state.yg1 < 1e-9 && state.yb1 > 1.0 - 1e-9,
        Scenario::Recourse => state.yg1 < 1e-9 && state.yb1 < 1e-9,
        _ => false,
    }
}

fn newton_search(scenario: &Scenario, params: &GameParameters) -> Vec<PopulationState> {
    let mut found: Vec<PopulationState> = Vec::new();
    for ix in 1..=9 {
        for iy in 1..=9 {
            for iz in 1..=9 {
                let start = [ix as f64 / 10.0, iy as f64 / 10.0, iz as f64 / 10.0];
                if let Some(point) = newton_refine(start, scenario, params) {
                    if !found.iter().any(|p| p.distance_to(&point) < 1e-6) {
                        found.push(point);
                    }
                }
            }
        }
    }
    found
}

fn newton_refine(start: [f64; 3], scenario: &Scenario, params: &GameParameters) -> Option<PopulationState> {
    let mut y = start;
    for _ in 0..60 {
        let state = PopulationState::from_array(y);
        let f = replicator_rhs(&state, scenario, params);
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-13 {
            // Accept only points inside (or negligibly outside) the cube.
            for v in &mut y {
                if *v < -1e-9 || *v > 1.0 + 1e-9 {
                    return None;
                }
                *v = v.clamp(0.0, 1.0);
            }
            let refined = PopulationState::from_array(y);
            let residual = replicator_rhs(&refined, scenario, params);
            let res_norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
            return (res_norm < 1e-10).then_some(refined);
        }
        let j = jacobian_fd(&state, scenario, params, DEFAULT_FD_STEP);
        let delta = solve_linear_3x3(&j, &f)?;
        for c in 0..3 {
            y[c] -= delta[c];
            // Keep the iteration from wandering far outside the cube.
            if y[c] < -0.5 || y[c] > 1.5 {
                return None;
            }
        }
    }
    None
}
