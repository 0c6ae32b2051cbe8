//! Basin-of-attraction measurement over initial-condition grids.
//!
//! Grid points are cell-centred, strictly inside the cube: boundary faces
//! are invariant manifolds carrying degenerate rest points, and interior
//! placement keeps every grid point's fate well defined. Points are
//! integrated independently (and in parallel); counts are merged in grid
//! order so the reduction is deterministic.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::{detect_cycle, TOL_CORNER};
use crate::dynamics::{integrate, PopulationState, Trajectory};
use crate::error::{Error, Result};
use crate::game::{GameParameters, Scenario};
use crate::stability::{enumerate_fixed_points, FixedPointReport, PointKind, Stability};

/// Where a trajectory ends up.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EndpointClass {
    /// Within `tol_corner` of a monomorphic corner, e.g. `(H,A,F)`.
    Corner { label: String },
    /// Within `tol_corner` of an isolated non-corner rest point.
    InteriorFixed { location: PopulationState },
    /// Within `tol_corner` (transverse distance) of a fixed line such as the
    /// full-adaptation/full-improvement edge `(x1,A,I)`.
    Edge { label: String },
    /// A periodic orbit detected on the trajectory tail.
    Cycle,
    NonConverged,
}

impl EndpointClass {
    /// Stable key used to aggregate counts and to name CSV/JSON rows.
    pub fn key(&self) -> String {
        match self {
            EndpointClass::Corner { label } => label.clone(),
            EndpointClass::InteriorFixed { location } => format!(
                "interior({:.3},{:.3},{:.3})",
                location.x1, location.yg1, location.yb1
            ),
            EndpointClass::Edge { label } => label.clone(),
            EndpointClass::Cycle => "cycle".into(),
            EndpointClass::NonConverged => "non_converged".into(),
        }
    }
}

/// Attractor shares over an initial-condition grid.
#[derive(Debug, Clone, Serialize)]
pub struct BasinReport {
    pub scenario: String,
    pub params: GameParameters,
    /// Points per axis; the grid has `n_per_axis^3` cell-centred points at
    /// coordinates `(k + offset) / n_per_axis`.
    pub n_per_axis: usize,
    pub offset: f64,
    pub t_end: f64,
    pub dt: f64,
    pub tol_corner: f64,
    pub total: usize,
    /// Grid points whose integration failed (counted as non-converged).
    pub warnings: usize,
    pub counts: BTreeMap<String, usize>,
    pub fractions: BTreeMap<String, f64>,
}

impl BasinReport {
    pub fn fraction(&self, key: &str) -> f64 {
        self.fractions.get(key).copied().unwrap_or(0.0)
    }
}

/// A trajectory endpoint may only match a rest point where trajectories can
/// actually accumulate; saddles and repellers are excluded.
fn eligible(classification: Stability) -> bool {
    matches!(classification, Stability::Stable | Stability::CenterOrInconclusive)
}

/// Nearest eligible attractor within `tol`: corners first, then isolated
/// points, then fixed lines (which span x1, so line proximity is measured
/// transversally while the nearest sample supplies the local
/// classification).
fn match_attractor(
    end: &PopulationState,
    known_points: &[FixedPointReport],
    tol: f64,
) -> Option<EndpointClass> {
    let nearest = |kind: PointKind| -> Option<&FixedPointReport> {
        known_points
            .iter()
            .filter(|r| r.kind == kind && eligible(r.classification))
            .map(|r| (r, end.distance_to(&r.location)))
            .filter(|(_, d)| d.is_finite())
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .map(|(r, _)| r)
    };

    if let Some(corner) = nearest(PointKind::Corner) {
        if end.distance_to(&corner.location) < tol {
            return Some(EndpointClass::Corner {
                label: corner.label.clone().unwrap_or_else(|| corner.location_key()),
            });
        }
    }

    if let Some(point) = nearest(PointKind::Interior) {
        if end.distance_to(&point.location) < tol {
            return Some(EndpointClass::InteriorFixed { location: point.location });
        }
    }

    let line_match = known_points
        .iter()
        .filter(|r| r.kind == PointKind::LineMember)
        .map(|r| {
            let dy = end.yg1 - r.location.yg1;
            let dz = end.yb1 - r.location.yb1;
            ((dy * dy + dz * dz).sqrt(), end.distance_to(&r.location), r)
        })
        .filter(|(transverse, _, _)| *transverse < tol)
        .min_by(|a, b| (a.1).partial_cmp(&b.1).unwrap());
    if let Some((_, _, sample)) = line_match {
        if eligible(sample.classification) {
            return Some(EndpointClass::Edge {
                label: sample.label.clone().unwrap_or_else(|| "edge".into()),
            });
        }
    }

    None
}

/// Assigns a finished trajectory to the nearest known attractor within
/// `tol_corner`, then attempts cycle detection on the final quarter, and
/// otherwise reports non-convergence.
pub fn classify_endpoint(
    traj: &Trajectory,
    known_points: &[FixedPointReport],
    tol_corner: f64,
) -> EndpointClass {
    if let Some(class) = match_attractor(&traj.final_state(), known_points, tol_corner) {
        return class;
    }
    if detect_cycle(traj, 0.25).is_some() {
        return EndpointClass::Cycle;
    }
    EndpointClass::NonConverged
}

impl FixedPointReport {
    fn location_key(&self) -> String {
        format!("({:.3},{:.3},{:.3})", self.location.x1, self.location.yg1, self.location.yb1)
    }
}

/// A point this close to an eligible attractor can never leave its
/// `TOL_CORNER` neighbourhood again, so integration may stop early without
/// changing the classification.
const SETTLE_TOL: f64 = 1e-9;
const SETTLE_CHECK_EVERY: usize = 100;

/// Steps the system without recording, returning the matched attractor as
/// soon as the state settles onto one; `Ok(None)` when the horizon is
/// reached unsettled.
fn scan_to_attractor(
    start: [f64; 3],
    coeffs: &crate::dynamics::RhsCoefficients,
    known: &[FixedPointReport],
    t_end: f64,
    dt: f64,
) -> Result<Option<EndpointClass>> {
    let plan = crate::dynamics::StepPlan::new(t_end, dt);
    let mut y = start;
    for step in 1..=plan.n_steps {
        let (h, t) = plan.step(step);
        y = crate::dynamics::rk4_step(coeffs, y, h);
        crate::dynamics::clamp_into_cube(&mut y, t)?;
        if step % SETTLE_CHECK_EVERY == 0 {
            if let Some(class) = match_attractor(&PopulationState::from_array(y), known, SETTLE_TOL) {
                return Ok(Some(class));
            }
        }
    }
    Ok(None)
}

fn classify_grid_point(
    start: PopulationState,
    scenario: &Scenario,
    params: &GameParameters,
    coeffs: &crate::dynamics::RhsCoefficients,
    known: &[FixedPointReport],
    t_end: f64,
    dt: f64,
) -> (EndpointClass, bool) {
    // Record densely enough for tail cycle detection without huge buffers.
    let record_every = 10;
    for horizon in [t_end, 2.0 * t_end] {
        match scan_to_attractor(start.as_array(), coeffs, known, horizon, dt) {
            Ok(Some(class)) => return (class, false),
            Ok(None) => {
                // Unsettled at the horizon: re-run with recording so the
                // tail can be inspected for attractor proximity and cycles.
                match integrate(&start, scenario, params, horizon, dt, record_every) {
                    Ok(traj) => {
                        let class = classify_endpoint(&traj, known, TOL_CORNER);
                        if class != EndpointClass::NonConverged {
                            return (class, false);
                        }
                        // else: one horizon doubling before giving up
                    }
                    Err(_) => return (EndpointClass::NonConverged, true),
                }
            }
            Err(_) => return (EndpointClass::NonConverged, true),
        }
    }
    (EndpointClass::NonConverged, false)
}

/// Integrates every point of the cell-centred `n_per_axis^3` grid and
/// reports the attractor shares.
pub fn basin_sizes(
    scenario: &Scenario,
    params: &GameParameters,
    n_per_axis: usize,
    t_end: f64,
    dt: f64,
) -> Result<BasinReport> {
    params.validate()?;
    if n_per_axis < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_per_axis must be >= 2, got {n_per_axis}"
        )));
    }
    if t_end <= 0.0 || dt <= 0.0 || !t_end.is_finite() || !dt.is_finite() {
        return Err(Error::InvalidArgument("t_end and dt must be positive".into()));
    }

    let known = enumerate_fixed_points(scenario, params);
    let matrices = crate::game::PayoffMatrices::compute(scenario, params);
    let coeffs = crate::dynamics::RhsCoefficients::new(&matrices, params);
    let n = n_per_axis;
    let coord = |k: usize| (k as f64 + 0.5) / n as f64;

    let outcomes: Vec<(EndpointClass, bool)> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let start = PopulationState {
                x1: coord(idx / (n * n)),
                yg1: coord((idx / n) % n),
                yb1: coord(idx % n),
            };
            classify_grid_point(start, scenario, params, &coeffs, &known, t_end, dt)
        })
        .collect();

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut warnings = 0usize;
    for (class, warned) in &outcomes {
        *counts.entry(class.key()).or_insert(0) += 1;
        warnings += usize::from(*warned);
    }
    let total = outcomes.len();
    let fractions = counts
        .iter()
        .map(|(k, &v)| (k.clone(), v as f64 / total as f64))
        .collect();

    Ok(BasinReport {
        scenario: scenario.name().to_string(),
        params: *params,
        n_per_axis,
        offset: 0.5,
        t_end,
        dt,
        tol_corner: TOL_CORNER,
        total,
        warnings,
        counts,
        fractions,
    })
}

/// One cell of a parameter sweep. Exactly one of `report` and `error` is
/// set; a failing cell does not abort the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub rho_over_lambda: f64,
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<BasinReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Basin reports over a (rho/lambda, r) grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub scenario: String,
    pub lambda: f64,
    pub cells: Vec<SweepCell>,
}

/// Runs [`basin_sizes`] for every combination of `rho_over_lambda` and `r`,
/// holding `lambda` fixed at its base value and setting `rho` from each
/// ratio.
pub fn sweep_basins(
    scenario: &Scenario,
    base_params: &GameParameters,
    rho_over_lambda: &[f64],
    rates: &[f64],
    n_per_axis: usize,
    t_end: f64,
    dt: f64,
) -> Result<SweepReport> {
    base_params.validate()?;
    let mut cells = Vec::with_capacity(rho_over_lambda.len() * rates.len());
    for &ratio in rho_over_lambda {
        for &r in rates {
            let mut params = *base_params;
            params.rho = ratio * base_params.lambda;
            params.r = r;
            let outcome = params
                .validate()
                .and_then(|()| basin_sizes(scenario, &params, n_per_axis, t_end, dt));
            let (report, error) = match outcome {
                Ok(report) => (Some(report), None),
                Err(e) => (None, Some(e.to_string())),
            };
            cells.push(SweepCell {
                rho_over_lambda: ratio,
                r,
                report,
                error,
            });
        }
    }
    Ok(SweepReport {
        scenario: scenario.name().to_string(),
        lambda: base_params.lambda,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> GameParameters {
        GameParameters::default()
    }

    #[test]
    fn corner_trajectory_classifies_as_that_corner() {
        let p = defaults();
        let known = enumerate_fixed_points(&Scenario::Baseline, &p);
        let s0 = PopulationState::new(0.0, 0.0, 1.0).unwrap();
        let traj = integrate(&s0, &Scenario::Baseline, &p, 10.0, 0.01, 10).unwrap();
        let class = classify_endpoint(&traj, &known, TOL_CORNER);
        assert_eq!(class, EndpointClass::Corner { label: "(H,A,F)".into() });
    }

    #[test]
    fn baseline_centre_start_reaches_the_strict_corner() {
        let p = defaults();
        let known = enumerate_fixed_points(&Scenario::Baseline, &p);
        let s0 = PopulationState::new(0.5, 0.5, 0.5).unwrap();
        let traj = integrate(&s0, &Scenario::Baseline, &p, 200.0, 0.01, 10).unwrap();
        assert_eq!(
            classify_endpoint(&traj, &known, TOL_CORNER),
            EndpointClass::Corner { label: "(H,A,F)".into() }
        );
    }

    #[test]
    fn recourse_cycle_start_classifies_as_cycle() {
        let p = defaults();
        let known = enumerate_fixed_points(&Scenario::Recourse, &p);
        let s0 = PopulationState::new(0.85, 0.5, 0.1).unwrap();
        let traj = integrate(&s0, &Scenario::Recourse, &p, 200.0, 0.01, 10).unwrap();
        assert_eq!(classify_endpoint(&traj, &known, TOL_CORNER), EndpointClass::Cycle);
    }

    #[test]
    fn recourse_edge_convergence_is_reported_as_the_edge() {
        // Starts with few Medium institutions head to the adaptation/improvement
        // edge (x1, 0, 0), in between the sampled line points.
        let p = defaults();
        let known = enumerate_fixed_points(&Scenario::Recourse, &p);
        let s0 = PopulationState::new(0.3, 0.4, 0.6).unwrap();
        let traj = integrate(&s0, &Scenario::Recourse, &p, 200.0, 0.01, 10).unwrap();
        let class = classify_endpoint(&traj, &known, TOL_CORNER);
        assert_eq!(class, EndpointClass::Edge { label: "(x1,A,I)".into() });
    }

    #[test]
    fn fractions_sum_to_one_and_grids_are_deterministic() {
        let p = defaults();
        let a = basin_sizes(&Scenario::Baseline, &p, 5, 100.0, 0.01).unwrap();
        let b = basin_sizes(&Scenario::Baseline, &p, 5, 100.0, 0.01).unwrap();
        assert_eq!(a.total, 125);
        assert!((a.fractions.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn below_threshold_baseline_has_no_moderate_basin() {
        // p_G = 0.5 < p_G*: (M,NA,F) is not stable and attracts nothing.
        let p = defaults();
        let report = basin_sizes(&Scenario::Baseline, &p, 5, 150.0, 0.01).unwrap();
        assert_eq!(report.fraction("(M,NA,F)"), 0.0);
        assert!(report.fraction("(H,A,F)") > 0.99);
    }

    #[test]
    fn degenerate_sweep_equals_a_direct_basin_run() {
        let p = defaults();
        let sweep = sweep_basins(&Scenario::Baseline, &p, &[0.2], &[1.0], 4, 100.0, 0.01).unwrap();
        assert_eq!(sweep.cells.len(), 1);
        let cell = sweep.cells[0].report.as_ref().unwrap();
        let direct = basin_sizes(&Scenario::Baseline, &p, 4, 100.0, 0.01).unwrap();
        assert_eq!(cell.counts, direct.counts);
        assert_eq!(cell.params.rho, 10.0); // 0.2 * 50
    }

    #[test]
    fn sweep_survives_invalid_cells() {
        let p = defaults();
        let sweep = sweep_basins(&Scenario::Baseline, &p, &[-1.0, 0.2], &[1.0], 4, 50.0, 0.01).unwrap();
        assert!(sweep.cells[0].report.is_none() && sweep.cells[0].error.is_some());
        assert!(sweep.cells[1].report.is_some() && sweep.cells[1].error.is_none());
    }

    #[test]
    fn invalid_grid_arguments_are_rejected() {
        let p = defaults();
        assert!(basin_sizes(&Scenario::Baseline, &p, 1, 100.0, 0.01).is_err());
        assert!(basin_sizes(&Scenario::Baseline, &p, 4, 0.0, 0.01).is_err());
    }
}
