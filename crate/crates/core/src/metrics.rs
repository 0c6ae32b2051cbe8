//! Classifier performance frequencies and social cost along states and
//! trajectories.

use serde::Serialize;

use crate::dynamics::{PopulationState, Trajectory};
use crate::game::{ClassificationOutcome, GameParameters, InstitutionStrategy, Scenario, UserKind};

/// Population-expected frequency of each classification outcome; the four
/// values partition unity because every user meets exactly one institution
/// and receives exactly one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeFrequencies {
    pub tp: f64,
    pub tn: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
}

impl OutcomeFrequencies {
    pub fn sum(&self) -> f64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Expected outcome frequencies at `state`: each of the eight
/// (institution, user type, user strategy) combinations contributes its
/// population weight to the outcome the scenario's table assigns it.
pub fn outcome_frequencies(
    state: &PopulationState,
    scenario: &Scenario,
    params: &GameParameters,
) -> OutcomeFrequencies {
    let table = scenario.outcome_table();
    let x = [state.x1, 1.0 - state.x1];
    let type_weight = [params.p_g, params.p_b()];
    let strategy_weight = [
        [state.yg1, 1.0 - state.yg1],
        [state.yb1, 1.0 - state.yb1],
    ];

    let mut freq = OutcomeFrequencies {
        tp: 0.0,
        tn: 0.0,
        fp: 0.0,
        fn_: 0.0,
    };
    for inst in InstitutionStrategy::ALL {
        for kind in UserKind::ALL {
            for (j, &strategy_share) in strategy_weight[kind.index()].iter().enumerate() {
                let weight = x[inst.index()] * type_weight[kind.index()] * strategy_share;
                match table.get(inst, kind, j) {
                    ClassificationOutcome::TruePositive => freq.tp += weight,
                    ClassificationOutcome::TrueNegative => freq.tn += weight,
                    ClassificationOutcome::FalsePositive => freq.fp += weight,
                    ClassificationOutcome::FalseNegative => freq.fn_ += weight,
                }
            }
        }
    }
    freq
}

/// Fraction of Good users forced into costly adaptation: `1 - yG1`.
/// Scenario-independent by construction.
pub fn social_cost(state: &PopulationState) -> f64 {
    1.0 - state.yg1
}

/// One recorded sample with its metric columns.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnotatedSample {
    pub t: f64,
    pub state: PopulationState,
    pub frequencies: OutcomeFrequencies,
    pub social_cost: f64,
}

/// A trajectory with per-sample outcome frequencies and social cost.
#[derive(Debug, Clone, Serialize)]
pub struct AnnotatedTrajectory {
    pub samples: Vec<AnnotatedSample>,
    pub scenario: Scenario,
    pub params: GameParameters,
}

/// Appends metric columns to every recorded sample of a trajectory.
pub fn annotate_trajectory(traj: &Trajectory) -> AnnotatedTrajectory {
    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, state)| AnnotatedSample {
            t,
            state: *state,
            frequencies: outcome_frequencies(state, &traj.scenario, &traj.params),
            social_cost: social_cost(state),
        })
        .collect();
    AnnotatedTrajectory {
        samples,
        scenario: traj.scenario,
        params: traj.params,
    }
}
