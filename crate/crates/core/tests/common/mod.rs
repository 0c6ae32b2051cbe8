//! Shared test oracles: the hand-coded closed-form replicator systems of the
//! three built-in scenarios. These deliberately bypass the payoff-matrix
//! machinery so that the generic fitness-difference right-hand side can be
//! checked against an independent route.

use evoclass::{GameParameters, PopulationState, Scenario};

/// Closed-form replicator system of the imperfect-classifier scenario.
pub fn baseline_rhs(s: &PopulationState, p: &GameParameters) -> [f64; 3] {
    let (x, y, z) = (s.x1, s.yg1, s.yb1);
    [
        p.r * x
            * (1.0 - x)
            * (p.rho - p.rho * p.p_g * (1.0 - y) - (p.lambda + p.rho) * (1.0 - p.p_g) * z),
        y * (1.0 - y) * (p.c_i - p.b * (1.0 - x)),
        z * (1.0 - z) * (p.c_i - p.c_f),
    ]
}

/// Closed-form system of the manipulation-proof scenario.
pub fn manipulation_proof_rhs(s: &PopulationState, p: &GameParameters) -> [f64; 3] {
    let (x, y, z) = (s.x1, s.yg1, s.yb1);
    [
        p.r * p.rho * x * (1.0 - x) * (1.0 - p.p_g * (1.0 - y) - z * (1.0 - p.p_g)),
        y * (1.0 - y) * (p.c_i - p.b * (1.0 - x)),
        z * (1.0 - z) * (p.c_i - p.c_f - p.b * x),
    ]
}

/// Closed-form system of the algorithmic-recourse scenario.
pub fn recourse_rhs(s: &PopulationState, p: &GameParameters) -> [f64; 3] {
    let (x, y, z) = (s.x1, s.yg1, s.yb1);
    [
        p.r * x * (1.0 - x) * (p.rho * p.p_g * y - p.lambda * (1.0 - p.p_g) * z),
        y * (1.0 - y) * (p.c_i - p.b * (1.0 - x)),
        z * (1.0 - z) * (p.c_i - p.c_f - p.b * (1.0 - x)),
    ]
}

/// The oracle matching a built-in scenario.
pub fn closed_form_rhs(scenario: &Scenario, s: &PopulationState, p: &GameParameters) -> [f64; 3] {
    match scenario {
        Scenario::Baseline => baseline_rhs(s, p),
        Scenario::ManipulationProof => manipulation_proof_rhs(s, p),
        Scenario::Recourse => recourse_rhs(s, p),
        Scenario::Custom(_) => panic!("no closed form for custom scenarios"),
    }
}

// Not every test target uses every oracle.
#[allow(dead_code)]
pub const BUILTINS: [Scenario; 3] = [
    Scenario::Baseline,
    Scenario::ManipulationProof,
    Scenario::Recourse,
];
