//! Deterministic engine for the co-evolution of classifier-deploying
//! institutions and strategic users.
//!
//! A population of institutions chooses between a moderate (`Medium`) and a
//! strict (`High`) decision boundary; populations of Good and Bad users choose
//! how to adapt their applications (not adapt, adapt/improve, or fake). The
//! engine builds the payoff matrices of that asymmetric game under three
//! interaction scenarios — an imperfect classifier, a manipulation-proof
//! classifier, and strict institutions offering actionable recourse — and
//! evolves the three strategy frequencies under continuous-time replicator
//! dynamics.
//!
//! On top of the vector field the crate provides:
//!
//! * fixed-step RK4 integration with simplex clamping ([`dynamics`]),
//! * fixed-point enumeration, analytic and finite-difference Jacobians,
//!   closed-form 3x3 eigenvalues and stability classification ([`stability`]),
//! * basin-of-attraction measurement over initial-condition grids and
//!   parameter sweeps ([`basins`]),
//! * limit-cycle detection via Poincare crossings and a seeded random census
//!   ([`cycles`]),
//! * classifier performance frequencies and social cost ([`metrics`]),
//! * config loading and deterministic CSV/JSON report serialization
//!   ([`config`], [`report`]).

pub mod basins;
pub mod config;
pub mod cycles;
pub mod dynamics;
mod eigen;
pub mod error;
pub mod game;
pub mod metrics;
pub mod report;
pub mod stability;

pub use basins::{basin_sizes, classify_endpoint, sweep_basins, BasinReport, EndpointClass, SweepReport};
pub use config::{load_config, RunConfig, ScenarioName};
pub use cycles::{cycle_census, detect_cycle, recourse_center, CycleCensus, CycleReport};
pub use dynamics::{fitness, integrate, replicator_rhs, FitnessProfile, PopulationState, Trajectory};
pub use eigen::eigenvalues_3x3;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use game::{
    build_payoffs, check_low_dominance, BadStrategy, ClassificationOutcome, DominanceReport,
    GameParameters, GoodStrategy, InstitutionStrategy, OutcomeTable, PayoffMatrices, Scenario,
    UserKind,
};
pub use metrics::{annotate_trajectory, outcome_frequencies, social_cost, AnnotatedTrajectory, OutcomeFrequencies};
pub use report::{emit_report, render_report, Report, ReportFormat};
pub use stability::{
    classify, enumerate_fixed_points, jacobian_analytic, jacobian_fd, pg_star, FixedPointReport,
    PointKind, Stability,
};
