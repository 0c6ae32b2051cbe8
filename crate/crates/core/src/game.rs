//! Strategies, scenario outcome tables, and payoff-matrix construction.
//!
//! A scenario is fully described by its [`OutcomeTable`]: which classification
//! outcome (TP/FP/TN/FN) each (institution strategy, user type, user strategy)
//! combination produces. Payoffs are derived from outcomes, never stored
//! independently, so a table can never be inconsistent with its payoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decision-boundary strictness of an institution in the reduced game.
///
/// The lenient `Low` boundary exists only in the extended dominance check
/// ([`check_low_dominance`]); it is equivalent to or dominated by `Medium`
/// and plays no role in the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstitutionStrategy {
    Medium,
    High,
}

impl InstitutionStrategy {
    pub const ALL: [Self; 2] = [Self::Medium, Self::High];

    pub fn index(self) -> usize {
        match self {
            Self::Medium => 0,
            Self::High => 1,
        }
    }
}

/// Strategy of a user whose true quality is already above the success
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GoodStrategy {
    NotAdapt,
    Adapt,
}

impl GoodStrategy {
    pub const ALL: [Self; 2] = [Self::NotAdapt, Self::Adapt];

    pub fn index(self) -> usize {
        match self {
            Self::NotAdapt => 0,
            Self::Adapt => 1,
        }
    }
}

/// Strategy of a user whose true quality is below the success threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BadStrategy {
    Fake,
    Improve,
}

impl BadStrategy {
    pub const ALL: [Self; 2] = [Self::Fake, Self::Improve];

    pub fn index(self) -> usize {
        match self {
            Self::Fake => 0,
            Self::Improve => 1,
        }
    }
}

/// True user quality before any action is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserKind {
    Good,
    Bad,
}

impl UserKind {
    pub const ALL: [Self; 2] = [Self::Good, Self::Bad];

    pub fn index(self) -> usize {
        match self {
            Self::Good => 0,
            Self::Bad => 1,
        }
    }
}

/// Classification outcome of one institution/user encounter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassificationOutcome {
    #[serde(rename = "TP")]
    TruePositive,
    #[serde(rename = "FP")]
    FalsePositive,
    #[serde(rename = "TN")]
    TrueNegative,
    #[serde(rename = "FN")]
    FalseNegative,
}

impl ClassificationOutcome {
    /// Whether the user is accepted (granted the service).
    pub fn accepted(self) -> bool {
        matches!(self, Self::TruePositive | Self::FalsePositive)
    }

    /// Institution payoff for this outcome: gain `rho` on a true positive,
    /// loss `lambda` on a false positive, nothing when the user is rejected.
    pub fn institution_payoff(self, params: &GameParameters) -> f64 {
        match self {
            Self::TruePositive => params.rho,
            Self::FalsePositive => -params.lambda,
            Self::TrueNegative | Self::FalseNegative => 0.0,
        }
    }
}

/// The payoff and population constants of the game.
///
/// `p_b = 1 - p_g` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParameters {
    /// Institution gain per true positive.
    pub rho: f64,
    /// Institution loss per false positive.
    pub lambda: f64,
    /// User benefit when accepted.
    pub b: f64,
    /// Cost of improving / adapting.
    #[serde(rename = "c_I")]
    pub c_i: f64,
    /// Cost of faking.
    #[serde(rename = "c_F")]
    pub c_f: f64,
    /// Proportion of Good users in the user population.
    #[serde(rename = "p_G")]
    pub p_g: f64,
    /// Evolutionary rate of institutions relative to users.
    pub r: f64,
}

impl GameParameters {
    pub fn new(rho: f64, lambda: f64, b: f64, c_i: f64, c_f: f64, p_g: f64, r: f64) -> Result<Self> {
        let params = GameParameters {
            rho,
            lambda,
            b,
            c_i,
            c_f,
            p_g,
            r,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks every parameter invariant, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("lambda", self.lambda),
            ("b", self.b),
            ("c_I", self.c_i),
            ("c_F", self.c_f),
            ("r", self.r),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameters(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.c_f >= self.c_i {
            return Err(Error::InvalidParameters(format!(
                "c_F < c_I required (faking must be cheaper than improving), got c_F = {}, c_I = {}",
                self.c_f, self.c_i
            )));
        }
        if self.c_i >= self.b {
            return Err(Error::InvalidParameters(format!(
                "c_I < b required (improving must not exceed the benefit), got c_I = {}, b = {}",
                self.c_i, self.b
            )));
        }
        if !(0.0..=1.0).contains(&self.p_g) || !self.p_g.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "p_G must lie in [0, 1], got {}",
                self.p_g
            )));
        }
        Ok(())
    }

    /// Derived proportion of Bad users.
    pub fn p_b(&self) -> f64 {
        1.0 - self.p_g
    }
}

impl Default for GameParameters {
    /// The default figure parameters: lambda = 50, rho = 10, b = 50,
    /// c_F = 1, c_I = 5, p_G = 0.5, r = 1.
    fn default() -> Self {
        GameParameters {
            rho: 10.0,
            lambda: 50.0,
            b: 50.0,
            c_i: 5.0,
            c_f: 1.0,
            p_g: 0.5,
            r: 1.0,
        }
    }
}

/// Outcome of every (institution strategy, user type, user strategy)
/// combination of the reduced 2x2 game: 2 x 2 x 2 = 8 entries, total over
/// its domain by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTable {
    /// Indexed `[institution][user kind][user strategy]`.
    entries: [[[ClassificationOutcome; 2]; 2]; 2],
}

use ClassificationOutcome::{FalseNegative as FN, FalsePositive as FP, TrueNegative as TN, TruePositive as TP};

impl OutcomeTable {
    /// Imperfect classifier: Medium institutions cannot detect faking (FP),
    /// High institutions reject non-adapting users (FN).
    pub const BASELINE: OutcomeTable = OutcomeTable {
        entries: [
            [[TP, TP], [FP, TP]], // Medium vs (Good: NA, A), (Bad: F, I)
            [[FN, TP], [TN, FN]], // High   vs (Good: NA, A), (Bad: F, I)
        ],
    };

    /// Manipulation-proof classifier: differs from the baseline only in the
    /// (Medium, Bad, Fake) entry, which becomes a true negative.
    pub const MANIPULATION_PROOF: OutcomeTable = OutcomeTable {
        entries: [
            [[TP, TP], [TN, TP]],
            [[FN, TP], [TN, FN]],
        ],
    };

    /// Algorithmic recourse: differs from the baseline only in the
    /// (High, Bad, Improve) entry, which becomes a true positive.
    pub const RECOURSE: OutcomeTable = OutcomeTable {
        entries: [
            [[TP, TP], [FP, TP]],
            [[FN, TP], [TN, TP]],
        ],
    };

    pub fn new(entries: [[[ClassificationOutcome; 2]; 2]; 2]) -> Self {
        OutcomeTable { entries }
    }

    pub fn get(self, inst: InstitutionStrategy, kind: UserKind, strategy_index: usize) -> ClassificationOutcome {
        self.entries[inst.index()][kind.index()][strategy_index]
    }

    pub fn good(self, inst: InstitutionStrategy, strategy: GoodStrategy) -> ClassificationOutcome {
        self.get(inst, UserKind::Good, strategy.index())
    }

    pub fn bad(self, inst: InstitutionStrategy, strategy: BadStrategy) -> ClassificationOutcome {
        self.get(inst, UserKind::Bad, strategy.index())
    }

    /// Number of entries on which two tables differ.
    pub fn differing_entries(self, other: OutcomeTable) -> usize {
        let mut n = 0;
        for i in 0..2 {
            for u in 0..2 {
                for j in 0..2 {
                    if self.entries[i][u][j] != other.entries[i][u][j] {
                        n += 1;
                    }
                }
            }
        }
        n
    }
}

/// Which interaction paradigm the engine simulates. Custom scenarios carry
/// their own outcome table, so user-defined variants are first-class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    Baseline,
    ManipulationProof,
    Recourse,
    Custom(OutcomeTable),
}

impl Scenario {
    pub fn outcome_table(&self) -> OutcomeTable {
        match self {
            Scenario::Baseline => OutcomeTable::BASELINE,
            Scenario::ManipulationProof => OutcomeTable::MANIPULATION_PROOF,
            Scenario::Recourse => OutcomeTable::RECOURSE,
            Scenario::Custom(table) => *table,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::ManipulationProof => "manipulation_proof",
            Scenario::Recourse => "recourse",
            Scenario::Custom(_) => "custom",
        }
    }
}

/// The four payoff matrices of the reduced game, all indexed
/// `[institution strategy][user strategy]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffMatrices {
    /// Institution payoffs against Good users.
    pub i_good: [[f64; 2]; 2],
    /// Institution payoffs against Bad users.
    pub i_bad: [[f64; 2]; 2],
    /// Good-user payoffs.
    pub u_good: [[f64; 2]; 2],
    /// Bad-user payoffs.
    pub u_bad: [[f64; 2]; 2],
}

impl PayoffMatrices {
    /// Fills the matrices from an outcome table without validating `params`;
    /// used internally where parameters are already known to be valid.
    pub(crate) fn compute(scenario: &Scenario, params: &GameParameters) -> Self {
        let table = scenario.outcome_table();
        let mut m = PayoffMatrices {
            i_good: [[0.0; 2]; 2],
            i_bad: [[0.0; 2]; 2],
            u_good: [[0.0; 2]; 2],
            u_bad: [[0.0; 2]; 2],
        };
        // User adaptation costs per strategy index: Good (NotAdapt, Adapt),
        // Bad (Fake, Improve).
        let good_cost = [0.0, params.c_i];
        let bad_cost = [params.c_f, params.c_i];
        for inst in InstitutionStrategy::ALL {
            let i = inst.index();
            for j in 0..2 {
                let og = table.get(inst, UserKind::Good, j);
                let ob = table.get(inst, UserKind::Bad, j);
                m.i_good[i][j] = og.institution_payoff(params);
                m.i_bad[i][j] = ob.institution_payoff(params);
                m.u_good[i][j] = if og.accepted() { params.b } else { 0.0 } - good_cost[j];
                m.u_bad[i][j] = if ob.accepted() { params.b } else { 0.0 } - bad_cost[j];
            }
        }
        m
    }
}

/// Builds the four payoff matrices of the game for a scenario.
///
/// Institution entries are `rho` on TP, `-lambda` on FP and zero otherwise;
/// user entries are the acceptance benefit minus the strategy's cost. A pure
/// function of its arguments: regenerating yields identical entries.
pub fn build_payoffs(scenario: &Scenario, params: &GameParameters) -> Result<PayoffMatrices> {
    params.validate()?;
    Ok(PayoffMatrices::compute(scenario, params))
}

// ---------------------------------------------------------------------------
// Extended 3x3 game and dominance of the Low boundary
// ---------------------------------------------------------------------------

/// Institution strategies of the extended game, including the lenient
/// boundary that the reduced game drops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendedInstitutionStrategy {
    Low,
    Medium,
    High,
}

/// User strategies of the extended game; both user types may not adapt,
/// fake, or improve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendedUserStrategy {
    NotAdapt,
    Fake,
    Improve,
}

/// Outcomes of the extended 3x3 game, indexed
/// `[institution][user kind][user strategy]` with strategies ordered
/// (NotAdapt, Fake, Improve).
fn extended_outcome_table(scenario: &Scenario) -> Result<[[[ClassificationOutcome; 3]; 2]; 3]> {
    // Low accepts everyone; Medium rejects an unchanged Bad application;
    // High accepts only genuinely improved features, and detects faking.
    let mut table = [
        [[TP, TP, TP], [FP, FP, TP]], // Low
        [[TP, TP, TP], [TN, FP, TP]], // Medium
        [[FN, TP, TP], [TN, TN, FN]], // High
    ];
    match scenario {
        Scenario::Baseline => {}
        Scenario::ManipulationProof => table[1][1][1] = TN,
        Scenario::Recourse => table[2][1][2] = TP,
        Scenario::Custom(_) => {
            return Err(Error::UnsupportedScenario(
                "the extended 3x3 game is defined only for the built-in scenarios".into(),
            ))
        }
    }
    Ok(table)
}

/// Result of checking that the lenient boundary adds nothing to the game.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub scenario: String,
    /// Low's outcome row equals Medium's against Good users.
    pub equal_vs_good: bool,
    /// Low's institution payoff is <= Medium's against Bad users for every
    /// Bad-user strategy, with strict inequality somewhere.
    pub dominated_vs_bad: bool,
    /// How many Bad-user strategies give a strictly lower payoff to Low.
    pub strict_entries: usize,
    /// Institution payoffs of Low against Bad users, per (NotAdapt, Fake, Improve).
    pub low_vs_bad: [f64; 3],
    /// Institution payoffs of Medium against Bad users.
    pub medium_vs_bad: [f64; 3],
}

impl DominanceReport {
    pub fn holds(&self) -> bool {
        self.equal_vs_good && self.dominated_vs_bad
    }
}

/// Verifies on the extended 3x3 game that the Low boundary is equivalent to
/// Medium against Good users and weakly dominated by Medium against Bad
/// users, which justifies dropping it from the dynamics.
pub fn check_low_dominance(scenario: &Scenario, params: &GameParameters) -> Result<DominanceReport> {
    params.validate()?;
    let table = extended_outcome_table(scenario)?;
    let low = 0;
    let medium = 1;

    let equal_vs_good = (0..3).all(|j| table[low][0][j] == table[medium][0][j]);

    let mut low_vs_bad = [0.0; 3];
    let mut medium_vs_bad = [0.0; 3];
    for j in 0..3 {
        low_vs_bad[j] = table[low][1][j].institution_payoff(params);
        medium_vs_bad[j] = table[medium][1][j].institution_payoff(params);
    }
    let weakly = (0..3).all(|j| low_vs_bad[j] <= medium_vs_bad[j]);
    let strict_entries = (0..3).filter(|&j| low_vs_bad[j] < medium_vs_bad[j]).count();

    Ok(DominanceReport {
        scenario: scenario.name().to_string(),
        equal_vs_good,
        dominated_vs_bad: weakly && strict_entries >= 1,
        strict_entries,
        low_vs_bad,
        medium_vs_bad,
    })
}
