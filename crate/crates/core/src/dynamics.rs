//! Replicator vector field and fixed-step trajectory integration.
//!
//! The right-hand side is computed generically from fitness differences, so
//! custom outcome tables get the exact same treatment as the built-in
//! scenarios; the built-ins' closed-form systems exist only as test oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameParameters, PayoffMatrices, Scenario};

/// Excursions beyond the unit cube larger than this abort the integration.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// State of the three populations: fraction of Medium institutions, of Good
/// users playing NotAdapt, and of Bad users playing Fake. Complements are
/// always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub x1: f64,
    pub yg1: f64,
    pub yb1: f64,
}

impl PopulationState {
    pub fn new(x1: f64, yg1: f64, yb1: f64) -> Result<Self> {
        let state = PopulationState { x1, yg1, yb1 };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("x1", self.x1), ("yG1", self.yg1), ("yB1", self.yb1)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "population fraction {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.yg1, self.yb1]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        PopulationState {
            x1: a[0],
            yg1: a[1],
            yb1: a[2],
        }
    }

    pub fn distance_to(&self, other: &PopulationState) -> f64 {
        let dx = self.x1 - other.x1;
        let dy = self.yg1 - other.yg1;
        let dz = self.yb1 - other.yb1;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Per-strategy fitnesses and population averages at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitnessProfile {
    /// Institution fitness per strategy (Medium, High).
    pub f_i: [f64; 2],
    /// Good-user fitness per strategy (NotAdapt, Adapt).
    pub f_g: [f64; 2],
    /// Bad-user fitness per strategy (Fake, Improve).
    pub f_b: [f64; 2],
    pub fbar_i: f64,
    pub fbar_g: f64,
    pub fbar_b: f64,
}

/// Average payoffs at `state`: institutions average over both user types
/// weighted by `p_G`, users average over the institution mix.
pub fn fitness(state: &PopulationState, matrices: &PayoffMatrices, params: &GameParameters) -> FitnessProfile {
    let x = [state.x1, 1.0 - state.x1];
    let yg = [state.yg1, 1.0 - state.yg1];
    let yb = [state.yb1, 1.0 - state.yb1];
    let p_g = params.p_g;
    let p_b = params.p_b();

    let mut f_i = [0.0; 2];
    let mut f_g = [0.0; 2];
    let mut f_b = [0.0; 2];
    for (i, f) in f_i.iter_mut().enumerate() {
        *f = p_g * (matrices.i_good[i][0] * yg[0] + matrices.i_good[i][1] * yg[1])
            + p_b * (matrices.i_bad[i][0] * yb[0] + matrices.i_bad[i][1] * yb[1]);
    }
    for j in 0..2 {
        f_g[j] = matrices.u_good[0][j] * x[0] + matrices.u_good[1][j] * x[1];
        f_b[j] = matrices.u_bad[0][j] * x[0] + matrices.u_bad[1][j] * x[1];
    }

    FitnessProfile {
        f_i,
        f_g,
        f_b,
        fbar_i: f_i[0] * x[0] + f_i[1] * x[1],
        fbar_g: f_g[0] * yg[0] + f_g[1] * yg[1],
        fbar_b: f_b[0] * yb[0] + f_b[1] * yb[1],
    }
}

/// Fitness-difference brackets of the replicator system, precomputed from
/// the payoff matrices. Each bracket is affine in one or two coordinates, so
/// integration loops reduce to a handful of multiplications per step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RhsCoefficients {
    r: f64,
    /// dI(yg, yb) = i0 + ig yg + ib yb
    i0: f64,
    ig: f64,
    ib: f64,
    /// dG(x) = g0 + gx x
    g0: f64,
    gx: f64,
    /// dB(x) = b0 + bx x
    b0: f64,
    bx: f64,
}

impl RhsCoefficients {
    pub(crate) fn new(matrices: &PayoffMatrices, params: &GameParameters) -> Self {
        let p_g = params.p_g;
        let p_b = params.p_b();
        // Row differences of the institution matrices (Medium - High),
        // per user strategy.
        let dig = [
            matrices.i_good[0][0] - matrices.i_good[1][0],
            matrices.i_good[0][1] - matrices.i_good[1][1],
        ];
        let dib = [
            matrices.i_bad[0][0] - matrices.i_bad[1][0],
            matrices.i_bad[0][1] - matrices.i_bad[1][1],
        ];
        // Column differences of the user matrices (first - second strategy),
        // per institution.
        let dug = [
            matrices.u_good[0][0] - matrices.u_good[0][1],
            matrices.u_good[1][0] - matrices.u_good[1][1],
        ];
        let dub = [
            matrices.u_bad[0][0] - matrices.u_bad[0][1],
            matrices.u_bad[1][0] - matrices.u_bad[1][1],
        ];
        RhsCoefficients {
            r: params.r,
            i0: p_g * dig[1] + p_b * dib[1],
            ig: p_g * (dig[0] - dig[1]),
            ib: p_b * (dib[0] - dib[1]),
            g0: dug[1],
            gx: dug[0] - dug[1],
            b0: dub[1],
            bx: dub[0] - dub[1],
        }
    }

    #[inline]
    pub(crate) fn eval(&self, state: [f64; 3]) -> [f64; 3] {
        let [x, yg, yb] = state;
        [
            self.r * x * (1.0 - x) * (self.i0 + self.ig * yg + self.ib * yb),
            yg * (1.0 - yg) * (self.g0 + self.gx * x),
            yb * (1.0 - yb) * (self.b0 + self.bx * x),
        ]
    }
}

/// Replicator derivative with payoff matrices already built.
pub(crate) fn rhs_from_matrices(
    state: [f64; 3],
    matrices: &PayoffMatrices,
    params: &GameParameters,
) -> [f64; 3] {
    RhsCoefficients::new(matrices, params).eval(state)
}

/// Replicator derivative (dx1, dyG1, dyB1) at `state`, computed from fitness
/// differences of the scenario's payoff matrices.
pub fn replicator_rhs(state: &PopulationState, scenario: &Scenario, params: &GameParameters) -> [f64; 3] {
    let matrices = PayoffMatrices::compute(scenario, params);
    rhs_from_matrices(state.as_array(), &matrices, params)
}

/// A recorded solution of the replicator system.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PopulationState>,
    pub scenario: Scenario,
    pub params: GameParameters,
}

impl Trajectory {
    pub fn final_state(&self) -> PopulationState {
        *self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial state")
    }
}

/// Integrates the replicator system with classical fixed-step RK4.
///
/// After each step every coordinate is clamped back into `[0, 1]`; an
/// excursion beyond [`CLAMP_TOLERANCE`] aborts with
/// [`Error::StepInstability`] instead of being silently masked. Records the
/// initial state, every `record_every`-th step, and the final state.
pub fn integrate(
    state0: &PopulationState,
    scenario: &Scenario,
    params: &GameParameters,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    params.validate()?;
    state0.validate()?;
    if t_end <= 0.0 || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be >= 1".into()));
    }

    let matrices = PayoffMatrices::compute(scenario, params);
    let coeffs = RhsCoefficients::new(&matrices, params);
    let plan = StepPlan::new(t_end, dt);

    let capacity = plan.n_steps / record_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut y = state0.as_array();
    times.push(0.0);
    states.push(*state0);

    for step in 1..=plan.n_steps {
        let (h, t) = plan.step(step);
        y = rk4_step(&coeffs, y, h);
        clamp_into_cube(&mut y, t)?;
        if step % record_every == 0 || step == plan.n_steps {
            times.push(t);
            states.push(PopulationState::from_array(y));
        }
    }

    Ok(Trajectory {
        times,
        states,
        scenario: *scenario,
        params: *params,
    })
}

/// Uniform steps of `dt`, with a short final step when `dt` does not divide
/// `t_end` exactly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepPlan {
    pub n_full: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub t_end: f64,
    pub remainder: f64,
}

impl StepPlan {
    pub(crate) fn new(t_end: f64, dt: f64) -> Self {
        let n_full = (t_end / dt + 1e-9).floor() as usize;
        let remainder = t_end - n_full as f64 * dt;
        let n_steps = n_full + usize::from(remainder > 1e-9 * t_end.max(1.0));
        StepPlan {
            n_full,
            n_steps,
            dt,
            t_end,
            remainder,
        }
    }

    /// Step size and end time of the 1-based `step`.
    #[inline]
    pub(crate) fn step(&self, step: usize) -> (f64, f64) {
        if step <= self.n_full {
            (self.dt, step as f64 * self.dt)
        } else {
            (self.remainder, self.t_end)
        }
    }
}

/// Clamps coordinates back into the unit cube, failing on excursions beyond
/// the tolerance.
#[inline]
pub(crate) fn clamp_into_cube(y: &mut [f64; 3], t: f64) -> Result<()> {
    for (c, name) in [(0usize, "x1"), (1, "yG1"), (2, "yB1")] {
        if y[c] < 0.0 || y[c] > 1.0 {
            if y[c] < -CLAMP_TOLERANCE || y[c] > 1.0 + CLAMP_TOLERANCE {
                return Err(Error::StepInstability {
                    t,
                    coord: name,
                    value: y[c],
                    tol: CLAMP_TOLERANCE,
                });
            }
            y[c] = y[c].clamp(0.0, 1.0);
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn rk4_step(coeffs: &RhsCoefficients, y: [f64; 3], h: f64) -> [f64; 3] {
    let k1 = coeffs.eval(y);
    let k2 = coeffs.eval(add_scaled(y, k1, 0.5 * h));
    let k3 = coeffs.eval(add_scaled(y, k2, 0.5 * h));
    let k4 = coeffs.eval(add_scaled(y, k3, h));
    let mut out = y;
    for c in 0..3 {
        out[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    out
}

fn add_scaled(y: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}
