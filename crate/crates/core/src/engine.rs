//! Synchronous push-pull primal-dual iteration over a weight schedule.
//!
//! Each round mixes primal/dual iterates through the row-stochastic matrix
//! and the gradient/constraint trackers through the column-stochastic one,
//! takes one projected step, and refreshes the trackers with local
//! increments. All agents update from a snapshot of the previous round, so
//! one round is a deterministic function of (state, round index).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, BalanceVector, TraceRow};
use crate::linalg::mean;
use crate::network::{check_connectivity, validate_weights, WeightSchedule};
use crate::oracle::SaddleCertificate;
use crate::problem::ProblemInstance;
use crate::projections::{project_box, project_dual, DualSet};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("agent {agent}: initial primal point lies outside the feasible box")]
    InfeasibleStart { agent: usize },
    #[error("non-finite value produced at round {round} by agent {agent}")]
    NonFiniteState { round: usize, agent: usize },
    #[error("invalid step schedule: {0}")]
    BadStep(String),
    #[error("weight schedule failed validation:\n{0}")]
    InvalidWeights(String),
    #[error("graph schedule is not jointly connected over its declared window")]
    Disconnected,
    #[error("range error: {0}")]
    Range(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Diminishing step sequence `alpha_k = base / (k+1)^exponent`.
///
/// Exponents in (1/2, 1] make the sequence non-summable with summable
/// squares, which the convergence theory requires. A zero base is accepted
/// for fixed-point diagnostics; convergence needs a positive one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSchedule<T> {
    base: T,
    exponent: T,
}

impl<T: Scalar> StepSchedule<T> {
    pub fn new(base: T, exponent: T) -> Result<Self, EngineError> {
        if !base.is_finite() || base < T::zero() {
            return Err(EngineError::BadStep("base must be finite and non-negative".into()));
        }
        let half = T::from_f64_c(0.5);
        if !(exponent > half && exponent <= T::one()) {
            return Err(EngineError::BadStep("exponent must lie in (1/2, 1]".into()));
        }
        Ok(Self { base, exponent })
    }

    /// The schedule used throughout the reference experiments:
    /// `2/(k+1)^0.6`.
    pub fn canonical() -> Self {
        Self { base: T::from_f64_c(2.0), exponent: T::from_f64_c(0.6) }
    }

    pub fn base(&self) -> T {
        self.base
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }

    /// `alpha_k = base / (k+1)^exponent`; the `k+1` keeps round 0 finite.
    pub fn step_size(&self, k: usize) -> T {
        self.base / T::from_usize_c(k + 1).powf(self.exponent)
    }
}

/// Per-agent iterates and trackers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState<T> {
    /// Primal iterate, always inside the feasible box.
    pub x: Vec<T>,
    /// Dual iterate, always inside the dual set.
    pub lambda: Vec<T>,
    /// Tracker for the summed primal Lagrangian gradient.
    pub z: Vec<T>,
    /// Tracker for the summed constraint values.
    pub y: Vec<T>,
    /// Cached local primal gradient at the current (x, lambda).
    pub d: Vec<T>,
}

/// Snapshot of the whole network at one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmState<T> {
    pub round: usize,
    pub agents: Vec<AgentState<T>>,
}

impl<T: Scalar> SwarmState<T> {
    /// Uniform network average of the primal iterates.
    pub fn mean_x(&self) -> Vec<T> {
        let rows: Vec<Vec<T>> = self.agents.iter().map(|a| a.x.clone()).collect();
        mean(&rows)
    }

    /// Uniform network average of the dual iterates.
    pub fn mean_lambda(&self) -> Vec<T> {
        let rows: Vec<Vec<T>> = self.agents.iter().map(|a| a.lambda.clone()).collect();
        mean(&rows)
    }
}

fn check_dims<T: Scalar>(
    inst: &ProblemInstance<T>,
    points: &[Vec<T>],
    expect: usize,
    what: &str,
) -> Result<(), EngineError> {
    if points.len() != inst.num_agents {
        return Err(EngineError::Dimension(format!(
            "expected {} {what} vectors, got {}",
            inst.num_agents,
            points.len()
        )));
    }
    if let Some(bad) = points.iter().find(|v| v.len() != expect) {
        return Err(EngineError::Dimension(format!(
            "{what} vector has length {}, expected {expect}",
            bad.len()
        )));
    }
    Ok(())
}

/// Builds the round-0 state: duals are projected into the dual set, the
/// constraint tracker starts at the local constraint values and the gradient
/// tracker at the local primal gradients, so both tracking sums hold exactly
/// from the start.
pub fn init_state<T: Scalar>(
    inst: &ProblemInstance<T>,
    x0: &[Vec<T>],
    lambda0: &[Vec<T>],
) -> Result<SwarmState<T>, EngineError> {
    let dual_dim = inst.num_ineq + inst.num_eq;
    check_dims(inst, x0, inst.dim, "primal")?;
    check_dims(inst, lambda0, dual_dim, "dual")?;
    let dual_set = DualSet::new(inst.num_ineq, inst.num_eq, inst.dual_radius);
    let mut agents = Vec::with_capacity(inst.num_agents);
    for i in 0..inst.num_agents {
        if !inst.feasible_set.contains(&x0[i], T::zero()) {
            return Err(EngineError::InfeasibleStart { agent: i });
        }
        let lambda = project_dual(&dual_set, &lambda0[i]);
        let y = inst.eval_constraints(i, &x0[i]);
        let d = inst.primal_grad(i, &x0[i], &lambda);
        agents.push(AgentState { x: x0[i].clone(), lambda, z: d.clone(), y, d });
    }
    Ok(SwarmState { round: 0, agents })
}

/// Convenience start: every agent at the box projection of the origin with
/// zero multipliers.
pub fn zero_start<T: Scalar>(inst: &ProblemInstance<T>) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let origin = vec![T::zero(); inst.dim];
    let x0 = vec![project_box(&inst.feasible_set, &origin); inst.num_agents];
    let lambda0 = vec![vec![T::zero(); inst.num_ineq + inst.num_eq]; inst.num_agents];
    (x0, lambda0)
}

/// Advances every agent one round from the round-k snapshot:
/// mix, projected primal descent / dual ascent, then tracker refresh. The
/// tracker updates are written as `(mixed - old) + new` so a single agent
/// with identity weights reproduces the centralized recursion verbatim.
pub fn step<T: Scalar>(
    state: &SwarmState<T>,
    inst: &ProblemInstance<T>,
    ws: &WeightSchedule<T>,
    ss: &StepSchedule<T>,
) -> Result<SwarmState<T>, EngineError> {
    let m = inst.num_agents;
    if state.agents.len() != m {
        return Err(EngineError::Dimension(format!(
            "state has {} agents, instance has {m}",
            state.agents.len()
        )));
    }
    let k = state.round;
    let alpha = ss.step_size(k);
    let row_w = ws.row_at(k);
    let col_w = ws.col_at(k);
    let dual_set = DualSet::new(inst.num_ineq, inst.num_eq, inst.dual_radius);

    let xs: Vec<Vec<T>> = state.agents.iter().map(|a| a.x.clone()).collect();
    let ls: Vec<Vec<T>> = state.agents.iter().map(|a| a.lambda.clone()).collect();
    let ys: Vec<Vec<T>> = state.agents.iter().map(|a| a.y.clone()).collect();
    let zs: Vec<Vec<T>> = state.agents.iter().map(|a| a.z.clone()).collect();
    let mixed_x = row_w.mix_rows(&xs);
    let mixed_l = row_w.mix_rows(&ls);
    let mixed_y = col_w.mix_rows(&ys);
    let mixed_z = col_w.mix_rows(&zs);

    let mut agents = Vec::with_capacity(m);
    for i in 0..m {
        let old = &state.agents[i];
        let x_step: Vec<T> =
            (0..inst.dim).map(|j| mixed_x[i][j] - alpha * old.z[j]).collect();
        let x_new = project_box(&inst.feasible_set, &x_step);
        let l_step: Vec<T> =
            (0..old.lambda.len()).map(|r| mixed_l[i][r] + alpha * old.y[r]).collect();
        let lambda_new = project_dual(&dual_set, &l_step);

        let h_old = inst.eval_constraints(i, &old.x);
        let h_new = inst.eval_constraints(i, &x_new);
        let y_new: Vec<T> =
            (0..h_new.len()).map(|r| (mixed_y[i][r] - h_old[r]) + h_new[r]).collect();
        let d_new = inst.primal_grad(i, &x_new, &lambda_new);
        let z_new: Vec<T> =
            (0..inst.dim).map(|j| (mixed_z[i][j] - old.d[j]) + d_new[j]).collect();

        let finite = x_new.iter().chain(&lambda_new).chain(&y_new).chain(&d_new).chain(&z_new);
        for v in finite {
            if !v.is_finite() {
                return Err(EngineError::NonFiniteState { round: k + 1, agent: i });
            }
        }
        agents.push(AgentState { x: x_new, lambda: lambda_new, z: z_new, y: y_new, d: d_new });
    }
    Ok(SwarmState { round: k + 1, agents })
}

/// Recorded run history: states, their diagnostic rows, and the balance
/// vector at each recorded round, in matching order.
#[derive(Clone, Debug)]
pub struct Trace<T> {
    pub states: Vec<SwarmState<T>>,
    pub rows: Vec<TraceRow<T>>,
    pub balances: Vec<BalanceVector<T>>,
}

impl<T> Trace<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &SwarmState<T> {
        self.states.last().expect("trace holds at least the initial state")
    }
}

/// Runs `rounds` rounds from the given start, recording every
/// `record_every`-th round plus the final one (so the trace has
/// `1 + ceil(rounds / record_every)` entries). The weight schedule must
/// validate and be jointly connected over its declared window. A
/// certificate, when supplied, fills the distance-to-solution and gap
/// columns of the recorded rows.
#[allow(clippy::too_many_arguments)]
pub fn run<T: Scalar>(
    inst: &ProblemInstance<T>,
    ws: &WeightSchedule<T>,
    ss: &StepSchedule<T>,
    x0: &[Vec<T>],
    lambda0: &[Vec<T>],
    rounds: usize,
    record_every: usize,
    certificate: Option<&SaddleCertificate<T>>,
) -> Result<Trace<T>, EngineError> {
    if record_every == 0 {
        return Err(EngineError::Range("record_every must be at least 1".into()));
    }
    if ws.num_nodes() != inst.num_agents {
        return Err(EngineError::Dimension(format!(
            "weight schedule has {} nodes, instance has {} agents",
            ws.num_nodes(),
            inst.num_agents
        )));
    }
    let report = validate_weights(ws, ws.schedule());
    if !report.ok {
        return Err(EngineError::InvalidWeights(report.to_string()));
    }
    if !check_connectivity(ws.schedule(), ws.schedule().connectivity_window) {
        return Err(EngineError::Disconnected);
    }

    let mut state = init_state(inst, x0, lambda0)?;
    let mut balance = BalanceVector::ones(inst.num_agents);
    let mut trace = Trace { states: Vec::new(), rows: Vec::new(), balances: Vec::new() };
    let record =
        |state: &SwarmState<T>, balance: &BalanceVector<T>, trace: &mut Trace<T>| -> Result<(), EngineError> {
            let row = analysis::compute_row(state, inst, ss, Some(balance), certificate)?;
            trace.states.push(state.clone());
            trace.rows.push(row);
            trace.balances.push(balance.clone());
            Ok(())
        };
    for k in 0..rounds {
        if k % record_every == 0 {
            record(&state, &balance, &mut trace)?;
        }
        balance = analysis::propagate_balance(&balance, ws.col_at(k))?;
        state = step(&state, inst, ws, ss)?;
    }
    record(&state, &balance, &mut trace)?;
    Ok(trace)
}

/// Step-weighted time average of the uniform network-mean primal iterate
/// over rounds `[s, n]`: `(sum alpha_k * mean_x^k) / (sum alpha_k)`. The
/// trace must be recorded every round across the window.
pub fn ergodic_average<T: Scalar>(
    trace: &Trace<T>,
    s: usize,
    n: usize,
    ss: &StepSchedule<T>,
) -> Result<Vec<T>, EngineError> {
    if s > n {
        return Err(EngineError::Range(format!("window start {s} exceeds end {n}")));
    }
    let start = trace
        .states
        .iter()
        .position(|st| st.round == s)
        .ok_or_else(|| EngineError::Range(format!("round {s} is not recorded")))?;
    let count = n - s + 1;
    if start + count > trace.states.len() {
        return Err(EngineError::Range(format!("round {n} is not recorded")));
    }
    let window = &trace.states[start..start + count];
    for (offset, st) in window.iter().enumerate() {
        if st.round != s + offset {
            return Err(EngineError::Range(format!(
                "trace must be recorded every round over [{s}, {n}]; found round {} where {} was expected",
                st.round,
                s + offset
            )));
        }
    }
    if s == n {
        return Ok(window[0].mean_x());
    }
    let dim = window[0].agents[0].x.len();
    let mut acc = vec![T::zero(); dim];
    let mut weight = T::zero();
    for st in window {
        let alpha = ss.step_size(st.round);
        let mx = st.mean_x();
        for j in 0..dim {
            acc[j] += alpha * mx[j];
        }
        weight += alpha;
    }
    if weight <= T::zero() {
        return Err(EngineError::Range("step weights sum to zero over the window".into()));
    }
    Ok(acc.iter().map(|&v| v / weight).collect())
}
