//! Per-round diagnostics: consensus and tracking residuals, constraint
//! violation, objective gap, push-sum balance weights, the balanced tracker
//! transform, absolute-probability estimates, and the empirical rate fit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ergodic_average, StepSchedule, SwarmState, Trace};
use crate::linalg::{dist, Mat};
use crate::network::WeightSchedule;
use crate::oracle::SaddleCertificate;
use crate::problem::ProblemInstance;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not column-stochastic: column sums deviate by {dev:e}")]
    NonStochastic { dev: f64 },
    #[error("balance entry {index} fell below 1e-12; transform is degenerate")]
    DegenerateBalance { index: usize },
    #[error("mixing product has not converged: row spread {spread:e}")]
    NotConverged { spread: f64 },
    #[error("range error: {0}")]
    Range(String),
}

/// Diagnostics for one recorded round.
///
/// The optional fields are present exactly when a saddle certificate was
/// supplied: distances and gaps need a reference solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow<T> {
    pub round: usize,
    pub alpha: T,
    /// `max_i |x_i - mean_x|`.
    pub consensus_x: T,
    /// `max_i |lambda_i - mean_lambda|`.
    pub consensus_lambda: T,
    /// `|sum_i z_i - sum_i grad_x L_i(x_i, lambda_i)|`, gradients recomputed.
    pub tracking_z: T,
    /// `|sum_i y_i - sum_i h_i(x_i)|`, constraints recomputed.
    pub tracking_y: T,
    /// Positive part of each summed inequality row at the mean iterate.
    pub violation_ineq: Vec<T>,
    /// Absolute value of each summed equality row at the mean iterate.
    pub violation_eq: Vec<T>,
    /// `f(mean_x) - f_star`.
    pub gap: Option<T>,
    /// Frobenius norm of the balance-transformed tracker.
    pub s_norm: T,
    /// Per-agent `|x_i - x_star|`.
    pub dist_x: Option<Vec<T>>,
    /// Per-agent `|lambda_i - lambda_star|`.
    pub dist_lambda: Option<Vec<T>>,
    /// Per-agent `f(x_i) - f_star`.
    pub agent_gap: Option<Vec<T>>,
}

/// Push-sum balance weights: all-ones at round 0, multiplied by the
/// column-stochastic mixing matrix every round. Entries stay positive and
/// their sum is conserved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceVector<T> {
    v: Vec<T>,
}

impl<T: Scalar> BalanceVector<T> {
    /// Round-0 balance for `m` agents: all ones, one entry per tracker block
    /// row (2m total).
    pub fn ones(num_agents: usize) -> Self {
        Self { v: vec![T::one(); 2 * num_agents] }
    }

    pub fn entries(&self) -> &[T] {
        &self.v
    }

    pub fn num_agents(&self) -> usize {
        self.v.len() / 2
    }

    pub fn sum(&self) -> T {
        let mut acc = T::zero();
        for &e in &self.v {
            acc += e;
        }
        acc
    }
}

const COLUMN_STOCHASTIC_TOL: f64 = 1e-9;

/// Advances the balance vector one round: both m-entry blocks are multiplied
/// by the same column-stochastic matrix.
pub fn propagate_balance<T: Scalar>(
    bv: &BalanceVector<T>,
    col_w: &Mat<T>,
) -> Result<BalanceVector<T>, AnalysisError> {
    let m = col_w.size();
    if bv.v.len() != 2 * m {
        return Err(AnalysisError::Dimension(format!(
            "balance vector has {} entries, weight matrix is {m}x{m}",
            bv.v.len()
        )));
    }
    let mut dev = T::zero();
    for s in col_w.col_sums() {
        dev = dev.max((s - T::one()).abs());
    }
    if dev > T::from_f64_c(COLUMN_STOCHASTIC_TOL) {
        return Err(AnalysisError::NonStochastic { dev: dev.to_f64().unwrap_or(f64::NAN) });
    }
    let mut v = col_w.mul_vec(&bv.v[..m]);
    v.extend(col_w.mul_vec(&bv.v[m..]));
    Ok(BalanceVector { v })
}

/// Tracker rows divided by their balance weights, per block, with the block
/// means. The dual block carries the sign convention of the stacked tracker
/// (negated constraint tracker).
#[derive(Clone, Debug)]
pub struct TransformedTracker<T> {
    /// Rows `z_i / v_i`.
    pub s_primal: Vec<Vec<T>>,
    /// Rows `-y_i / v_{m+i}`.
    pub s_dual: Vec<Vec<T>>,
    /// `(1/2m) sum_i z_i`.
    pub mean_primal: Vec<T>,
    /// `(1/2m) sum_i (-y_i)`.
    pub mean_dual: Vec<T>,
    /// Frobenius norm over all transformed rows.
    pub frob_norm: T,
}

const BALANCE_FLOOR: f64 = 1e-12;

/// Applies the balance transform `s = V^{-1} eta` to the stacked tracker
/// `(z, -y)`. The weighted mean of the transformed rows recovers the plain
/// tracker average, which by the tracking identity equals the average of the
/// local gradients and (negated) constraint values.
pub fn transformed_tracker<T: Scalar>(
    state: &SwarmState<T>,
    bv: &BalanceVector<T>,
) -> Result<TransformedTracker<T>, AnalysisError> {
    let m = state.agents.len();
    if bv.v.len() != 2 * m {
        return Err(AnalysisError::Dimension(format!(
            "balance vector has {} entries for {m} agents",
            bv.v.len()
        )));
    }
    let floor = T::from_f64_c(BALANCE_FLOOR);
    if let Some(index) = bv.v.iter().position(|&e| e < floor) {
        return Err(AnalysisError::DegenerateBalance { index });
    }
    let n = state.agents[0].z.len();
    let dual_dim = state.agents[0].y.len();
    let two_m = T::from_usize_c(2 * m);
    let mut s_primal = Vec::with_capacity(m);
    let mut s_dual = Vec::with_capacity(m);
    let mut mean_primal = vec![T::zero(); n];
    let mut mean_dual = vec![T::zero(); dual_dim];
    let mut sq = T::zero();
    for (i, a) in state.agents.iter().enumerate() {
        let row: Vec<T> = a.z.iter().map(|&v| v / bv.v[i]).collect();
        for j in 0..n {
            mean_primal[j] += a.z[j];
            sq += row[j] * row[j];
        }
        s_primal.push(row);
        let row: Vec<T> = a.y.iter().map(|&v| -v / bv.v[m + i]).collect();
        for r in 0..dual_dim {
            mean_dual[r] += -a.y[r];
            sq += row[r] * row[r];
        }
        s_dual.push(row);
    }
    for v in mean_primal.iter_mut().chain(mean_dual.iter_mut()) {
        *v /= two_m;
    }
    Ok(TransformedTracker { s_primal, s_dual, mean_primal, mean_dual, frob_norm: sq.sqrt() })
}

/// Fills one diagnostic row. `balance` feeds the transformed-tracker norm
/// (all-ones is assumed when absent); `certificate` enables the gap and
/// distance columns.
pub fn compute_row<T: Scalar>(
    state: &SwarmState<T>,
    inst: &ProblemInstance<T>,
    ss: &StepSchedule<T>,
    balance: Option<&BalanceVector<T>>,
    certificate: Option<&SaddleCertificate<T>>,
) -> Result<TraceRow<T>, AnalysisError> {
    let m = inst.num_agents;
    if state.agents.len() != m {
        return Err(AnalysisError::Dimension(format!(
            "state has {} agents, instance has {m}",
            state.agents.len()
        )));
    }
    let mean_x = state.mean_x();
    let mean_l = state.mean_lambda();
    let mut consensus_x = T::zero();
    let mut consensus_lambda = T::zero();
    for a in &state.agents {
        consensus_x = consensus_x.max(dist(&a.x, &mean_x));
        consensus_lambda = consensus_lambda.max(dist(&a.lambda, &mean_l));
    }

    let dual_dim = inst.num_ineq + inst.num_eq;
    let mut z_gap = vec![T::zero(); inst.dim];
    let mut y_gap = vec![T::zero(); dual_dim];
    for (i, a) in state.agents.iter().enumerate() {
        let g = inst.primal_grad(i, &a.x, &a.lambda);
        let h = inst.eval_constraints(i, &a.x);
        for j in 0..inst.dim {
            z_gap[j] += a.z[j] - g[j];
        }
        for r in 0..dual_dim {
            y_gap[r] += a.y[r] - h[r];
        }
    }
    let tracking_z = crate::linalg::norm(&z_gap);
    let tracking_y = crate::linalg::norm(&y_gap);

    let sums = inst.total_constraints(&mean_x);
    let violation_ineq: Vec<T> = sums[..inst.num_ineq].iter().map(|&v| v.max(T::zero())).collect();
    let violation_eq: Vec<T> = sums[inst.num_ineq..].iter().map(|&v| v.abs()).collect();

    let owned_ones;
    let bv = match balance {
        Some(b) => b,
        None => {
            owned_ones = BalanceVector::ones(m);
            &owned_ones
        }
    };
    let s_norm = transformed_tracker(state, bv)?.frob_norm;

    let gap = certificate.map(|c| inst.total_objective(&mean_x) - c.f_star);
    let dist_x = certificate
        .map(|c| state.agents.iter().map(|a| dist(&a.x, &c.x_star)).collect::<Vec<_>>());
    let dist_lambda = certificate
        .map(|c| state.agents.iter().map(|a| dist(&a.lambda, &c.lambda_star)).collect::<Vec<_>>());
    let agent_gap = certificate.map(|c| {
        state.agents.iter().map(|a| inst.total_objective(&a.x) - c.f_star).collect::<Vec<_>>()
    });

    Ok(TraceRow {
        round: state.round,
        alpha: ss.step_size(state.round),
        consensus_x,
        consensus_lambda,
        tracking_z,
        tracking_y,
        violation_ineq,
        violation_eq,
        gap,
        s_norm,
        dist_x,
        dist_lambda,
        agent_gap,
    })
}

/// Row spread below which a mixing product is declared converged.
pub const ABS_PROB_SPREAD_TOL: f64 = 1e-8;

/// Estimated absolute-probability vector with the achieved row spread.
#[derive(Clone, Debug)]
pub struct AbsProbEstimate<T> {
    pub weights: Vec<T>,
    pub spread: T,
}

/// Multiplies `horizon` consecutive row-stochastic matrices starting at
/// round `s` (newest on the left). When the product's rows agree to within
/// the spread tolerance, their common value estimates the weights with which
/// early iterates influence the long-run network average.
pub fn estimate_abs_prob<T: Scalar>(
    ws: &WeightSchedule<T>,
    s: usize,
    horizon: usize,
) -> Result<AbsProbEstimate<T>, AnalysisError> {
    if horizon == 0 {
        return Err(AnalysisError::Range("horizon must be at least 1".into()));
    }
    let mut product = ws.row_at(s).clone();
    for k in (s + 1)..(s + horizon) {
        product = ws.row_at(k).matmul(&product);
    }
    let spread = product.max_row_spread();
    if spread > T::from_f64_c(ABS_PROB_SPREAD_TOL) {
        return Err(AnalysisError::NotConverged { spread: spread.to_f64().unwrap_or(f64::NAN) });
    }
    let m = product.size();
    let inv_m = T::one() / T::from_usize_c(m);
    let mut weights = vec![T::zero(); m];
    for i in 0..m {
        for (j, w) in weights.iter_mut().enumerate() {
            *w += product.get(i, j) * inv_m;
        }
    }
    Ok(AbsProbEstimate { weights, spread })
}

/// Empirical convergence-rate fit over a logarithmic round grid.
#[derive(Clone, Debug)]
pub struct RateFit<T> {
    /// Grid rounds `n`.
    pub rounds: Vec<usize>,
    /// Gap of the step-weighted time average: `g(n) = f(avg_s^n) - f_star`.
    pub gaps: Vec<T>,
    /// Step sums `S(n) = sum_{k=s}^n alpha_k`.
    pub step_sums: Vec<T>,
    /// `g(n) * S(n)`.
    pub products: Vec<T>,
    /// Running maximum of the products.
    pub running_max: Vec<T>,
    /// Final running maximum: the empirical bound constant.
    pub bound_constant: T,
    /// Log-log slope of `g` against `n`, fitted over grid points with
    /// strictly positive gap; absent when fewer than two such points exist.
    pub slope: Option<T>,
}

const RATE_GRID_POINTS: usize = 40;

fn log_grid(s: usize, n_max: usize) -> Vec<usize> {
    let lo = (s + 1) as f64;
    let hi = n_max as f64;
    let mut grid = Vec::with_capacity(RATE_GRID_POINTS);
    for i in 0..RATE_GRID_POINTS {
        let t = i as f64 / (RATE_GRID_POINTS - 1) as f64;
        let v = (lo.ln() + t * (hi.ln() - lo.ln())).exp().round() as usize;
        let v = v.clamp(s + 1, n_max);
        if grid.last() != Some(&v) {
            grid.push(v);
        }
    }
    grid
}

/// Evaluates the time-average optimality gap along a logarithmic grid of end
/// rounds and fits its decay. The running maximum of `g(n) * S(n)` is the
/// empirical counterpart of the rate bound's constant; the log-log slope of
/// `g(n)` measures the achieved decay order.
pub fn fit_rate<T: Scalar>(
    trace: &Trace<T>,
    inst: &ProblemInstance<T>,
    ss: &StepSchedule<T>,
    s: usize,
    certificate: &SaddleCertificate<T>,
) -> Result<RateFit<T>, AnalysisError> {
    let last = trace
        .states
        .last()
        .ok_or_else(|| AnalysisError::Range("trace is empty".into()))?
        .round;
    if s >= last {
        return Err(AnalysisError::Range(format!(
            "window start {s} must precede the final recorded round {last}"
        )));
    }
    let rounds = log_grid(s, last);
    let mut gaps = Vec::with_capacity(rounds.len());
    let mut step_sums = Vec::with_capacity(rounds.len());
    let mut products = Vec::with_capacity(rounds.len());
    let mut running_max = Vec::with_capacity(rounds.len());
    let mut best = T::neg_infinity();
    for &n in &rounds {
        let avg = ergodic_average(trace, s, n, ss)
            .map_err(|e| AnalysisError::Range(e.to_string()))?;
        let g = inst.total_objective(&avg) - certificate.f_star;
        let mut sum = T::zero();
        for k in s..=n {
            sum += ss.step_size(k);
        }
        let prod = g * sum;
        best = best.max(prod);
        gaps.push(g);
        step_sums.push(sum);
        products.push(prod);
        running_max.push(best);
    }

    let mut pts: Vec<(T, T)> = Vec::new();
    for (i, &g) in gaps.iter().enumerate() {
        if g > T::zero() {
            pts.push((T::from_usize_c(rounds[i]).ln(), g.ln()));
        }
    }
    let slope = if pts.len() < 2 {
        None
    } else {
        let count = T::from_usize_c(pts.len());
        let mut mx = T::zero();
        let mut my = T::zero();
        for &(x, y) in &pts {
            mx += x;
            my += y;
        }
        mx /= count;
        my /= count;
        let mut cov = T::zero();
        let mut var = T::zero();
        for &(x, y) in &pts {
            cov += (x - mx) * (y - my);
            var += (x - mx) * (x - mx);
        }
        if var > T::zero() {
            Some(cov / var)
        } else {
            None
        }
    };

    Ok(RateFit {
        rounds,
        gaps,
        step_sums,
        products,
        bound_constant: *running_max.last().expect("grid is non-empty"),
        running_max,
        slope,
    })
}

// -------- CSV schema --------

/// Stable CSV header for a trace of `m` agents, `p` inequality rows, and `q`
/// equality rows. Column order is part of the output contract.
pub fn csv_header(m: usize, p: usize, q: usize) -> String {
    let mut cols: Vec<String> = ["round", "alpha", "consensus_x", "consensus_lambda", "tracking_z", "tracking_y"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for r in 1..=p {
        cols.push(format!("viol_ineq_{r}"));
    }
    for r in 1..=q {
        cols.push(format!("viol_eq_{r}"));
    }
    cols.push("gap".into());
    cols.push("s_norm".into());
    for i in 1..=m {
        cols.push(format!("dist_x_{i}"));
    }
    for i in 1..=m {
        cols.push(format!("dist_lambda_{i}"));
    }
    for i in 1..=m {
        cols.push(format!("agent_gap_{i}"));
    }
    cols.join(",")
}

/// One CSV line matching [`csv_header`]; optional columns render as empty
/// cells when no certificate was available. `Display` formatting round-trips
/// for the supported float types.
pub fn csv_line<T: Scalar>(row: &TraceRow<T>, num_agents: usize) -> String {
    let mut cells: Vec<String> = vec![
        row.round.to_string(),
        format!("{}", row.alpha),
        format!("{}", row.consensus_x),
        format!("{}", row.consensus_lambda),
        format!("{}", row.tracking_z),
        format!("{}", row.tracking_y),
    ];
    for v in &row.violation_ineq {
        cells.push(format!("{v}"));
    }
    for v in &row.violation_eq {
        cells.push(format!("{v}"));
    }
    cells.push(row.gap.map(|g| format!("{g}")).unwrap_or_default());
    cells.push(format!("{}", row.s_norm));
    for field in [&row.dist_x, &row.dist_lambda, &row.agent_gap] {
        match field {
            Some(vals) => cells.extend(vals.iter().map(|v| format!("{v}"))),
            None => cells.extend(std::iter::repeat(String::new()).take(num_agents)),
        }
    }
    cells.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{init_state, run, zero_start, AgentState};
    use crate::network::{canonical_schedule, uniform_weights, DiGraph, GraphSchedule};
    use crate::problem::canonical_instance;
    use approx::assert_abs_diff_eq;

    fn canonical_setup() -> (ProblemInstance<f64>, WeightSchedule<f64>, StepSchedule<f64>) {
        let inst = canonical_instance(11).unwrap();
        let ws = uniform_weights(&canonical_schedule()).unwrap();
        (inst, ws, StepSchedule::canonical())
    }

    fn complete_weights(m: usize) -> WeightSchedule<f64> {
        let mut edges = Vec::new();
        for i in 0..m {
            for j in 0..m {
                edges.push((i, j));
            }
        }
        let g = DiGraph::new(m, &edges).unwrap();
        uniform_weights(&GraphSchedule::new(vec![g], 1).unwrap()).unwrap()
    }

    #[test]
    fn doubly_stochastic_mixing_keeps_balance_at_ones() {
        let ws = complete_weights(4);
        let mut bv = BalanceVector::<f64>::ones(4);
        for _ in 0..10 {
            bv = propagate_balance(&bv, ws.col_at(0)).unwrap();
        }
        for &e in bv.entries() {
            assert_abs_diff_eq!(e, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn balance_sum_is_conserved_over_long_runs() {
        let (_, ws, _) = canonical_setup();
        let mut bv = BalanceVector::<f64>::ones(6);
        let mut min_entry = f64::INFINITY;
        for k in 0..1000 {
            bv = propagate_balance(&bv, ws.col_at(k)).unwrap();
            if k == 199 {
                min_entry = bv.entries().iter().cloned().fold(f64::INFINITY, f64::min);
            }
        }
        assert_abs_diff_eq!(bv.sum(), 12.0, epsilon = 1e-12);
        // positivity floor after 200 rounds: recorded, not asserted against
        // any analytic constant
        assert!(min_entry > 0.0);
        println!("balance min entry after 200 rounds: {min_entry:e}");
    }

    #[test]
    fn propagate_rejects_row_stochastic_input() {
        let (_, ws, _) = canonical_setup();
        let bv = BalanceVector::<f64>::ones(6);
        // phase-0 row matrix has a column summing to 1.5
        match propagate_balance(&bv, ws.row_at(0)) {
            Err(AnalysisError::NonStochastic { dev }) => assert!(dev > 0.4),
            other => panic!("expected NonStochastic, got {other:?}"),
        }
    }

    #[test]
    fn transformed_tracker_with_unit_balance_is_the_raw_tracker() {
        let (inst, _, _) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let state = init_state(&inst, &x0, &l0).unwrap();
        let bv = BalanceVector::ones(inst.num_agents);
        let t = transformed_tracker(&state, &bv).unwrap();
        for (i, a) in state.agents.iter().enumerate() {
            assert_eq!(t.s_primal[i], a.z);
            let negated: Vec<f64> = a.y.iter().map(|&v| -v).collect();
            assert_eq!(t.s_dual[i], negated);
        }
    }

    #[test]
    fn transformed_tracker_mean_matches_local_averages() {
        let (inst, ws, ss) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let trace = run(&inst, &ws, &ss, &x0, &l0, 50, 1, None).unwrap();
        for (state, bv) in trace.states.iter().zip(&trace.balances) {
            let t = transformed_tracker(state, bv).unwrap();
            let two_m = 2.0 * inst.num_agents as f64;
            let mut d_sum = vec![0.0; inst.dim];
            let mut h_sum = vec![0.0; inst.num_ineq + inst.num_eq];
            for (i, a) in state.agents.iter().enumerate() {
                let g = inst.primal_grad(i, &a.x, &a.lambda);
                let h = inst.eval_constraints(i, &a.x);
                for j in 0..inst.dim {
                    d_sum[j] += g[j];
                }
                for r in 0..h.len() {
                    h_sum[r] += h[r];
                }
            }
            for j in 0..inst.dim {
                assert_abs_diff_eq!(t.mean_primal[j], d_sum[j] / two_m, epsilon = 1e-10);
            }
            for r in 0..h_sum.len() {
                assert_abs_diff_eq!(t.mean_dual[r], -h_sum[r] / two_m, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn transformed_tracker_rejects_degenerate_balance() {
        let (inst, _, _) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let state = init_state(&inst, &x0, &l0).unwrap();
        let mut bv = BalanceVector::ones(inst.num_agents);
        bv.v[3] = 1e-13;
        match transformed_tracker(&state, &bv) {
            Err(AnalysisError::DegenerateBalance { index: 3 }) => {}
            other => panic!("expected DegenerateBalance, got {other:?}"),
        }
    }

    #[test]
    fn compute_row_at_init_has_zero_tracking_and_violation_structure() {
        let (inst, _, ss) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let state = init_state(&inst, &x0, &l0).unwrap();
        let row = compute_row(&state, &inst, &ss, None, None).unwrap();
        assert_eq!(row.round, 0);
        assert_eq!(row.tracking_z, 0.0);
        assert_eq!(row.tracking_y, 0.0);
        // identical agents: consensus residuals are exactly zero
        assert_eq!(row.consensus_x, 0.0);
        assert_eq!(row.consensus_lambda, 0.0);
        assert!(row.gap.is_none());
        assert!(row.dist_x.is_none());
        // the summed quadratic row is strictly feasible at the origin, so
        // its positive part is exactly zero
        assert_eq!(row.violation_ineq[0], 0.0);
        assert!(row.violation_eq[0] >= 0.0);
    }

    #[test]
    fn compute_row_single_agent_has_zero_consensus() {
        let (inst, _, ss) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let state = init_state(&inst, &x0, &l0).unwrap();
        let solo = SwarmState { round: 0, agents: vec![state.agents[0].clone()] };
        let mut one = inst.clone();
        one.num_agents = 1;
        one.objectives.truncate(1);
        one.constraints.truncate(1);
        let row = compute_row(&solo, &one, &ss, None, None).unwrap();
        assert_eq!(row.consensus_x, 0.0);
        assert_eq!(row.consensus_lambda, 0.0);
    }

    #[test]
    fn abs_prob_uniform_for_complete_graph() {
        let ws = complete_weights(5);
        let est = estimate_abs_prob(&ws, 0, 1).unwrap();
        assert_eq!(est.spread, 0.0);
        for &w in &est.weights {
            assert_abs_diff_eq!(w, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn abs_prob_converges_on_the_canonical_schedule() {
        let (_, ws, _) = canonical_setup();
        let est = estimate_abs_prob(&ws, 0, 200).unwrap();
        assert!(est.spread < ABS_PROB_SPREAD_TOL);
        let total: f64 = est.weights.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        assert!(est.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn abs_prob_disconnected_never_converges() {
        let ws: WeightSchedule<f64> = uniform_weights(
            &GraphSchedule::new(vec![DiGraph::with_self_loops(3, &[]).unwrap()], 1).unwrap(),
        )
        .unwrap();
        for horizon in [1, 10, 100] {
            match estimate_abs_prob(&ws, 0, horizon) {
                Err(AnalysisError::NotConverged { spread }) => assert!(spread >= 1.0),
                other => panic!("expected NotConverged, got {other:?}"),
            }
        }
    }

    #[test]
    fn fit_rate_constant_trace_at_the_solution_gives_zero_constant() {
        let (inst, _, ss) = canonical_setup();
        // power-of-two coordinates keep the step-weighted averaging exact,
        // so the gap is identically zero rather than merely tiny
        let x = vec![0.5, -0.5];
        let cert = SaddleCertificate {
            x_star: x.clone(),
            lambda_star: vec![0.0, 0.0],
            f_star: inst.total_objective(&x),
            kkt_residual: 0.0,
            saddle_gap: 0.0,
            method: "fixture".into(),
        };
        let agent = AgentState {
            x: x.clone(),
            lambda: vec![0.0, 0.0],
            z: vec![0.0; 2],
            y: vec![0.0; 2],
            d: vec![0.0; 2],
        };
        let states: Vec<SwarmState<f64>> = (0..=100)
            .map(|k| SwarmState { round: k, agents: vec![agent.clone(); inst.num_agents] })
            .collect();
        let trace = Trace { states, rows: vec![], balances: vec![] };
        let fit = fit_rate(&trace, &inst, &ss, 10, &cert).unwrap();
        assert_eq!(fit.bound_constant, 0.0);
        assert!(fit.gaps.iter().all(|&g| g == 0.0));
        assert!(fit.slope.is_none());
        assert_eq!(fit.rounds.last(), Some(&100));
    }

    #[test]
    fn fit_rate_rejects_bad_windows() {
        let (inst, ws, ss) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let trace = run(&inst, &ws, &ss, &x0, &l0, 20, 1, None).unwrap();
        let cert = SaddleCertificate {
            x_star: vec![0.0, 0.0],
            lambda_star: vec![0.0, 0.0],
            f_star: 0.0,
            kkt_residual: 0.0,
            saddle_gap: 0.0,
            method: "fixture".into(),
        };
        assert!(matches!(fit_rate(&trace, &inst, &ss, 20, &cert), Err(AnalysisError::Range(_))));
        assert!(matches!(fit_rate(&trace, &inst, &ss, 25, &cert), Err(AnalysisError::Range(_))));
    }

    #[test]
    fn csv_schema_is_stable() {
        let header = csv_header(2, 1, 1);
        assert_eq!(
            header,
            "round,alpha,consensus_x,consensus_lambda,tracking_z,tracking_y,\
             viol_ineq_1,viol_eq_1,gap,s_norm,dist_x_1,dist_x_2,\
             dist_lambda_1,dist_lambda_2,agent_gap_1,agent_gap_2"
        );
    }

    #[test]
    fn csv_line_matches_header_width_and_round_trips() {
        let (inst, _, ss) = canonical_setup();
        let (x0, l0) = zero_start(&inst);
        let state = init_state(&inst, &x0, &l0).unwrap();
        let m = inst.num_agents;
        let header = csv_header(m, inst.num_ineq, inst.num_eq);
        let want = header.split(',').count();

        let bare = compute_row(&state, &inst, &ss, None, None).unwrap();
        let line = csv_line(&bare, m);
        assert_eq!(line.split(',').count(), want);
        // optional columns are empty without a certificate
        assert!(line.split(',').nth(8).unwrap().is_empty());

        let cert = SaddleCertificate {
            x_star: vec![0.1, 0.2],
            lambda_star: vec![0.0, 0.0],
            f_star: 1.0,
            kkt_residual: 0.0,
            saddle_gap: 0.0,
            method: "fixture".into(),
        };
        let full = compute_row(&state, &inst, &ss, None, Some(&cert)).unwrap();
        let line = csv_line(&full, m);
        assert_eq!(line.split(',').count(), want);
        let alpha_cell = line.split(',').nth(1).unwrap();
        let parsed: f64 = alpha_cell.parse().unwrap();
        assert_eq!(parsed, full.alpha);
    }
}
