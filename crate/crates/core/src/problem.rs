//! Problem data: per-agent objectives, per-agent constraint rows, the box
//! feasible set, and the bounded dual set radius.
//!
//! The global problem solved by the crate is
//!
//! ```text
//!   minimize   sum_i f_i(x)                over x in X (a box)
//!   subject to sum_i h_i(x) <= 0           (first p rows, convex)
//!              sum_i h_i(x)  = 0           (last q rows, affine)
//! ```
//!
//! where agent `i` privately owns `f_i` and `h_i`. Objectives are
//! linear-plus-logistic, `f_i(x) = a.x + b + c*log(1+exp(d.x))` with
//! `c >= 0`. The first inequality row of every agent is the quadratic
//! `w*|x|^2 + o` with `w >= 0`; further convex inequality rows and the
//! affine equality rows are optional.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{add_scaled, dot, norm};
use crate::scalar::{logistic, softplus, Scalar};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("agent index {index} out of range for {count} agents")]
    AgentIndex { index: usize, count: usize },
    #[error("Slater margin is not positive: gamma(x_ref) = {gamma}")]
    SlaterViolation { gamma: f64 },
    #[error("instance generation failed after {attempts} attempts: {reason}")]
    GenerationFailure { attempts: usize, reason: String },
    #[error("minimization oracle failed while computing the dual radius: {0}")]
    MinOracle(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// One agent's objective `f(x) = lin.x + offset + logistic_weight * softplus(logistic_dir.x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalObjective<T> {
    pub lin: Vec<T>,
    pub offset: T,
    pub logistic_weight: T,
    pub logistic_dir: Vec<T>,
}

impl<T: Scalar> LocalObjective<T> {
    pub fn eval(&self, x: &[T]) -> T {
        dot(&self.lin, x) + self.offset + self.logistic_weight * softplus(dot(&self.logistic_dir, x))
    }

    pub fn grad(&self, x: &[T]) -> Vec<T> {
        let mut g = self.lin.clone();
        let s = self.logistic_weight * logistic(dot(&self.logistic_dir, x));
        add_scaled(&mut g, s, &self.logistic_dir);
        g
    }
}

/// Additional smooth convex inequality row shapes beyond the leading
/// quadratic row. Closed set of analytic forms so instances stay fully
/// serializable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ConvexRow<T> {
    Affine { coeffs: Vec<T>, offset: T },
    Quadratic { weight: T, offset: T },
    Softplus { weight: T, dir: Vec<T>, offset: T },
}

impl<T: Scalar> ConvexRow<T> {
    pub fn eval(&self, x: &[T]) -> T {
        match self {
            ConvexRow::Affine { coeffs, offset } => dot(coeffs, x) + *offset,
            ConvexRow::Quadratic { weight, offset } => *weight * dot(x, x) + *offset,
            ConvexRow::Softplus { weight, dir, offset } => *weight * softplus(dot(dir, x)) + *offset,
        }
    }

    pub fn grad(&self, x: &[T]) -> Vec<T> {
        match self {
            ConvexRow::Affine { coeffs, .. } => coeffs.clone(),
            ConvexRow::Quadratic { weight, .. } => {
                x.iter().map(|&v| (*weight + *weight) * v).collect()
            }
            ConvexRow::Softplus { weight, dir, .. } => {
                let s = *weight * logistic(dot(dir, x));
                dir.iter().map(|&v| s * v).collect()
            }
        }
    }

    fn dim_ok(&self, n: usize) -> bool {
        match self {
            ConvexRow::Affine { coeffs, .. } => coeffs.len() == n,
            ConvexRow::Quadratic { .. } => true,
            ConvexRow::Softplus { dir, .. } => dir.len() == n,
        }
    }

    fn convex_params_ok(&self) -> bool {
        match self {
            ConvexRow::Affine { .. } => true,
            ConvexRow::Quadratic { weight, .. } | ConvexRow::Softplus { weight, .. } => {
                *weight >= T::zero()
            }
        }
    }

    fn values_finite(&self) -> bool {
        match self {
            ConvexRow::Affine { coeffs, offset } => {
                coeffs.iter().all(|v| v.is_finite()) && offset.is_finite()
            }
            ConvexRow::Quadratic { weight, offset } => weight.is_finite() && offset.is_finite(),
            ConvexRow::Softplus { weight, dir, offset } => {
                weight.is_finite() && offset.is_finite() && dir.iter().all(|v| v.is_finite())
            }
        }
    }
}

/// One agent's constraint rows `h(x)`, ordered as: the leading quadratic
/// inequality row, then `extra_ineq` rows, then the affine equality rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalConstraint<T> {
    pub quad_weight: T,
    pub quad_offset: T,
    pub extra_ineq: Vec<ConvexRow<T>>,
    /// `num_eq` rows of length `dim`.
    pub affine_rows: Vec<Vec<T>>,
    pub affine_offsets: Vec<T>,
}

impl<T: Scalar> LocalConstraint<T> {
    pub fn num_ineq(&self) -> usize {
        1 + self.extra_ineq.len()
    }

    pub fn num_eq(&self) -> usize {
        self.affine_offsets.len()
    }

    /// Evaluates all rows: `num_ineq` inequality values then `num_eq`
    /// equality values.
    pub fn eval(&self, x: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_ineq() + self.num_eq());
        out.push(self.quad_weight * dot(x, x) + self.quad_offset);
        for row in &self.extra_ineq {
            out.push(row.eval(x));
        }
        for (row, &off) in self.affine_rows.iter().zip(&self.affine_offsets) {
            out.push(dot(row, x) + off);
        }
        out
    }

    /// Per-row gradients in the same order as [`eval`](Self::eval); each
    /// entry has length `dim`.
    pub fn row_grads(&self, x: &[T]) -> Vec<Vec<T>> {
        let mut out = Vec::with_capacity(self.num_ineq() + self.num_eq());
        let two_w = self.quad_weight + self.quad_weight;
        out.push(x.iter().map(|&v| two_w * v).collect());
        for row in &self.extra_ineq {
            out.push(row.grad(x));
        }
        for row in &self.affine_rows {
            out.push(row.clone());
        }
        out
    }
}

/// Axis-aligned box `{ x : lower <= x <= upper }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSet<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self, ProblemError> {
        if lower.len() != upper.len() {
            return Err(ProblemError::Dimension(format!(
                "box bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for j in 0..lower.len() {
            if !(lower[j].is_finite() && upper[j].is_finite()) {
                return Err(ProblemError::Invalid("box bounds must be finite".into()));
            }
            if lower[j] > upper[j] {
                return Err(ProblemError::Invalid(format!(
                    "box lower bound exceeds upper bound at coordinate {j}"
                )));
            }
        }
        Ok(BoxSet { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(j, &v)| v >= self.lower[j] - tol && v <= self.upper[j] + tol)
    }
}

/// Complete problem data shared by the engine, the analysis layer and the
/// centralized reference solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance<T> {
    pub num_agents: usize,
    pub dim: usize,
    pub num_ineq: usize,
    pub num_eq: usize,
    pub objectives: Vec<LocalObjective<T>>,
    pub constraints: Vec<LocalConstraint<T>>,
    pub feasible_set: BoxSet<T>,
    /// Point in the box where the summed inequality rows are strictly
    /// negative and the summed equality rows vanish.
    pub slater_point: Vec<T>,
    /// Radius bounding the inequality block of the dual set.
    pub dual_radius: T,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn validate(&self) -> Result<(), ProblemError> {
        let (m, n, p, q) = (self.num_agents, self.dim, self.num_ineq, self.num_eq);
        if m == 0 || n == 0 {
            return Err(ProblemError::Invalid("need at least one agent and one dimension".into()));
        }
        if p == 0 {
            return Err(ProblemError::Invalid(
                "the leading quadratic row is always present, so num_ineq >= 1".into(),
            ));
        }
        if self.objectives.len() != m || self.constraints.len() != m {
            return Err(ProblemError::Dimension(format!(
                "expected {m} objectives and constraints, got {} and {}",
                self.objectives.len(),
                self.constraints.len()
            )));
        }
        for (i, obj) in self.objectives.iter().enumerate() {
            if obj.lin.len() != n || obj.logistic_dir.len() != n {
                return Err(ProblemError::Dimension(format!("objective {i} has wrong dimension")));
            }
            let finite = obj.lin.iter().all(|v| v.is_finite())
                && obj.logistic_dir.iter().all(|v| v.is_finite())
                && obj.offset.is_finite()
                && obj.logistic_weight.is_finite();
            if !finite {
                return Err(ProblemError::Invalid(format!("objective {i} has non-finite values")));
            }
            if obj.logistic_weight < T::zero() {
                return Err(ProblemError::Invalid(format!(
                    "objective {i} has negative logistic weight (convexity requires >= 0)"
                )));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.num_ineq() != p || con.num_eq() != q {
                return Err(ProblemError::Dimension(format!(
                    "constraint {i} has {} inequality and {} equality rows, expected {p} and {q}",
                    con.num_ineq(),
                    con.num_eq()
                )));
            }
            if con.affine_rows.len() != q || con.affine_rows.iter().any(|r| r.len() != n) {
                return Err(ProblemError::Dimension(format!(
                    "constraint {i} affine rows have wrong shape"
                )));
            }
            let finite = con.quad_weight.is_finite()
                && con.quad_offset.is_finite()
                && con.affine_offsets.iter().all(|v| v.is_finite())
                && con.affine_rows.iter().flatten().all(|v| v.is_finite())
                && con.extra_ineq.iter().all(|r| r.values_finite());
            if !finite {
                return Err(ProblemError::Invalid(format!("constraint {i} has non-finite values")));
            }
            if con.quad_weight < T::zero() {
                return Err(ProblemError::Invalid(format!(
                    "constraint {i} has negative quadratic weight (convexity requires >= 0)"
                )));
            }
            if con.extra_ineq.iter().any(|r| !r.dim_ok(n)) {
                return Err(ProblemError::Dimension(format!(
                    "constraint {i} has an extra row of wrong dimension"
                )));
            }
            if !con.extra_ineq.iter().all(|r| r.convex_params_ok()) {
                return Err(ProblemError::Invalid(format!(
                    "constraint {i} has an extra row with negative curvature weight"
                )));
            }
        }
        if self.feasible_set.dim() != n {
            return Err(ProblemError::Dimension("box dimension differs from instance".into()));
        }
        BoxSet::new(self.feasible_set.lower.clone(), self.feasible_set.upper.clone())?;
        if self.slater_point.len() != n {
            return Err(ProblemError::Dimension("Slater point has wrong dimension".into()));
        }
        if !self.feasible_set.contains(&self.slater_point, T::zero()) {
            return Err(ProblemError::Invalid("Slater point lies outside the box".into()));
        }
        let sums = self.total_constraints(&self.slater_point);
        let eq_tol = T::from_f64_c(1e-8);
        for (j, &v) in sums.iter().enumerate() {
            if j < p && v >= T::zero() {
                return Err(ProblemError::SlaterViolation {
                    gamma: (-v).to_f64().unwrap_or(f64::NAN),
                });
            }
            if j >= p && v.abs() > eq_tol {
                return Err(ProblemError::Invalid(format!(
                    "summed equality row {} is {} at the Slater point, expected 0",
                    j - p,
                    v
                )));
            }
        }
        if !(self.dual_radius.is_finite() && self.dual_radius >= T::zero()) {
            return Err(ProblemError::Invalid("dual radius must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn eval_objective(&self, agent: usize, x: &[T]) -> T {
        self.objectives[agent].eval(x)
    }

    pub fn grad_objective(&self, agent: usize, x: &[T]) -> Vec<T> {
        self.objectives[agent].grad(x)
    }

    pub fn eval_constraints(&self, agent: usize, x: &[T]) -> Vec<T> {
        self.constraints[agent].eval(x)
    }

    pub fn jac_constraints(&self, agent: usize, x: &[T]) -> Vec<Vec<T>> {
        self.constraints[agent].row_grads(x)
    }

    /// Gradient of agent `i`'s Lagrangian block in `x`:
    /// `grad f_i(x) + sum_r lambda[r] * grad h_i^r(x)`, rows ascending.
    pub fn primal_grad(&self, agent: usize, x: &[T], lambda: &[T]) -> Vec<T> {
        debug_assert_eq!(lambda.len(), self.num_ineq + self.num_eq);
        let mut g = self.grad_objective(agent, x);
        let grads = self.jac_constraints(agent, x);
        for (r, row) in grads.iter().enumerate() {
            if lambda[r] != T::zero() {
                add_scaled(&mut g, lambda[r], row);
            }
        }
        g
    }

    /// `sum_i f_i(x)`.
    pub fn total_objective(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.num_agents {
            acc += self.eval_objective(i, x);
        }
        acc
    }

    /// `sum_i h_i(x)`, rows ascending within each agent, agents ascending.
    pub fn total_constraints(&self, x: &[T]) -> Vec<T> {
        let mut acc = vec![T::zero(); self.num_ineq + self.num_eq];
        for i in 0..self.num_agents {
            let hv = self.eval_constraints(i, x);
            for (a, v) in acc.iter_mut().zip(hv) {
                *a += v;
            }
        }
        acc
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError>
    where
        T: serde::de::DeserializeOwned,
    {
        let inst: Self =
            serde_json::from_str(text).map_err(|e| ProblemError::Invalid(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Upper bound on the norm of the inequality multiplier block over the dual
/// superlevel set at `lambda_ref`:
///
/// ```text
///   radius = (f(x_ref) - q(lambda_ref)) / gamma(x_ref),
///   gamma(x_ref) = min_j { -sum_i h_i^j(x_ref) }  over inequality rows j,
/// ```
///
/// where `x_ref` is the instance's Slater point and `q(lambda) = min_{x in X}
/// L(x, lambda)` is evaluated by the supplied minimization oracle (the
/// centralized solver provides one). Fails with `SlaterViolation` when the
/// margin `gamma(x_ref)` is not strictly positive.
pub fn compute_dual_radius<T, F, E>(
    inst: &ProblemInstance<T>,
    lambda_ref: &[T],
    mut min_oracle: F,
) -> Result<T, ProblemError>
where
    T: Scalar,
    F: FnMut(&ProblemInstance<T>, &[T]) -> Result<(Vec<T>, T), E>,
    E: std::fmt::Display,
{
    if lambda_ref.len() != inst.num_ineq + inst.num_eq {
        return Err(ProblemError::Dimension("lambda_ref has wrong length".into()));
    }
    if lambda_ref[..inst.num_ineq].iter().any(|&v| v < T::zero()) {
        return Err(ProblemError::Invalid(
            "lambda_ref inequality block must be non-negative".into(),
        ));
    }
    let x_ref = &inst.slater_point;
    let sums = inst.total_constraints(x_ref);
    let mut gamma = T::infinity();
    for &v in &sums[..inst.num_ineq] {
        gamma = gamma.min(-v);
    }
    if !(gamma > T::zero()) {
        return Err(ProblemError::SlaterViolation { gamma: gamma.to_f64().unwrap_or(f64::NAN) });
    }
    let (_, q_ref) = min_oracle(inst, lambda_ref)
        .map_err(|e| ProblemError::MinOracle(e.to_string()))?;
    let f_ref = inst.total_objective(x_ref);
    Ok(((f_ref - q_ref) / gamma).max(T::zero()))
}

const CANONICAL_AGENTS: usize = 6;
const CANONICAL_DIM: usize = 2;
const CANONICAL_BOX: f64 = 3.0;
/// Radius of the strictly feasible ball certified at the origin: the summed
/// quadratic row at the origin is shifted to `-(sum of quad weights) * rho^2`.
const SLATER_BALL_RADIUS: f64 = 1.5;
const GAMMA_SUM_MIN_NORM: f64 = 0.5;
const GENERATION_ATTEMPTS: usize = 64;

/// Seeded generator for the canonical 6-agent, 2-dimensional instance
/// family: linear-plus-logistic objectives, one coupled quadratic inequality
/// row, one coupled affine equality row, box `[-3, 3]^2`.
///
/// Draw ranges: `lin, logistic_dir, affine row` entries uniform in
/// `[-1, 1]`, `offset` in `[-1, 1]`, `logistic_weight` in `[0.5, 2]`,
/// `quad_weight` in `[0.1, 1]`. Quadratic offsets are shifted so the summed
/// inequality row at the origin equals `-(sum quad_weight) * rho^2` with
/// `rho = 1.5`, and equality offsets are shifted to sum to zero, making the
/// origin a strict Slater point. Affine rows are redrawn until their sum has
/// norm at least 0.5 so the equality constraint has full rank.
///
/// The dual radius is computed from the Slater point via
/// [`compute_dual_radius`] with the zero multiplier and the centralized
/// minimization oracle at tolerance `1e-8`. Instances are bitwise
/// deterministic in the seed.
pub fn canonical_instance<T: Scalar>(seed: u64) -> Result<ProblemInstance<T>, ProblemError> {
    let m = CANONICAL_AGENTS;
    let n = CANONICAL_DIM;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: f64, hi: f64| rng.gen_range(lo..hi);

    let mut lin = Vec::with_capacity(m);
    let mut offsets = Vec::with_capacity(m);
    let mut log_w = Vec::with_capacity(m);
    let mut log_dir = Vec::with_capacity(m);
    let mut quad_w = Vec::with_capacity(m);
    let mut quad_o = Vec::with_capacity(m);
    let mut aff_o = Vec::with_capacity(m);
    for _ in 0..m {
        lin.push((0..n).map(|_| draw(-1.0, 1.0)).collect::<Vec<_>>());
        offsets.push(draw(-1.0, 1.0));
        log_w.push(draw(0.5, 2.0));
        log_dir.push((0..n).map(|_| draw(-1.0, 1.0)).collect::<Vec<_>>());
        quad_w.push(draw(0.1, 1.0));
        quad_o.push(draw(-1.0, 1.0));
        aff_o.push(draw(-1.0, 1.0));
    }

    let mut aff_rows: Vec<Vec<f64>> = Vec::new();
    let mut accepted = false;
    for _ in 0..GENERATION_ATTEMPTS {
        aff_rows = (0..m).map(|_| (0..n).map(|_| draw(-1.0, 1.0)).collect()).collect();
        let mut total = vec![0.0f64; n];
        for row in &aff_rows {
            for j in 0..n {
                total[j] += row[j];
            }
        }
        if norm(&total) >= GAMMA_SUM_MIN_NORM {
            accepted = true;
            break;
        }
    }
    if !accepted {
        return Err(ProblemError::GenerationFailure {
            attempts: GENERATION_ATTEMPTS,
            reason: "summed equality row norm stayed below the rank floor".into(),
        });
    }

    // Shift offsets so the origin certifies Slater: summed quadratic row
    // becomes -(sum quad_w) * rho^2 < 0 and summed equality offsets vanish.
    let quad_sum: f64 = quad_w.iter().sum();
    let quad_shift =
        (quad_o.iter().sum::<f64>() + quad_sum * SLATER_BALL_RADIUS * SLATER_BALL_RADIUS) / m as f64;
    for v in &mut quad_o {
        *v -= quad_shift;
    }
    let aff_shift = aff_o.iter().sum::<f64>() / m as f64;
    for v in &mut aff_o {
        *v -= aff_shift;
    }

    let conv = |v: &[f64]| v.iter().map(|&x| T::from_f64_c(x)).collect::<Vec<T>>();
    let objectives = (0..m)
        .map(|i| LocalObjective {
            lin: conv(&lin[i]),
            offset: T::from_f64_c(offsets[i]),
            logistic_weight: T::from_f64_c(log_w[i]),
            logistic_dir: conv(&log_dir[i]),
        })
        .collect();
    let constraints = (0..m)
        .map(|i| LocalConstraint {
            quad_weight: T::from_f64_c(quad_w[i]),
            quad_offset: T::from_f64_c(quad_o[i]),
            extra_ineq: Vec::new(),
            affine_rows: vec![conv(&aff_rows[i])],
            affine_offsets: vec![T::from_f64_c(aff_o[i])],
        })
        .collect();
    let b = T::from_f64_c(CANONICAL_BOX);
    let mut inst = ProblemInstance {
        num_agents: m,
        dim: n,
        num_ineq: 1,
        num_eq: 1,
        objectives,
        constraints,
        feasible_set: BoxSet { lower: vec![-b; n], upper: vec![b; n] },
        slater_point: vec![T::zero(); n],
        dual_radius: T::zero(),
        seed: Some(seed),
    };

    let zero_mult = vec![T::zero(); 2];
    let radius = compute_dual_radius(&inst, &zero_mult, |pi, lam| {
        crate::oracle::min_over_x(pi, lam, T::from_f64_c(1e-8))
    })?;
    inst.dual_radius = radius;
    inst.validate()?;
    Ok(inst)
}
