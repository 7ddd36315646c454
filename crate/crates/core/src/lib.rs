//! Distributed primal-dual optimization with coupled constraints over
//! time-varying directed networks.
//!
//! A network of agents cooperatively minimizes a sum of local convex
//! objectives subject to summed inequality and equality constraints, each
//! agent holding only its own objective and constraint functions. Agents
//! exchange primal and dual iterates through a row-stochastic mixing matrix
//! and gradient/constraint trackers through a column-stochastic one (the
//! push-pull pattern), take projected gradient steps with diminishing step
//! sizes, and converge to a saddle point of the aggregate Lagrangian.
//!
//! The crate is organized around:
//!
//! - [`problem`]: instance data (local objectives, constraint rows, the
//!   feasible box, a Slater point, and a certified dual-ball radius) plus a
//!   seeded generator for a canonical two-dimensional family.
//! - [`network`]: time-varying digraph schedules, stochastic weight
//!   construction and validation, and joint-connectivity checking.
//! - [`projections`]: exact projections onto the box and the dual set.
//! - [`engine`]: the synchronous push-pull iteration and trace recording.
//! - [`oracle`]: an independent centralized solver producing certified
//!   saddle points for small instances.
//! - [`analysis`]: per-round diagnostics, push-sum balance weights,
//!   absolute-probability estimates, and empirical rate fits.
//!
//! All numerics are generic over [`scalar::Scalar`] (implemented for `f32`
//! and `f64`); the crate root exports double-precision aliases for the
//! common types.

pub mod analysis;
pub mod engine;
pub mod linalg;
pub mod network;
pub mod oracle;
pub mod problem;
pub mod projections;
pub mod scalar;

pub use analysis::{
    compute_row, estimate_abs_prob, fit_rate, propagate_balance, transformed_tracker,
    AbsProbEstimate, AnalysisError, BalanceVector, RateFit, TraceRow, TransformedTracker,
};
pub use engine::{
    ergodic_average, init_state, run, step, zero_start, AgentState, EngineError, StepSchedule,
    SwarmState, Trace,
};
pub use network::{
    canonical_schedule, check_connectivity, uniform_weights, validate_weights, DiGraph,
    GraphSchedule, NetworkError, ScheduleDocument, ValidationReport, WeightSchedule,
};
pub use oracle::{
    min_over_x, solve_centralized, verify_saddle, OracleError, SaddleCertificate, SaddleReport,
};
pub use problem::{
    canonical_instance, compute_dual_radius, BoxSet, ConvexRow, LocalConstraint, LocalObjective,
    ProblemError, ProblemInstance,
};
pub use projections::{project_box, project_dual, DualSet};
pub use scalar::Scalar;

/// Double-precision problem instance.
pub type Instance = ProblemInstance<f64>;
/// Single-precision problem instance.
pub type Instance32 = ProblemInstance<f32>;
/// Double-precision saddle certificate.
pub type Certificate = SaddleCertificate<f64>;
/// Single-precision saddle certificate.
pub type Certificate32 = SaddleCertificate<f32>;
/// Double-precision weight schedule.
pub type Weights = WeightSchedule<f64>;
/// Single-precision weight schedule.
pub type Weights32 = WeightSchedule<f32>;
/// Double-precision step schedule.
pub type Steps = StepSchedule<f64>;
/// Single-precision step schedule.
pub type Steps32 = StepSchedule<f32>;
/// Double-precision network state.
pub type Swarm = SwarmState<f64>;
/// Single-precision network state.
pub type Swarm32 = SwarmState<f32>;
/// Double-precision run trace.
pub type RunTrace = Trace<f64>;
/// Single-precision run trace.
pub type RunTrace32 = Trace<f32>;
