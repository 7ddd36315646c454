//! Time-varying communication topology: directed graphs, periodic graph
//! schedules, and the paired row-/column-stochastic weight schedules built
//! from them.
//!
//! Edge convention: `(j, i)` means node `j` transmits to node `i`, so the
//! row-stochastic matrix entry `A[i][j]` is positive exactly when `(j, i)`
//! is an edge. Every node is expected to keep a self-loop; the mixing
//! assumptions require positive self-confidence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("node {node} out of range for {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("node {node} has no self-loop in graph {graph}")]
    MissingSelfLoop { node: usize, graph: usize },
    #[error("schedule must contain at least one graph")]
    EmptySchedule,
    #[error("invalid schedule: {0}")]
    BadShape(String),
}

/// Directed graph on `num_nodes` nodes with a deduplicated, sorted edge
/// list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl DiGraph {
    /// Builds a graph from `(from, to)` pairs; duplicates collapse.
    pub fn new(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, NetworkError> {
        let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(j, i) in edges {
            for node in [j, i] {
                if node >= num_nodes {
                    return Err(NetworkError::NodeOutOfRange { node, count: num_nodes });
                }
            }
            sorted.push((j, i));
        }
        sorted.sort_unstable();
        sorted.dedup();
        Ok(DiGraph { num_nodes, edges: sorted })
    }

    /// Same as [`new`](Self::new) but with `(i, i)` added for every node.
    pub fn with_self_loops(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, NetworkError> {
        let mut all = edges.to_vec();
        all.extend((0..num_nodes).map(|i| (i, i)));
        Self::new(num_nodes, &all)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    /// Transmitters that reach `node`, ascending (includes `node` itself
    /// when the self-loop is present).
    pub fn in_neighbors(&self, node: usize) -> Vec<usize> {
        (0..self.num_nodes).filter(|&j| self.has_edge(j, node)).collect()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|&&(j, _)| j == node).count()
    }

    pub fn has_self_loop(&self, node: usize) -> bool {
        self.has_edge(node, node)
    }

    /// Union of edge sets; node counts must agree.
    pub fn union(&self, other: &DiGraph) -> Result<DiGraph, NetworkError> {
        if self.num_nodes != other.num_nodes {
            return Err(NetworkError::BadShape("union of graphs with different node counts".into()));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        DiGraph::new(self.num_nodes, &edges)
    }

    /// Every node reaches every other node along directed paths.
    pub fn is_strongly_connected(&self) -> bool {
        if self.num_nodes == 0 {
            return false;
        }
        let mut out_adj = vec![Vec::new(); self.num_nodes];
        for &(j, i) in &self.edges {
            out_adj[j].push(i);
        }
        for start in 0..self.num_nodes {
            let mut seen = vec![false; self.num_nodes];
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for &v in &out_adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            if count != self.num_nodes {
                return false;
            }
        }
        true
    }
}

/// Periodic sequence of communication graphs; round `k` uses graph
/// `k mod period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSchedule {
    pub num_nodes: usize,
    pub period: usize,
    /// Window length over which consecutive unions are claimed strongly
    /// connected.
    pub connectivity_window: usize,
    pub graphs: Vec<DiGraph>,
}

impl GraphSchedule {
    pub fn new(
        graphs: Vec<DiGraph>,
        connectivity_window: usize,
    ) -> Result<Self, NetworkError> {
        if graphs.is_empty() {
            return Err(NetworkError::EmptySchedule);
        }
        let num_nodes = graphs[0].num_nodes();
        if graphs.iter().any(|g| g.num_nodes() != num_nodes) {
            return Err(NetworkError::BadShape("graphs have differing node counts".into()));
        }
        if connectivity_window == 0 {
            return Err(NetworkError::BadShape("connectivity window must be positive".into()));
        }
        Ok(GraphSchedule { num_nodes, period: graphs.len(), connectivity_window, graphs })
    }

    pub fn graph_at(&self, round: usize) -> &DiGraph {
        &self.graphs[round % self.period]
    }
}

/// True when the union of every `window` consecutive graphs is strongly
/// connected. Periodicity means only `period` distinct window offsets
/// exist, so the check is exhaustive, not sampled.
pub fn check_connectivity(sched: &GraphSchedule, window: usize) -> bool {
    if window == 0 {
        return false;
    }
    (0..sched.period).all(|offset| {
        let mut union = sched.graph_at(offset).clone();
        for t in 1..window {
            union = union.union(sched.graph_at(offset + t)).expect("same node count");
        }
        union.is_strongly_connected()
    })
}

/// The built-in 6-node, period-4 schedule: a directed 6-cycle spread over
/// the first three graphs, one chord graph, self-loops everywhere. No
/// single graph is strongly connected; every 4-window union is.
pub fn canonical_schedule() -> GraphSchedule {
    let m = 6;
    let phases: [&[(usize, usize)]; 4] = [
        &[(0, 1), (3, 4)],
        &[(1, 2), (4, 5)],
        &[(2, 3), (5, 0)],
        &[(0, 3), (2, 5), (4, 1)],
    ];
    let graphs = phases
        .iter()
        .map(|edges| DiGraph::with_self_loops(m, edges).expect("canonical edges in range"))
        .collect();
    GraphSchedule::new(graphs, 4).expect("canonical schedule is well-formed")
}

/// Row-stochastic (`row_at`) and column-stochastic (`col_at`) weight
/// matrices for every phase of a graph schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSchedule<T> {
    schedule: GraphSchedule,
    row: Vec<Mat<T>>,
    col: Vec<Mat<T>>,
    /// Smallest positive entry over all matrices; the uniform positivity
    /// constant of the mixing assumptions.
    pub positivity_floor: T,
}

impl<T: Scalar> WeightSchedule<T> {
    /// Builds from explicit matrices (for externally supplied weights);
    /// shapes must match the schedule, spectral properties are checked
    /// separately by [`validate_weights`].
    pub fn from_matrices(
        schedule: GraphSchedule,
        row: Vec<Mat<T>>,
        col: Vec<Mat<T>>,
    ) -> Result<Self, NetworkError> {
        if row.len() != schedule.period || col.len() != schedule.period {
            return Err(NetworkError::BadShape(format!(
                "expected {} weight matrices per family, got {} and {}",
                schedule.period,
                row.len(),
                col.len()
            )));
        }
        if row.iter().chain(&col).any(|m| m.size() != schedule.num_nodes) {
            return Err(NetworkError::BadShape("weight matrix size differs from node count".into()));
        }
        let mut floor = T::infinity();
        for mat in row.iter().chain(&col) {
            for i in 0..mat.size() {
                for j in 0..mat.size() {
                    let v = mat.get(i, j);
                    if v > T::zero() {
                        floor = floor.min(v);
                    }
                }
            }
        }
        if !floor.is_finite() {
            return Err(NetworkError::BadShape("weight matrices have no positive entries".into()));
        }
        Ok(WeightSchedule { schedule, row, col, positivity_floor: floor })
    }

    pub fn schedule(&self) -> &GraphSchedule {
        &self.schedule
    }

    pub fn period(&self) -> usize {
        self.schedule.period
    }

    pub fn num_nodes(&self) -> usize {
        self.schedule.num_nodes
    }

    pub fn row_at(&self, round: usize) -> &Mat<T> {
        &self.row[round % self.schedule.period]
    }

    pub fn col_at(&self, round: usize) -> &Mat<T> {
        &self.col[round % self.schedule.period]
    }
}

/// Uniform mixing weights: receiving node `i` averages over its in-edges,
/// `A[i][j] = 1 / indegree(i)`; transmitting node `j` splits evenly over its
/// out-edges, `B[i][j] = 1 / outdegree(j)`. Requires self-loops so every
/// degree is positive and the diagonal carries weight.
pub fn uniform_weights<T: Scalar>(sched: &GraphSchedule) -> Result<WeightSchedule<T>, NetworkError> {
    let m = sched.num_nodes;
    let mut row = Vec::with_capacity(sched.period);
    let mut col = Vec::with_capacity(sched.period);
    for (g_idx, graph) in sched.graphs.iter().enumerate() {
        for node in 0..m {
            if !graph.has_self_loop(node) {
                return Err(NetworkError::MissingSelfLoop { node, graph: g_idx });
            }
        }
        let mut a = Mat::zeros(m);
        for i in 0..m {
            let inn = graph.in_neighbors(i);
            let w = T::one() / T::from_usize_c(inn.len());
            for j in inn {
                a.set(i, j, w);
            }
        }
        let mut b = Mat::zeros(m);
        for j in 0..m {
            let w = T::one() / T::from_usize_c(graph.out_degree(j));
            for i in 0..m {
                if graph.has_edge(j, i) {
                    b.set(i, j, w);
                }
            }
        }
        row.push(a);
        col.push(b);
    }
    WeightSchedule::from_matrices(sched.clone(), row, col)
}

/// Per-phase weight diagnostics produced by [`validate_weights`].
#[derive(Clone, Debug)]
pub struct WeightCheck<T> {
    pub phase: usize,
    /// `max_i |sum_j A[i][j] - 1|`.
    pub max_row_dev: T,
    /// `max_j |sum_i B[i][j] - 1|`.
    pub max_col_dev: T,
    /// Smallest positive entry across both matrices of the phase.
    pub min_positive: T,
    /// Entries positive without an edge, or zero despite an edge.
    pub pattern_mismatches: usize,
    pub self_loops_ok: bool,
}

#[derive(Clone, Debug)]
pub struct ValidationReport<T> {
    pub ok: bool,
    pub checks: Vec<WeightCheck<T>>,
}

pub const STOCHASTICITY_TOL: f64 = 1e-12;

/// Checks each phase of a weight schedule against its graph: row sums of
/// `A` and column sums of `B` within `1e-12` of one, sparsity pattern
/// matching the edge set, positive entries at or above the recorded floor,
/// and positive diagonals.
pub fn validate_weights<T: Scalar>(
    ws: &WeightSchedule<T>,
    sched: &GraphSchedule,
) -> ValidationReport<T> {
    let tol = T::from_f64_c(STOCHASTICITY_TOL);
    let m = sched.num_nodes;
    let mut checks = Vec::with_capacity(sched.period);
    let mut ok = ws.period() == sched.period && ws.num_nodes() == m;
    for k in 0..sched.period.min(ws.period()) {
        let graph = sched.graph_at(k);
        let a = ws.row_at(k);
        let b = ws.col_at(k);
        let mut row_dev = T::zero();
        for s in a.row_sums() {
            row_dev = row_dev.max((s - T::one()).abs());
        }
        let mut col_dev = T::zero();
        for s in b.col_sums() {
            col_dev = col_dev.max((s - T::one()).abs());
        }
        let mut min_pos = T::infinity();
        let mut mismatches = 0usize;
        let mut self_loops_ok = true;
        for i in 0..m {
            for j in 0..m {
                let edge = graph.has_edge(j, i);
                for mat in [a, b] {
                    let v = mat.get(i, j);
                    if v > T::zero() {
                        min_pos = min_pos.min(v);
                    }
                    if (v > T::zero()) != edge {
                        mismatches += 1;
                    }
                }
            }
            if !(a.get(i, i) > T::zero() && b.get(i, i) > T::zero()) {
                self_loops_ok = false;
            }
        }
        let pass = row_dev <= tol
            && col_dev <= tol
            && mismatches == 0
            && self_loops_ok
            && min_pos >= ws.positivity_floor;
        ok &= pass;
        checks.push(WeightCheck {
            phase: k,
            max_row_dev: row_dev,
            max_col_dev: col_dev,
            min_positive: min_pos,
            pattern_mismatches: mismatches,
            self_loops_ok,
        });
    }
    ValidationReport { ok, checks }
}

impl<T: Scalar> std::fmt::Display for ValidationReport<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "phase {}: row dev {:.3e}, col dev {:.3e}, min positive {:.3e}, pattern mismatches {}, self loops {}",
                c.phase, c.max_row_dev, c.max_col_dev, c.min_positive, c.pattern_mismatches,
                if c.self_loops_ok { "ok" } else { "MISSING" }
            )?;
        }
        writeln!(f, "overall: {}", if self.ok { "ok" } else { "FAILED" })
    }
}

/// On-disk schedule description: node count, period, per-phase edge lists,
/// and optionally explicit weight matrices (uniform weights are derived when
/// absent).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct ScheduleDocument<T> {
    pub num_nodes: usize,
    pub connectivity_window: usize,
    pub graphs: Vec<EdgeList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsDocument<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize)>,
}

/// Explicit weight matrices, one row-stochastic and one column-stochastic
/// family, each `period x num_nodes x num_nodes` as nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDocument<T> {
    pub row: Vec<Vec<Vec<T>>>,
    pub col: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> ScheduleDocument<T> {
    pub fn from_parts(sched: &GraphSchedule, weights: Option<&WeightSchedule<T>>) -> Self {
        let graphs = sched
            .graphs
            .iter()
            .map(|g| EdgeList { edges: g.edges().to_vec() })
            .collect();
        let weights = weights.map(|ws| WeightsDocument {
            row: (0..ws.period()).map(|k| mat_to_rows(ws.row_at(k))).collect(),
            col: (0..ws.period()).map(|k| mat_to_rows(ws.col_at(k))).collect(),
        });
        ScheduleDocument {
            num_nodes: sched.num_nodes,
            connectivity_window: sched.connectivity_window,
            graphs,
            weights,
        }
    }

    /// Rebuilds the schedule and, when explicit weights are present, the
    /// weight schedule.
    pub fn into_parts(self) -> Result<(GraphSchedule, Option<WeightSchedule<T>>), NetworkError> {
        let graphs = self
            .graphs
            .iter()
            .map(|el| DiGraph::new(self.num_nodes, &el.edges))
            .collect::<Result<Vec<_>, _>>()?;
        let sched = GraphSchedule::new(graphs, self.connectivity_window)?;
        let ws = match self.weights {
            None => None,
            Some(w) => {
                let row = w.row.iter().map(|m| rows_to_mat(m)).collect::<Result<Vec<_>, _>>()?;
                let col = w.col.iter().map(|m| rows_to_mat(m)).collect::<Result<Vec<_>, _>>()?;
                Some(WeightSchedule::from_matrices(sched.clone(), row, col)?)
            }
        };
        Ok((sched, ws))
    }
}

fn mat_to_rows<T: Scalar>(m: &Mat<T>) -> Vec<Vec<T>> {
    (0..m.size()).map(|i| m.row(i).to_vec()).collect()
}

fn rows_to_mat<T: Scalar>(rows: &[Vec<T>]) -> Result<Mat<T>, NetworkError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(NetworkError::BadShape("weight matrix is not square".into()));
    }
    Ok(Mat::from_rows(rows))
}
