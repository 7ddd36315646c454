//! Euclidean projections onto the primal box and the bounded dual set.

use crate::linalg::norm;
use crate::problem::BoxSet;
use crate::scalar::Scalar;

/// Dual feasible set `Q = { v : v[..num_ineq] >= 0, |v[..num_ineq]| <= radius } x R^num_eq`.
///
/// `radius` may be infinite, which disables the ball cap and leaves pure
/// orthant clipping on the inequality block.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSet<T> {
    pub num_ineq: usize,
    pub num_eq: usize,
    pub radius: T,
}

impl<T: Scalar> DualSet<T> {
    pub fn new(num_ineq: usize, num_eq: usize, radius: T) -> Self {
        assert!(radius >= T::zero(), "dual radius must be non-negative");
        DualSet { num_ineq, num_eq, radius }
    }

    pub fn dim(&self) -> usize {
        self.num_ineq + self.num_eq
    }

    pub fn contains(&self, v: &[T], tol: T) -> bool {
        if v.len() != self.dim() {
            return false;
        }
        let ineq = &v[..self.num_ineq];
        ineq.iter().all(|&c| c >= -tol) && norm(ineq) <= self.radius + tol
    }
}

/// Exact projection onto the box: componentwise clamp.
pub fn project_box<T: Scalar>(set: &BoxSet<T>, v: &[T]) -> Vec<T> {
    debug_assert_eq!(v.len(), set.dim());
    (0..v.len()).map(|j| v[j].max(set.lower[j]).min(set.upper[j])).collect()
}

/// Exact projection onto the dual set: clip the inequality block to the
/// non-negative orthant, then scale it radially onto the ball when its norm
/// exceeds the radius. The equality block passes through unchanged.
///
/// Clip-then-scale is the exact Euclidean projection here because the ball
/// is centered at the origin and the orthant is a cone: clipping is the
/// projection onto the orthant, and radial scaling of an orthant point stays
/// in the orthant while projecting onto the ball.
pub fn project_dual<T: Scalar>(set: &DualSet<T>, v: &[T]) -> Vec<T> {
    debug_assert_eq!(v.len(), set.dim());
    let mut out = v.to_vec();
    for c in out[..set.num_ineq].iter_mut() {
        *c = c.max(T::zero());
    }
    let block_norm = norm(&out[..set.num_ineq]);
    if block_norm > set.radius {
        let scale = set.radius / block_norm;
        for c in out[..set.num_ineq].iter_mut() {
            *c *= scale;
        }
    }
    out
}
