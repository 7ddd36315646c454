//! Helpers shared by the integration suites: brute-force grid searches used
//! as ground truth against the iterative solvers.
#![allow(dead_code)]

use ppdual::Instance;

/// Exhaustive minimization over the 2-D box by staged grids: a full sweep at
/// `h0`, then repeated local refinement around the best point at each step
/// in `refinements` (window of four previous pitches). Convexity of the
/// target makes the local refinement sound.
pub fn grid_min_box(f: &dyn Fn(&[f64]) -> f64, lo: f64, hi: f64, h0: f64, refinements: &[f64]) -> (Vec<f64>, f64) {
    let mut best = (vec![lo, lo], f64::INFINITY);
    let sweep = |x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, h: f64, best: &mut (Vec<f64>, f64)| {
        let nx = ((x_hi - x_lo) / h).round() as usize;
        let ny = ((y_hi - y_lo) / h).round() as usize;
        for i in 0..=nx {
            let x = (x_lo + i as f64 * h).min(x_hi);
            for j in 0..=ny {
                let y = (y_lo + j as f64 * h).min(y_hi);
                let v = f(&[x, y]);
                if v < best.1 {
                    *best = (vec![x, y], v);
                }
            }
        }
    };
    sweep(lo, hi, lo, hi, h0, &mut best);
    let mut prev = h0;
    for &h in refinements {
        let w = 4.0 * prev;
        let (cx, cy) = (best.0[0], best.0[1]);
        sweep(
            (cx - w).max(lo),
            (cx + w).min(hi),
            (cy - w).max(lo),
            (cy + w).min(hi),
            h,
            &mut best,
        );
        prev = h;
    }
    best
}

/// Constrained ground truth for canonical 2-D instances (one summed
/// inequality row, one summed equality row): the aggregate equality defines
/// a line through the box, so the search walks that line, keeps points that
/// satisfy the box and the summed inequality, and refines around the best
/// objective value. Returns the minimizer and the total objective.
pub fn grid_min_constrained(inst: &Instance, h0: f64, h1: f64) -> (Vec<f64>, f64) {
    assert_eq!(inst.dim, 2);
    assert_eq!(inst.num_ineq, 1);
    assert_eq!(inst.num_eq, 1);
    let mut gamma = [0.0f64; 2];
    let mut delta = 0.0f64;
    for c in &inst.constraints {
        gamma[0] += c.affine_rows[0][0];
        gamma[1] += c.affine_rows[0][1];
        delta += c.affine_offsets[0];
    }
    let g_norm = (gamma[0] * gamma[0] + gamma[1] * gamma[1]).sqrt();
    assert!(g_norm > 0.0, "aggregate equality row is degenerate");
    // foot of the perpendicular from the origin onto gamma.x + delta = 0
    let base = [-delta * gamma[0] / (g_norm * g_norm), -delta * gamma[1] / (g_norm * g_norm)];
    let dir = [-gamma[1] / g_norm, gamma[0] / g_norm];

    let lo = inst.feasible_set.lower[0];
    let hi = inst.feasible_set.upper[0];
    let t_max = 2.0 * (hi - lo);
    let point = |t: f64| [base[0] + t * dir[0], base[1] + t * dir[1]];
    let feasible = |x: &[f64; 2]| {
        x.iter().zip([lo, hi]).all(|(&c, _)| (lo..=hi).contains(&c))
            && inst.total_constraints(&x[..])[0] <= 0.0
    };

    let mut best: Option<(f64, f64)> = None; // (t, value)
    let sweep = |t_lo: f64, t_hi: f64, h: f64, best: &mut Option<(f64, f64)>| {
        let steps = ((t_hi - t_lo) / h).round() as usize;
        for i in 0..=steps {
            let t = t_lo + i as f64 * h;
            let x = point(t);
            if !feasible(&x) {
                continue;
            }
            let v = inst.total_objective(&x[..]);
            if best.map_or(true, |(_, bv)| v < bv) {
                *best = Some((t, v));
            }
        }
    };
    sweep(-t_max, t_max, h0, &mut best);
    let (t0, _) = best.expect("the aggregate-equality line intersects the feasible region");
    sweep(t0 - 4.0 * h0, t0 + 4.0 * h0, h1, &mut best);
    let (t, v) = best.unwrap();
    (point(t).to_vec(), v)
}
