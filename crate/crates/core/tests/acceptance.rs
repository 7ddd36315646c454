//! End-to-end acceptance suite. Each test prints one `criterion N: PASS/FAIL`
//! line with the measured quantities, then asserts.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use ppdual::engine;
use ppdual::linalg::{dist, norm};
use ppdual::oracle;
use ppdual::problem::{BoxSet, LocalConstraint, LocalObjective};
use ppdual::{
    canonical_instance, canonical_schedule, check_connectivity, estimate_abs_prob, fit_rate,
    project_box, project_dual, propagate_balance, solve_centralized, uniform_weights,
    validate_weights, verify_saddle, BalanceVector, Certificate, DiGraph, DualSet, GraphSchedule,
    Instance, ProblemInstance, RunTrace, Steps, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIG_ROUNDS: usize = 20_000;
const ORACLE_TOL: f64 = 1e-6;

struct Fixture {
    inst: Instance,
    ss: Steps,
    cert: Certificate,
    trace: RunTrace,
}

static FIXTURE: OnceLock<Fixture> = OnceLock::new();

fn fixture() -> &'static Fixture {
    FIXTURE.get_or_init(|| {
        let inst = canonical_instance(42).expect("seed 42 generates");
        let ws = uniform_weights(&canonical_schedule()).expect("canonical weights");
        let ss = Steps::canonical();
        let cert = solve_centralized(&inst, ORACLE_TOL).expect("oracle converges");
        let (x0, l0) = engine::zero_start(&inst);
        let trace = engine::run(&inst, &ws, &ss, &x0, &l0, BIG_ROUNDS, 1, Some(&cert))
            .expect("canonical run completes");
        Fixture { inst, ss, cert, trace }
    })
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn median_nondecreasing(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn criterion_1_tracking_identity() {
    let start = Instant::now();
    let fx = fixture();
    let m = fx.inst.num_agents as f64;
    let dual_dim = fx.inst.num_ineq + fx.inst.num_eq;
    let mut max_z = 0.0f64;
    let mut max_y = 0.0f64;
    for state in fx.trace.states.iter().take_while(|s| s.round <= 10_000) {
        let mut z_gap = vec![0.0; fx.inst.dim];
        let mut y_gap = vec![0.0; dual_dim];
        for (i, a) in state.agents.iter().enumerate() {
            let h = fx.inst.eval_constraints(i, &a.x);
            for j in 0..fx.inst.dim {
                z_gap[j] += a.z[j] - a.d[j];
            }
            for r in 0..dual_dim {
                y_gap[r] += a.y[r] - h[r];
            }
        }
        max_z = max_z.max(norm(&z_gap));
        max_y = max_y.max(norm(&y_gap));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_z <= 1e-9 * m && max_y <= 1e-9 * m && elapsed < 60.0;
    report(
        "1 tracking-identity",
        pass,
        &format!("max|sum z - sum d|={max_z:.3e}, max|sum y - sum h|={max_y:.3e}, bound={:.1e}, elapsed={elapsed:.1}s", 1e-9 * m),
    );
}

#[test]
fn criterion_2_convergence_to_the_oracle_saddle() {
    let start = Instant::now();
    let fx = fixture();
    let row_at = |round: usize| {
        fx.trace.rows.iter().find(|r| r.round == round).expect("stride-1 trace")
    };
    let max_of = |v: &Option<Vec<f64>>| {
        v.as_ref().unwrap().iter().cloned().fold(0.0f64, f64::max)
    };
    let early = row_at(100);
    let last = row_at(BIG_ROUNDS);
    let x_final = max_of(&last.dist_x);
    let l_final = max_of(&last.dist_lambda);
    let x_ratio = max_of(&early.dist_x) / x_final;
    let l_ratio = max_of(&early.dist_lambda) / l_final;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = x_final <= 5e-2
        && l_final <= 1e-1
        && x_ratio >= 10.0
        && l_ratio >= 10.0
        && elapsed < 120.0;
    report(
        "2 saddle-convergence",
        pass,
        &format!("max|x_i - x*|={x_final:.3e} (<=5e-2), max|l_i - l*|={l_final:.3e} (<=1e-1), decay x={x_ratio:.1}x, lambda={l_ratio:.1}x (>=10x), elapsed={elapsed:.1}s"),
    );
}

#[test]
fn criterion_3_constraint_feasibility_at_the_final_average() {
    let fx = fixture();
    let last = fx.trace.rows.last().unwrap();
    let ineq = last.violation_ineq[0];
    let eq = last.violation_eq[0];
    let pass = ineq <= 1e-2 && eq <= 1e-2;
    report(
        "3 feasibility",
        pass,
        &format!("max(sum h1, 0)={ineq:.3e}, |sum h2|={eq:.3e}, bound=1e-2"),
    );
}

#[test]
fn criterion_4_time_average_rate() {
    let fx = fixture();
    let fit = fit_rate(&fx.trace, &fx.inst, &fx.ss, BIG_ROUNDS / 2, &fx.cert)
        .expect("rate fit over the second half");
    let last = *fit.running_max.last().unwrap();
    let med = median_nondecreasing(&fit.running_max);
    // a non-positive empirical constant means the averaged gap never went
    // above zero, which satisfies the upper bound trivially
    let stabilized = last.is_finite() && (last <= 0.0 || last <= 2.0 * med);
    let (slope_pass, slope_text) = match fit.slope {
        Some(s) => (s <= -0.25, format!("{s:.3}")),
        None => (true, "n/a (no positive-gap grid points)".into()),
    };
    let pass = stabilized && slope_pass;
    report(
        "4 rate-fit",
        pass,
        &format!("empirical M1={last:.3e}, median running max={med:.3e}, log-log slope={slope_text} (<= -0.25)"),
    );
}

#[test]
fn criterion_5_oracle_matches_refined_grid_search() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for seed in 1..=5u64 {
        let inst: Instance = canonical_instance(seed).expect("instance generates");
        let cert = solve_centralized(&inst, ORACLE_TOL).expect("oracle converges");
        let (x_grid, _) = common::grid_min_constrained(&inst, 1e-3, 1e-5);
        let gap = dist(&cert.x_star, &x_grid);
        let saddle = verify_saddle(&inst, &cert.x_star, &cert.lambda_star, 1_000, 1e-4)
            .expect("probe check runs");
        let ok = gap <= 2e-3 && saddle.pass;
        pass &= ok;
        detail.push_str(&format!(
            "seed {seed}: |x*-grid|={gap:.2e}, probe viol=({:.1e},{:.1e}); ",
            saddle.max_primal_violation, saddle.max_dual_violation
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 300.0;
    detail.push_str(&format!("elapsed={elapsed:.1}s"));
    report("5 oracle-vs-grid", pass, &detail);
}

#[test]
fn criterion_6_single_agent_reduces_to_the_centralized_method() {
    // m = 1 with a self-loop-only graph: mixing is the identity and the
    // push-pull recursion must replay the centralized projected primal-dual
    // method bit for bit.
    let inst = ProblemInstance {
        num_agents: 1,
        dim: 2,
        num_ineq: 1,
        num_eq: 1,
        objectives: vec![LocalObjective {
            lin: vec![0.3, -0.2],
            offset: 0.1,
            logistic_weight: 0.7,
            logistic_dir: vec![0.5, 0.4],
        }],
        constraints: vec![LocalConstraint {
            quad_weight: 0.4,
            quad_offset: -1.0,
            extra_ineq: vec![],
            affine_rows: vec![vec![1.0, -1.0]],
            affine_offsets: vec![0.0],
        }],
        feasible_set: BoxSet { lower: vec![-3.0, -3.0], upper: vec![3.0, 3.0] },
        slater_point: vec![0.0, 0.0],
        dual_radius: 2.0,
        seed: None,
    };
    inst.validate().unwrap();
    let g = DiGraph::with_self_loops(1, &[]).unwrap();
    let ws: Weights = uniform_weights(&GraphSchedule::new(vec![g], 1).unwrap()).unwrap();
    let ss = Steps::canonical();

    let x0 = vec![vec![0.25, -0.5]];
    let l0 = vec![vec![0.1, -0.2]];
    let mut state = engine::init_state(&inst, &x0, &l0).unwrap();
    let mut xc = state.agents[0].x.clone();
    let mut lc = state.agents[0].lambda.clone();
    let mut identical = true;
    for k in 0..100 {
        state = engine::step(&state, &inst, &ws, &ss).unwrap();
        let (nx, nl) = oracle::centralized_step(&inst, &xc, &lc, ss.step_size(k));
        xc = nx;
        lc = nl;
        if state.agents[0].x != xc || state.agents[0].lambda != lc {
            identical = false;
            break;
        }
    }
    let detail = if identical {
        "bitwise identical over 100 rounds".to_string()
    } else {
        format!("first deviation at round {}", state.round)
    };
    report("6 centralized-reduction", identical, &detail);
}

#[test]
fn criterion_7_structural_invariants() {
    let mut fails: Vec<String> = Vec::new();

    // weight stochasticity at 1e-12 on every phase
    let sched = canonical_schedule();
    let ws: Weights = uniform_weights(&sched).unwrap();
    let rep = validate_weights(&ws, &sched);
    if !rep.ok {
        fails.push("weight validation failed".into());
    }
    for c in &rep.checks {
        if c.max_row_dev > 1e-12 || c.max_col_dev > 1e-12 {
            fails.push(format!(
                "phase {}: stochasticity deviation ({:.1e}, {:.1e})",
                c.phase, c.max_row_dev, c.max_col_dev
            ));
        }
    }

    // projection idempotence and nonexpansiveness on 1000 random cases
    let feasible_box = BoxSet { lower: vec![-1.5, -1.5, -1.5], upper: vec![2.0, 2.0, 2.0] };
    let dual_set = DualSet::new(2, 1, 1.75);
    let mut rng = ChaCha8Rng::seed_from_u64(1729);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-6.0..6.0)).collect();
        let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-6.0..6.0)).collect();
        let pv = project_box(&feasible_box, &v);
        let pw = project_box(&feasible_box, &w);
        if project_box(&feasible_box, &pv) != pv {
            fails.push("box projection not idempotent".into());
            break;
        }
        if dist(&pv, &pw) > dist(&v, &w) + 1e-12 {
            fails.push("box projection expansive".into());
            break;
        }
        let dv = project_dual(&dual_set, &v);
        let dw = project_dual(&dual_set, &w);
        if dist(&project_dual(&dual_set, &dv), &dv) > 1e-14 {
            fails.push("dual projection not idempotent".into());
            break;
        }
        if dist(&dv, &dw) > dist(&v, &w) + 1e-12 {
            fails.push("dual projection expansive".into());
            break;
        }
    }

    // balance conservation over 1000 propagations
    let mut bv = BalanceVector::<f64>::ones(6);
    for k in 0..1000 {
        bv = propagate_balance(&bv, ws.col_at(k)).unwrap();
    }
    let sum_dev = (bv.sum() - 12.0).abs();
    if sum_dev > 1e-10 {
        fails.push(format!("balance sum drifted by {sum_dev:.1e}"));
    }

    // absolute-probability estimate is a stochastic vector
    let est = estimate_abs_prob(&ws, 0, 200).unwrap();
    let total: f64 = est.weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 || est.weights.iter().any(|&w| w < 0.0) {
        fails.push("abs-prob estimate is not a stochastic vector".into());
    }

    // connectivity checker on hand-built positive and negative schedules
    if !check_connectivity(&sched, 4) {
        fails.push("canonical schedule not connected over window 4".into());
    }
    if check_connectivity(&sched, 1) {
        fails.push("connectivity falsely claimed over window 1".into());
    }
    let isolated = GraphSchedule::new(
        vec![DiGraph::with_self_loops(3, &[(0, 1), (1, 0)]).unwrap()],
        1,
    )
    .unwrap();
    if check_connectivity(&isolated, 5) {
        fails.push("isolated node schedule declared connected".into());
    }

    let pass = fails.is_empty();
    report(
        "7 structural-invariants",
        pass,
        &if pass {
            format!(
                "stochasticity<=1e-12, 1000 projection cases, balance drift={sum_dev:.1e}, abs-prob sum dev={:.1e}, connectivity ok",
                (total - 1.0).abs()
            )
        } else {
            fails.join("; ")
        },
    );
}

#[test]
fn criterion_8_long_mixing_products_reach_consensus() {
    let ws: Weights = uniform_weights(&canonical_schedule()).unwrap();
    // 200-step product, and the 201-step variant for the closed-interval
    // reading of the horizon
    let spread_200 = estimate_abs_prob(&ws, 0, 200).map(|e| e.spread);
    let spread_201 = estimate_abs_prob(&ws, 0, 201).map(|e| e.spread);
    let pass = matches!(spread_200, Ok(s) if s < 1e-8) && matches!(spread_201, Ok(s) if s < 1e-8);
    report(
        "8 mixing-consensus",
        pass,
        &format!("row spread at 200 steps: {spread_200:?}, at 201 steps: {spread_201:?}, bound=1e-8"),
    );
}
