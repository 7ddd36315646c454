//! Batch front-end for distributed primal-dual experiments: generate
//! instance and schedule files, run a configured experiment to CSV + JSON
//! artifacts, or verify a setup against the full invariant suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ppdual::analysis::{csv_header, csv_line};
use ppdual::linalg::{dist, norm};
use ppdual::{
    canonical_instance, canonical_schedule, check_connectivity, project_box, project_dual,
    run as run_engine, solve_centralized, uniform_weights, validate_weights, verify_saddle,
    zero_start, Certificate, DualSet, EngineError, GraphSchedule, Instance, ScheduleDocument,
    Steps, Weights,
};

/// Environment variable naming the directory for cached saddle
/// certificates; defaults to `<out_dir>/oracle-cache` when unset.
const CACHE_DIR_ENV: &str = "PPDUAL_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "ppdual",
    version,
    about = "Distributed primal-dual optimization experiments on time-varying digraphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded instance and the built-in communication schedule as
    /// JSON files, printing their validation summary
    Generate {
        /// Seed for the instance generator
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory receiving instance.json and schedule.json
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the experiment described by a JSON config file
    Run {
        /// Path to the experiment config
        config: PathBuf,
        /// Replace the instance source with this generator seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of rounds
        #[arg(long)]
        rounds: Option<usize>,
        /// Override the step-size scale c in c/(k+1)^e
        #[arg(long)]
        step_c: Option<f64>,
        /// Override the step-size exponent e in c/(k+1)^e
        #[arg(long)]
        step_exponent: Option<f64>,
        /// Override the trace recording stride
        #[arg(long)]
        record_every: Option<usize>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the centralized-solver tolerance
        #[arg(long)]
        oracle_tol: Option<f64>,
    },
    /// Check a configured setup against the invariant suite and report
    /// pass/fail per check
    Verify {
        /// Path to the experiment config
        config: PathBuf,
        /// Override the centralized-solver tolerance
        #[arg(long)]
        oracle_tol: Option<f64>,
    },
}

// ---------------------------------------------------------------------------
// Config file format
// ---------------------------------------------------------------------------

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    instance: InstanceSource,
    schedule: ScheduleSource,
    #[serde(default)]
    step: StepConfig,
    rounds: usize,
    #[serde(default = "default_record_every")]
    record_every: usize,
    #[serde(default)]
    init: InitPolicy,
    #[serde(default = "default_oracle_tol")]
    oracle_tol: f64,
    out_dir: PathBuf,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum InstanceSource {
    Seed { seed: u64 },
    File { path: PathBuf },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ScheduleSource {
    Named { named: String },
    File { path: PathBuf },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepConfig {
    c: f64,
    exponent: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { c: 2.0, exponent: 0.6 }
    }
}

#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InitPolicy {
    /// Every agent starts at the projection of the origin with zero
    /// multipliers.
    #[default]
    Zeros,
    /// Primal points drawn uniformly from the box, multipliers drawn in the
    /// dual set, from the given seed.
    SeededRandom(u64),
}

fn default_record_every() -> usize {
    1
}

fn default_oracle_tol() -> f64 {
    1e-6
}

// ---------------------------------------------------------------------------
// Error handling: exit 0 on success, 1 on validation failure, 2 on runtime
// error.
// ---------------------------------------------------------------------------

enum CliError {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

type CliResult<T> = Result<T, CliError>;

fn val(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Validation(e.into())
}

fn rt(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Runtime(e.into())
}

fn engine_err(e: EngineError) -> CliError {
    match e {
        EngineError::NonFiniteState { .. } | EngineError::Analysis(_) => rt(e),
        _ => val(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Generate { seed, out } => cmd_generate(seed, &out),
        Cmd::Run { config, seed, rounds, step_c, step_exponent, record_every, out, oracle_tol } => {
            let overrides = Overrides { seed, rounds, step_c, step_exponent, record_every, out, oracle_tol };
            cmd_run(&config, overrides)
        }
        Cmd::Verify { config, oracle_tol } => {
            let overrides =
                Overrides { oracle_tol, ..Default::default() };
            cmd_verify(&config, overrides)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn cmd_generate(seed: u64, out: &Path) -> CliResult<()> {
    let inst: Instance = canonical_instance(seed).map_err(rt)?;
    let sched = canonical_schedule();
    let ws: Weights = uniform_weights(&sched).map_err(rt)?;

    fs::create_dir_all(out)
        .map_err(|e| rt(anyhow!("creating output directory {}: {e}", out.display())))?;
    let inst_path = out.join("instance.json");
    let sched_path = out.join("schedule.json");
    write_file(&inst_path, &inst.to_json())?;
    let doc = ScheduleDocument::from_parts(&sched, Some(&ws));
    let sched_text = serde_json::to_string_pretty(&doc).expect("schedule document serializes");
    write_file(&sched_path, &sched_text)?;

    println!(
        "instance: seed {seed}, {} agents, dimension {}, {} inequality + {} equality rows",
        inst.num_agents, inst.dim, inst.num_ineq, inst.num_eq
    );
    let sums = inst.total_constraints(&inst.slater_point);
    let worst_ineq =
        sums[..inst.num_ineq].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let worst_eq = sums[inst.num_ineq..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    println!(
        "slater check: max inequality row {worst_ineq:.6e} (strictly negative), max |equality row| {worst_eq:.3e}"
    );
    println!("dual ball radius: {:.6}", inst.dual_radius);
    let report = validate_weights(&ws, &sched);
    print!("{report}");
    let window = sched.connectivity_window;
    let connected = check_connectivity(&sched, window);
    println!(
        "connectivity over window {window}: {}",
        if connected { "pass" } else { "FAIL" }
    );
    println!("wrote {}", inst_path.display());
    println!("wrote {}", sched_path.display());
    if !(report.ok && connected) {
        return Err(val(anyhow!("generated setup failed validation")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// shared loading
// ---------------------------------------------------------------------------

#[derive(Default)]
struct Overrides {
    seed: Option<u64>,
    rounds: Option<usize>,
    step_c: Option<f64>,
    step_exponent: Option<f64>,
    record_every: Option<usize>,
    out: Option<PathBuf>,
    oracle_tol: Option<f64>,
}

struct Setup {
    cfg: ExperimentConfig,
    inst: Instance,
    /// Exact instance JSON text; hashed for the audit trail and the oracle
    /// cache key.
    inst_json: String,
    sched: GraphSchedule,
    ws: Weights,
    out_dir: PathBuf,
}

/// Reads the config, applies flag overrides, and loads the instance and
/// schedule it references. Relative paths resolve against the config file's
/// directory.
fn load_setup(config_path: &Path, ov: Overrides) -> CliResult<Setup> {
    if !config_path.exists() {
        return Err(val(anyhow!("config file {} does not exist", config_path.display())));
    }
    let text = fs::read_to_string(config_path)
        .map_err(|e| rt(anyhow!("reading {}: {e}", config_path.display())))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| val(anyhow!("parsing {}: {e}", config_path.display())))?;
    let base = config_path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();

    if let Some(seed) = ov.seed {
        cfg.instance = InstanceSource::Seed { seed };
    }
    if let Some(rounds) = ov.rounds {
        cfg.rounds = rounds;
    }
    if let Some(c) = ov.step_c {
        cfg.step.c = c;
    }
    if let Some(e) = ov.step_exponent {
        cfg.step.exponent = e;
    }
    if let Some(stride) = ov.record_every {
        cfg.record_every = stride;
    }
    if let Some(out) = ov.out {
        cfg.out_dir = out;
    }
    if let Some(tol) = ov.oracle_tol {
        cfg.oracle_tol = tol;
    }

    if cfg.record_every == 0 {
        return Err(val(anyhow!("record_every must be at least 1")));
    }
    if !(cfg.oracle_tol > 0.0) {
        return Err(val(anyhow!("oracle_tol must be positive")));
    }

    let (inst, inst_json) = match &cfg.instance {
        InstanceSource::Seed { seed } => {
            let inst: Instance = canonical_instance(*seed).map_err(rt)?;
            let json = inst.to_json();
            (inst, json)
        }
        InstanceSource::File { path } => {
            let path = resolve(&base, path);
            if !path.exists() {
                return Err(val(anyhow!("instance file {} does not exist", path.display())));
            }
            let json = fs::read_to_string(&path)
                .map_err(|e| rt(anyhow!("reading {}: {e}", path.display())))?;
            let inst = Instance::from_json(&json)
                .map_err(|e| val(anyhow!("instance file {}: {e}", path.display())))?;
            (inst, json)
        }
    };

    let (sched, ws) = match &cfg.schedule {
        ScheduleSource::Named { named } if named == "canonical" => {
            let sched = canonical_schedule();
            let ws = uniform_weights(&sched).map_err(val)?;
            (sched, ws)
        }
        ScheduleSource::Named { named } => {
            return Err(val(anyhow!("unknown schedule name {named:?} (known: \"canonical\")")));
        }
        ScheduleSource::File { path } => {
            let path = resolve(&base, path);
            if !path.exists() {
                return Err(val(anyhow!("schedule file {} does not exist", path.display())));
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| rt(anyhow!("reading {}: {e}", path.display())))?;
            let doc: ScheduleDocument<f64> = serde_json::from_str(&text)
                .map_err(|e| val(anyhow!("parsing {}: {e}", path.display())))?;
            let (sched, explicit) = doc.into_parts().map_err(val)?;
            let ws = match explicit {
                Some(ws) => ws,
                None => uniform_weights(&sched).map_err(val)?,
            };
            (sched, ws)
        }
    };

    if sched.num_nodes != inst.num_agents {
        return Err(val(anyhow!(
            "schedule has {} nodes but the instance has {} agents",
            sched.num_nodes,
            inst.num_agents
        )));
    }

    let out_dir = resolve(&base, &cfg.out_dir);
    Ok(Setup { cfg, inst, inst_json, sched, ws, out_dir })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| rt(anyhow!("writing {}: {e}", path.display())))
}

fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_dir(out_dir: &Path) -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| out_dir.join("oracle-cache"))
}

/// Returns the saddle certificate for `(instance, tol)`, loading it from the
/// cache when a matching entry exists and solving + storing it otherwise.
/// The second value reports whether the cache was hit.
fn obtain_certificate(setup: &Setup) -> CliResult<(Certificate, bool)> {
    let key = sha256_hex(&[
        setup.inst_json.as_bytes(),
        b"|tol|",
        &setup.cfg.oracle_tol.to_bits().to_le_bytes(),
    ]);
    let dir = cache_dir(&setup.out_dir);
    let path = dir.join(format!("{key}.json"));
    if path.exists() {
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(cert) = Certificate::from_json(&text) {
                return Ok((cert, true));
            }
        }
        eprintln!("warning: ignoring unreadable cache entry {}", path.display());
    }
    let cert = solve_centralized(&setup.inst, setup.cfg.oracle_tol).map_err(rt)?;
    fs::create_dir_all(&dir)
        .map_err(|e| rt(anyhow!("creating cache directory {}: {e}", dir.display())))?;
    write_file(&path, &cert.to_json())?;
    Ok((cert, false))
}

fn initial_points(inst: &Instance, policy: &InitPolicy) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    match policy {
        InitPolicy::Zeros => zero_start(inst),
        InitPolicy::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let dual_dim = inst.num_ineq + inst.num_eq;
            let dual_set = DualSet::new(inst.num_ineq, inst.num_eq, inst.dual_radius);
            let mut x0 = Vec::with_capacity(inst.num_agents);
            let mut l0 = Vec::with_capacity(inst.num_agents);
            for _ in 0..inst.num_agents {
                let x: Vec<f64> = (0..inst.dim)
                    .map(|j| {
                        let (lo, hi) = (inst.feasible_set.lower[j], inst.feasible_set.upper[j]);
                        lo + rng.gen::<f64>() * (hi - lo)
                    })
                    .collect();
                let raw: Vec<f64> = (0..dual_dim)
                    .map(|r| {
                        if r < inst.num_ineq {
                            rng.gen::<f64>() * inst.dual_radius
                        } else {
                            rng.gen_range(-1.0..1.0)
                        }
                    })
                    .collect();
                x0.push(x);
                l0.push(project_dual(&dual_set, &raw));
            }
            (x0, l0)
        }
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Summary {
    config: ExperimentConfig,
    instance_hash: String,
    oracle: OracleSummary,
    wall_time_seconds: f64,
    #[serde(rename = "final")]
    final_row: FinalSummary,
    rate: Option<RateSummary>,
}

#[derive(Serialize)]
struct OracleSummary {
    f_star: f64,
    kkt_residual: f64,
    saddle_gap: f64,
    method: String,
    cached: bool,
}

#[derive(Serialize)]
struct FinalSummary {
    round: usize,
    consensus_x: f64,
    consensus_lambda: f64,
    tracking_z: f64,
    tracking_y: f64,
    violation_ineq: Vec<f64>,
    violation_eq: Vec<f64>,
    gap: Option<f64>,
    s_norm: f64,
    max_dist_x: Option<f64>,
    max_dist_lambda: Option<f64>,
}

#[derive(Serialize)]
struct RateSummary {
    window_start: usize,
    bound_constant: f64,
    slope: Option<f64>,
}

fn cmd_run(config_path: &Path, ov: Overrides) -> CliResult<()> {
    let setup = load_setup(config_path, ov)?;
    let ss = Steps::new(setup.cfg.step.c, setup.cfg.step.exponent).map_err(engine_err)?;
    fs::create_dir_all(&setup.out_dir)
        .map_err(|e| rt(anyhow!("creating output directory {}: {e}", setup.out_dir.display())))?;

    let t0 = Instant::now();
    let (cert, cached) = obtain_certificate(&setup)?;
    println!(
        "oracle: f* = {:.9} (kkt residual {:.3e}, {})",
        cert.f_star,
        cert.kkt_residual,
        if cached { "cached" } else { "solved" }
    );

    let (x0, l0) = initial_points(&setup.inst, &setup.cfg.init);
    let trace = run_engine(
        &setup.inst,
        &setup.ws,
        &ss,
        &x0,
        &l0,
        setup.cfg.rounds,
        setup.cfg.record_every,
        Some(&cert),
    )
    .map_err(engine_err)?;

    let m = setup.inst.num_agents;
    let csv_path = setup.out_dir.join("trace.csv");
    let mut csv = csv_header(m, setup.inst.num_ineq, setup.inst.num_eq);
    csv.push('\n');
    for row in &trace.rows {
        csv.push_str(&csv_line(row, m));
        csv.push('\n');
    }
    write_file(&csv_path, &csv)?;

    // the rate fit needs every round recorded and a window that ends before
    // the final round
    let rate = if setup.cfg.record_every == 1 && setup.cfg.rounds >= 2 {
        let s = setup.cfg.rounds / 2;
        let fit = ppdual::fit_rate(&trace, &setup.inst, &ss, s, &cert).map_err(|e| rt(e))?;
        Some(RateSummary {
            window_start: s,
            bound_constant: fit.bound_constant,
            slope: fit.slope,
        })
    } else {
        None
    };

    let last = trace.rows.last().expect("trace records at least one row");
    let max_opt = |v: &Option<Vec<f64>>| {
        v.as_ref().map(|d| d.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let final_row = FinalSummary {
        round: last.round,
        consensus_x: last.consensus_x,
        consensus_lambda: last.consensus_lambda,
        tracking_z: last.tracking_z,
        tracking_y: last.tracking_y,
        violation_ineq: last.violation_ineq.clone(),
        violation_eq: last.violation_eq.clone(),
        gap: last.gap,
        s_norm: last.s_norm,
        max_dist_x: max_opt(&last.dist_x),
        max_dist_lambda: max_opt(&last.dist_lambda),
    };
    let wall = t0.elapsed().as_secs_f64();
    println!(
        "run: {} rounds in {:.3} s; final consensus_x {:.3e}, consensus_lambda {:.3e}",
        setup.cfg.rounds, wall, final_row.consensus_x, final_row.consensus_lambda
    );

    let summary = Summary {
        instance_hash: format!("sha256:{}", sha256_hex(&[setup.inst_json.as_bytes()])),
        oracle: OracleSummary {
            f_star: cert.f_star,
            kkt_residual: cert.kkt_residual,
            saddle_gap: cert.saddle_gap,
            method: cert.method.clone(),
            cached,
        },
        wall_time_seconds: wall,
        final_row,
        rate,
        config: setup.cfg.clone(),
    };
    let summary_path = setup.out_dir.join("summary.json");
    write_file(&summary_path, &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;

    let final_path = setup.out_dir.join("final_state.json");
    let final_state =
        serde_json::to_string_pretty(trace.final_state()).expect("state serializes");
    write_file(&final_path, &final_state)?;

    println!("wrote {} ({} rows)", csv_path.display(), trace.rows.len());
    println!("wrote {}", summary_path.display());
    println!("wrote {}", final_path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cmd_verify(config_path: &Path, ov: Overrides) -> CliResult<()> {
    let setup = load_setup(config_path, ov)?;
    let mut checks: Vec<Check> = Vec::new();

    // instance validation re-runs explicitly so its margins get printed
    let inst_pass = setup.inst.validate().is_ok();
    let sums = setup.inst.total_constraints(&setup.inst.slater_point);
    let worst_ineq =
        sums[..setup.inst.num_ineq].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let worst_eq = sums[setup.inst.num_ineq..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    checks.push(Check {
        name: "instance",
        pass: inst_pass,
        detail: format!(
            "slater margin {:.3e}, equality residual {:.3e}, dual radius {:.4}",
            -worst_ineq, worst_eq, setup.inst.dual_radius
        ),
    });

    let report = validate_weights(&setup.ws, &setup.sched);
    let max_row = report
        .checks
        .iter()
        .map(|c| c.max_row_dev)
        .fold(0.0f64, f64::max);
    let max_col = report
        .checks
        .iter()
        .map(|c| c.max_col_dev)
        .fold(0.0f64, f64::max);
    let mismatches: usize = report.checks.iter().map(|c| c.pattern_mismatches).sum();
    checks.push(Check {
        name: "weights",
        pass: report.ok,
        detail: format!(
            "max row dev {max_row:.3e}, max col dev {max_col:.3e}, pattern mismatches {mismatches}"
        ),
    });

    let window = setup.sched.connectivity_window;
    let connected = check_connectivity(&setup.sched, window);
    checks.push(Check {
        name: "connectivity",
        pass: connected,
        detail: format!("window {window}"),
    });

    checks.push(projection_check(&setup.inst));
    checks.push(tracking_check(&setup)?);
    checks.push(saddle_check(&setup)?);

    let mut failed = 0;
    for c in &checks {
        println!("check {}: {} ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
        if !c.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(val(anyhow!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

/// Idempotence, non-expansiveness, and feasibility of both projections on
/// random probes around the instance's sets.
fn projection_check(inst: &Instance) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dual_set = DualSet::new(inst.num_ineq, inst.num_eq, inst.dual_radius);
    let dual_dim = inst.num_ineq + inst.num_eq;
    let mut worst = 0.0f64;
    let mut pass = true;
    for _ in 0..200 {
        let draw_x = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..inst.dim).map(|_| rng.gen_range(-10.0..10.0)).collect()
        };
        let a = draw_x(&mut rng);
        let b = draw_x(&mut rng);
        let (pa, pb) = (project_box(&inst.feasible_set, &a), project_box(&inst.feasible_set, &b));
        pass &= project_box(&inst.feasible_set, &pa) == pa;
        pass &= inst.feasible_set.contains(&pa, 0.0);
        pass &= dist(&pa, &pb) <= dist(&a, &b) * (1.0 + 1e-12);

        let draw_l = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dual_dim).map(|_| rng.gen_range(-6.0..6.0)).collect()
        };
        let la = draw_l(&mut rng);
        let lb = draw_l(&mut rng);
        let (pla, plb) = (project_dual(&dual_set, &la), project_dual(&dual_set, &lb));
        // the radial scaling re-projects within one ulp of itself
        let drift = dist(&project_dual(&dual_set, &pla), &pla);
        worst = worst.max(drift);
        pass &= drift <= 1e-14;
        pass &= pla[..inst.num_ineq].iter().all(|&v| v >= 0.0);
        pass &= norm(&pla[..inst.num_ineq]) <= inst.dual_radius * (1.0 + 1e-12);
        pass &= dist(&pla, &plb) <= dist(&la, &lb) * (1.0 + 1e-12);
    }
    Check {
        name: "projections",
        pass,
        detail: format!("200 probe pairs, max re-projection drift {worst:.3e}"),
    }
}

/// Runs 100 rounds from the configured start and checks that the tracker
/// sums reproduce the recomputed gradient and constraint sums. A setup the
/// engine refuses to run (bad weights, disconnected schedule) fails the
/// check rather than aborting the report.
fn tracking_check(setup: &Setup) -> CliResult<Check> {
    let ss = Steps::new(setup.cfg.step.c, setup.cfg.step.exponent).map_err(engine_err)?;
    let (x0, l0) = initial_points(&setup.inst, &setup.cfg.init);
    let trace = match run_engine(&setup.inst, &setup.ws, &ss, &x0, &l0, 100, 1, None) {
        Ok(trace) => trace,
        Err(EngineError::InvalidWeights(_)) => {
            return Ok(Check {
                name: "tracking",
                pass: false,
                detail: "not run: weight schedule failed validation".into(),
            });
        }
        Err(EngineError::Disconnected) => {
            return Ok(Check {
                name: "tracking",
                pass: false,
                detail: "not run: schedule is not jointly connected".into(),
            });
        }
        Err(e) => return Err(engine_err(e)),
    };
    let mut worst_z = 0.0f64;
    let mut worst_y = 0.0f64;
    for row in &trace.rows {
        worst_z = worst_z.max(row.tracking_z);
        worst_y = worst_y.max(row.tracking_y);
    }
    let bound = 1e-9 * setup.inst.num_agents as f64;
    Ok(Check {
        name: "tracking",
        pass: worst_z <= bound && worst_y <= bound,
        detail: format!("100 rounds, max gradient gap {worst_z:.3e}, max constraint gap {worst_y:.3e}"),
    })
}

/// Solves (or loads) the saddle certificate and probes both saddle
/// inequalities around it.
fn saddle_check(setup: &Setup) -> CliResult<Check> {
    let (cert, cached) = obtain_certificate(setup)?;
    let report = verify_saddle(&setup.inst, &cert.x_star, &cert.lambda_star, 1_000, 1e-4)
        .map_err(rt)?;
    Ok(Check {
        name: "saddle",
        pass: report.pass,
        detail: format!(
            "f* {:.6} ({}), max primal violation {:.3e}, max dual violation {:.3e} over {} probes",
            cert.f_star,
            if cached { "cached" } else { "solved" },
            report.max_primal_violation,
            report.max_dual_violation,
            report.probes
        ),
    })
}
