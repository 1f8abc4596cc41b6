//! Command implementations behind the `hystersolve` binary: run one
//! simulation with full output, run a τ-refinement study, check initial
//! compatibility, and compute norms of CSV-sampled functions.
//!
//! Exit codes: 0 success, 1 step failure, 2 estimate/compatibility failure,
//! 3 configuration failure.

use crate::config::SimulationConfig;
use crate::diagnostics::{
    all_hard_estimates_pass, default_sigma, interpolant_gap, philog_increment_sum,
    run_estimate_suite, weak_residual, EstimateReport,
};
use crate::error::{HystError, Result};
use crate::spaces::{
    luxemburg_norm, sobolev_time_norms, space_time_norms, SampledFunction, YoungFunction,
};
use crate::stepper::{
    check_initial_compatibility, run_simulation, CompatOptions, CompatReport, InterpField,
    InterpMode, Interpolants, Trajectory,
};
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct GlobalOpts {
    pub force: bool,
    pub out_dir: Option<PathBuf>,
}

fn load_config(path: &Path) -> std::result::Result<SimulationConfig, i32> {
    match SimulationConfig::load(path) {
        Ok(cfg) => Ok(cfg),
        Err(e) => {
            eprintln!("config error: {e}");
            Err(3)
        }
    }
}

fn config_echo(cfg: &SimulationConfig) -> serde_json::Map<String, serde_json::Value> {
    let mut map = serde_json::Map::new();
    for line in cfg.write_string().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            map.insert(k.to_string(), serde_json::Value::String(v.to_string()));
        }
    }
    map
}

fn write_diagnostics_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(
        f,
        "step,time,max_abs_u,mass_residual,energy_grad,energy_boundary,psi_total,philog_increment,solver_iters,solver_residual"
    )?;
    for r in &traj.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.time,
            r.max_abs_u,
            r.mass_residual,
            r.energy_grad,
            r.energy_boundary,
            r.psi_total,
            r.philog_increment,
            r.solver_iters,
            r.solver_residual
        )?;
    }
    Ok(())
}

fn snapshot_steps(steps: usize, stride: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..=steps).step_by(stride.max(1)).collect();
    if *ids.last().unwrap() != steps {
        ids.push(steps);
    }
    ids
}

fn write_snapshots_csv(path: &Path, traj: &Trajectory, stride: usize) -> Result<usize> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "step,time,x,u,s")?;
    let ids = snapshot_steps(traj.steps(), stride);
    for &i in &ids {
        let st = &traj.states[i];
        for (k, &x) in traj.problem.mesh.nodes().iter().enumerate() {
            writeln!(f, "{},{},{},{},{}", st.index, st.time, x, st.u[k], st.s[k])?;
        }
    }
    Ok(ids.len())
}

fn write_memory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "x,r,xi")?;
    let last = traj.states.last().unwrap();
    for (k, &x) in traj.problem.mesh.nodes().iter().enumerate() {
        let row = last.memory.row(k);
        for (j, &r) in traj.problem.op.grid().nodes().iter().enumerate() {
            writeln!(f, "{},{},{}", x, r, row[j])?;
        }
    }
    Ok(())
}

fn write_summary_json(
    path: &Path,
    cfg: &SimulationConfig,
    compat: &CompatReport,
    estimates: &[EstimateReport],
) -> Result<()> {
    let doc = json!({
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "config": config_echo(cfg),
        "compatibility": compat,
        "estimates": estimates,
    });
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

impl From<serde_json::Error> for HystError {
    fn from(e: serde_json::Error) -> Self {
        HystError::InvalidArgument(format!("json: {e}"))
    }
}

/// `hystersolve run <config>`: compatibility check, full simulation,
/// estimate suite, and all file outputs.
pub fn cmd_run(config_path: &Path, opts: &GlobalOpts) -> i32 {
    let cfg = match load_config(config_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let problem = match cfg.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e}");
            return 3;
        }
    };
    let lambda = match cfg.lambda_fn() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("config error: {e}");
            return 3;
        }
    };
    let compat_opts = CompatOptions {
        scaling_l: cfg.compat_l,
        r0_override: None,
    };
    let compat = match check_initial_compatibility(&problem, lambda.as_ref(), &compat_opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("compatibility check failed to run: {e}");
            return 3;
        }
    };
    if compat.has_failures() && !opts.force {
        eprintln!(
            "initial compatibility failed (rerun with --force to override):\n{}",
            serde_json::to_string_pretty(&compat).unwrap_or_default()
        );
        return 3;
    }

    let traj = match run_simulation(&problem) {
        Ok(t) => t,
        Err(e @ HystError::StepFailure { .. }) => {
            eprintln!("{e}");
            return 1;
        }
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let estimates = match run_estimate_suite(&traj) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("estimate suite failed: {e}");
            return 2;
        }
    };

    let out_dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    if let Err(e) = fs::create_dir_all(&out_dir) {
        eprintln!("cannot create output directory: {e}");
        return 3;
    }
    let io = (|| -> Result<()> {
        write_diagnostics_csv(&out_dir.join("diagnostics.csv"), &traj)?;
        write_snapshots_csv(
            &out_dir.join("snapshots.csv"),
            &traj,
            cfg.output.snapshot_stride,
        )?;
        if cfg.output.memory_snapshots {
            write_memory_csv(&out_dir.join("memory.csv"), &traj)?;
        }
        write_summary_json(&out_dir.join("summary.json"), &cfg, &compat, &estimates)?;
        Ok(())
    })();
    if let Err(e) = io {
        eprintln!("output error: {e}");
        return 3;
    }

    for r in &estimates {
        println!(
            "{:<20} measured = {:<24} bound = {:<24} {:?}",
            r.name,
            format!("{:.6e}", r.measured),
            r.bound.map_or("-".into(), |b| format!("{b:.6e}")),
            r.status
        );
    }
    if all_hard_estimates_pass(&estimates) {
        0
    } else {
        2
    }
}

#[derive(Debug, Serialize)]
struct RefineLevel {
    steps: usize,
    tau: f64,
    max_abs_u: f64,
    energy_sum: f64,
    philog_sum: f64,
    gap_u: f64,
    gap_g: f64,
    alpha: Option<f64>,
    weak_residual: f64,
}

#[derive(Debug, Serialize)]
struct RefinePair {
    coarse_steps: usize,
    fine_steps: usize,
    final_sup_diff: f64,
    y_norm_diff: f64,
}

#[derive(Debug, Serialize)]
struct RefineStudy {
    levels: Vec<RefineLevel>,
    pairs: Vec<RefinePair>,
    /// log2 ratio of consecutive Y-norm differences.
    empirical_orders: Vec<f64>,
}

fn refine_level_metrics(traj: &Trajectory) -> Result<RefineLevel> {
    let gaps = interpolant_gap(traj);
    let sigma = default_sigma(traj.steps());
    let theta = vec![1.0; traj.problem.mesh.node_count()];
    let mesh = &traj.problem.mesh;
    let laws = &traj.problem.laws;
    let mut energy = 0.0;
    for st in &traj.states {
        energy += traj.tau()
            * (mesh.gradient_energy(&st.u)
                + laws.gamma_left * st.u[0] * st.u[0]
                + laws.gamma_right * st.u[st.u.len() - 1] * st.u[st.u.len() - 1]);
    }
    Ok(RefineLevel {
        steps: traj.steps(),
        tau: traj.tau(),
        max_abs_u: traj.max_abs_u(),
        energy_sum: energy,
        philog_sum: philog_increment_sum(traj),
        gap_u: gaps.gap_u,
        gap_g: gaps.gap_g,
        alpha: gaps.alpha,
        weak_residual: weak_residual(traj, &sigma, &theta)?,
    })
}

/// Hat-interpolant difference of two runs of the same scenario sampled on
/// the finer run's time grid, as a `field[time][node]` matrix.
pub fn hat_difference_field(coarse: &Trajectory, fine: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let n = coarse.problem.mesh.node_count();
    let ic = Interpolants::new(coarse);
    let fi = Interpolants::new(fine);
    let nt = fine.steps() + 1;
    let mut field = vec![vec![0.0; n]; nt];
    for (i, row) in field.iter_mut().enumerate() {
        let t = (i as f64 / (nt - 1) as f64) * fine.t_end();
        for (k, slot) in row.iter_mut().enumerate() {
            let a = ic.eval(InterpField::Pressure, InterpMode::Hat, k, t)?;
            let b = fi.eval(InterpField::Pressure, InterpMode::Hat, k, t)?;
            *slot = a - b;
        }
    }
    Ok(field)
}

/// Runs the scenario at τ, τ/2, …, τ/2^{levels−1} and reports the
/// inter-level differences in the sup and Y norms together with the
/// per-level uniform-bound quantities.
pub fn run_refinement_study(cfg: &SimulationConfig, levels: usize) -> Result<RefineStudyOutput> {
    if levels < 2 {
        return Err(HystError::arg("refinement study needs at least 2 levels"));
    }
    let mut trajectories = Vec::with_capacity(levels);
    for l in 0..levels {
        let mut scaled = cfg.clone();
        scaled.time.steps = cfg.time.steps << l;
        let problem = scaled.build()?;
        trajectories.push(run_simulation(&problem)?);
    }
    let mut level_rows = Vec::new();
    for traj in &trajectories {
        level_rows.push(refine_level_metrics(traj)?);
    }
    let mut pairs = Vec::new();
    for w in trajectories.windows(2) {
        let n = w[0].problem.mesh.node_count();
        let last_c = &w[0].states[w[0].steps()].u;
        let last_f = &w[1].states[w[1].steps()].u;
        let sup = (0..n)
            .map(|k| (last_c[k] - last_f[k]).abs())
            .fold(0.0_f64, f64::max);
        let field = hat_difference_field(&w[0], &w[1])?;
        let (_, y) = space_time_norms(&field, w[0].problem.mesh.length(), w[0].t_end())?;
        pairs.push(RefinePair {
            coarse_steps: w[0].steps(),
            fine_steps: w[1].steps(),
            final_sup_diff: sup,
            y_norm_diff: y,
        });
    }
    let empirical_orders = pairs
        .windows(2)
        .map(|p| (p[0].y_norm_diff / p[1].y_norm_diff).log2())
        .collect();
    Ok(RefineStudyOutput {
        study: RefineStudy {
            levels: level_rows,
            pairs,
            empirical_orders,
        },
        trajectories,
    })
}

pub struct RefineStudyOutput {
    study: RefineStudy,
    pub trajectories: Vec<Trajectory>,
}

impl RefineStudyOutput {
    pub fn levels_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.study).unwrap_or(serde_json::Value::Null)
    }
}

/// `hystersolve refine <config> --levels k`.
pub fn cmd_refine(config_path: &Path, levels: usize, opts: &GlobalOpts) -> i32 {
    let cfg = match load_config(config_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let out = match run_refinement_study(&cfg, levels) {
        Ok(o) => o,
        Err(e @ HystError::StepFailure { .. }) => {
            eprintln!("{e}");
            return 1;
        }
        Err(e @ HystError::Validation(_)) => {
            eprintln!("{e}");
            return 3;
        }
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let doc = out.levels_json();
    let rendered = serde_json::to_string_pretty(&doc).unwrap_or_default();
    println!("{rendered}");
    let out_dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    if fs::create_dir_all(&out_dir).is_ok() {
        let _ = fs::write(out_dir.join("refine.json"), rendered + "\n");
    }
    0
}

/// `hystersolve check-compat <config>`: prints the report as JSON;
/// exit 0 when nothing failed (warnings allowed), 2 otherwise.
pub fn cmd_check_compat(config_path: &Path) -> i32 {
    let cfg = match load_config(config_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let problem = match cfg.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e}");
            return 3;
        }
    };
    let lambda = match cfg.lambda_fn() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("config error: {e}");
            return 3;
        }
    };
    let compat_opts = CompatOptions {
        scaling_l: cfg.compat_l,
        r0_override: None,
    };
    match check_initial_compatibility(&problem, lambda.as_ref(), &compat_opts) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).unwrap_or_default()
            );
            if report.has_failures() {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("compatibility check failed to run: {e}");
            3
        }
    }
}

// ---------------------------------------------------------------------------
// Norms of CSV samples
// ---------------------------------------------------------------------------

fn parse_young(name: &str) -> Result<YoungFunction> {
    match name {
        "philog" => Ok(YoungFunction::PhiLog),
        "entropy" => Ok(YoungFunction::ExpMinusLinear),
        other => {
            if let Some(p) = other.strip_prefix("power:") {
                let p: f64 = p
                    .parse()
                    .map_err(|_| HystError::arg(format!("bad power exponent `{p}`")))?;
                YoungFunction::power(p)
            } else {
                Err(HystError::arg(format!(
                    "unknown Young function `{other}` (use power:<p>, philog, entropy)"
                )))
            }
        }
    }
}

struct TimeSamples {
    values: Vec<f64>,
    t_len: f64,
}

struct FieldSamples {
    field: Vec<Vec<f64>>,
    length: f64,
    t_len: f64,
}

enum NormInput {
    Time(TimeSamples),
    Field(FieldSamples),
}

fn load_norm_csv(path: &Path) -> Result<NormInput> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| HystError::arg("empty sample set"))?
        .trim();
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    let rows: Vec<Vec<f64>> = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|p| {
                    p.trim().parse::<f64>().map_err(|_| HystError::Parse {
                        line: i + 2,
                        message: format!("bad number `{p}`"),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(HystError::arg("empty sample set"));
    }
    match cols.as_slice() {
        ["t", "value"] => {
            let t_len = rows.last().unwrap()[0];
            if !(t_len > 0.0) {
                return Err(HystError::arg("time samples must end at T > 0"));
            }
            Ok(NormInput::Time(TimeSamples {
                values: rows.iter().map(|r| r[1]).collect(),
                t_len,
            }))
        }
        ["x", "t", "value"] => {
            let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let mut ts: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
            let (nx, nt) = (xs.len(), ts.len());
            if nx * nt != rows.len() {
                return Err(HystError::dim(format!(
                    "field CSV has {} rows for a {nx} x {nt} grid",
                    rows.len()
                )));
            }
            let mut field = vec![vec![f64::NAN; nx]; nt];
            let locate = |nodes: &[f64], v: f64| {
                nodes
                    .iter()
                    .position(|&n| (n - v).abs() <= 1e-12 * n.abs().max(1.0))
                    .unwrap()
            };
            for r in &rows {
                field[locate(&ts, r[1])][locate(&xs, r[0])] = r[2];
            }
            if field.iter().flatten().any(|v| v.is_nan()) {
                return Err(HystError::dim("field CSV is not a full (x, t) grid"));
            }
            Ok(NormInput::Field(FieldSamples {
                field,
                length: xs[nx - 1],
                t_len: ts[nt - 1],
            }))
        }
        _ => Err(HystError::arg(format!(
            "expected header `t,value` or `x,t,value`, got `{header}`"
        ))),
    }
}

fn trapezoid_weights(n: usize, len: f64) -> Vec<f64> {
    let dt = len / (n - 1) as f64;
    (0..n)
        .map(|k| if k == 0 || k == n - 1 { dt / 2.0 } else { dt })
        .collect()
}

/// `hystersolve norms <csv> --norm ...`: prints the requested norms as JSON.
pub fn cmd_norms(csv_path: &Path, norms: &[String]) -> i32 {
    let input = match load_norm_csv(csv_path) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{e}");
            return 3;
        }
    };
    if norms.is_empty() {
        eprintln!("no norms requested (use --norm h|v|vstar|x|y|lux:<phi>)");
        return 3;
    }
    let mut out = serde_json::Map::new();
    for name in norms {
        let value = match (name.as_str(), &input) {
            ("h", NormInput::Time(ts)) => sobolev_time_norms(&ts.values, ts.t_len).map(|n| n.0),
            ("v", NormInput::Time(ts)) => sobolev_time_norms(&ts.values, ts.t_len).map(|n| n.1),
            ("vstar", NormInput::Time(ts)) => sobolev_time_norms(&ts.values, ts.t_len).map(|n| n.2),
            ("x", NormInput::Field(fs)) => {
                space_time_norms(&fs.field, fs.length, fs.t_len).map(|n| n.0)
            }
            ("y", NormInput::Field(fs)) => {
                space_time_norms(&fs.field, fs.length, fs.t_len).map(|n| n.1)
            }
            (other, input) => {
                if let Some(phi_name) = other.strip_prefix("lux:") {
                    parse_young(phi_name).and_then(|phi| match input {
                        NormInput::Time(ts) => {
                            let w = trapezoid_weights(ts.values.len(), ts.t_len);
                            SampledFunction::new(ts.values.clone(), w)
                                .map(|f| luxemburg_norm(&f, &phi))
                        }
                        NormInput::Field(fsamp) => {
                            let wt = trapezoid_weights(fsamp.field.len(), fsamp.t_len);
                            let wx = trapezoid_weights(fsamp.field[0].len(), fsamp.length);
                            let mut values = Vec::new();
                            let mut weights = Vec::new();
                            for (i, row) in fsamp.field.iter().enumerate() {
                                for (k, &v) in row.iter().enumerate() {
                                    values.push(v);
                                    weights.push(wt[i] * wx[k]);
                                }
                            }
                            SampledFunction::new(values, weights).map(|f| luxemburg_norm(&f, &phi))
                        }
                    })
                } else {
                    Err(HystError::arg(format!(
                        "unknown norm `{other}` for this input layout"
                    )))
                }
            }
        };
        match value {
            Ok(v) => {
                out.insert(name.clone(), json!(v));
            }
            Err(e) => {
                eprintln!("{e}");
                return 3;
            }
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({ "norms": out })).unwrap_or_default()
    );
    0
}
