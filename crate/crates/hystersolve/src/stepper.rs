//! Implicit time stepping for s_t = div κ(x,s)∇u with s = G[u]:
//! each step solves the quasilinear elliptic system by a damped fixed-point
//! iteration with local branch-slope linearization of the hysteresis term,
//! followed by full correction steps that push the residual to machine
//! precision once the requested tolerance is met.
//!
//! One trajectory is a serial fold over steps (the memory is the state);
//! independent trajectories can run concurrently.

use crate::error::{HystError, Result};
use crate::hysteresis::{BranchDirection, MemoryState, PreisachOperator};
use crate::mesh::{
    assemble_step_system, solve_tridiagonal, HysteresisLinearization, MaterialLaws, Mesh1D,
};
use serde::Serialize;

/// Fixed-point solver settings per implicit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Residual tolerance relative to the right-hand-side scale.
    pub tol: f64,
    pub max_iter: usize,
    /// Damping ω of the update u ← (1−ω)u + ω·u_solve.
    pub relaxation: f64,
    /// Retries with halved ω after a non-converged step.
    pub max_retries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            relaxation: 0.8,
            max_retries: 3,
        }
    }
}

/// Everything one simulation needs: geometry, material laws, hysteresis
/// operator, initial data, and the time grid.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh1D,
    pub laws: MaterialLaws,
    pub op: PreisachOperator,
    pub u0: Vec<f64>,
    pub memory0: MemoryState,
    pub t_end: f64,
    pub steps: usize,
    pub solver: SolverConfig,
}

impl Problem {
    pub fn tau(&self) -> f64 {
        self.t_end / self.steps as f64
    }
}

/// One discrete time level: nodal pressure, saturation, memory, and solver
/// bookkeeping. `s` always equals the Preisach output of `memory`.
#[derive(Debug, Clone)]
pub struct StepState {
    pub index: usize,
    pub time: f64,
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    pub memory: MemoryState,
    pub iterations: usize,
    pub residual: f64,
}

/// Per-step scalar diagnostics recorded during a run.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    pub max_abs_u: f64,
    pub mass_residual: f64,
    pub energy_grad: f64,
    pub energy_boundary: f64,
    pub psi_total: f64,
    pub philog_increment: f64,
    pub solver_iters: usize,
    pub solver_residual: f64,
}

/// A completed run: ordered states from i = 0 to n with uniform τ = T/n,
/// plus the problem that produced them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub problem: Problem,
    pub states: Vec<StepState>,
    pub rows: Vec<DiagnosticsRow>,
}

impl Trajectory {
    pub fn tau(&self) -> f64 {
        self.problem.tau()
    }

    pub fn t_end(&self) -> f64 {
        self.problem.t_end
    }

    pub fn steps(&self) -> usize {
        self.problem.steps
    }

    pub fn max_abs_u(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|st| st.u.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// The implicit step
// ---------------------------------------------------------------------------

struct IterationOutcome {
    u: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn iterate_step(
    prev: &StepState,
    ustar_now: [f64; 2],
    mesh: &Mesh1D,
    laws: &MaterialLaws,
    op: &PreisachOperator,
    tau: f64,
    tol: f64,
    max_iter: usize,
    omega: f64,
) -> Result<IterationOutcome> {
    let n = mesh.node_count();
    let range = op.range();
    let mut u: Vec<f64> = prev.u.iter().map(|v| v.clamp(-range, range)).collect();
    let mut s_trial = vec![0.0; n];
    let mut lin = HysteresisLinearization {
        slopes: vec![0.0; n],
        intercepts: vec![0.0; n],
    };
    let residual_floor = 1e3 * f64::EPSILON;
    let mut best_u = u.clone();
    let mut best_residual = f64::INFINITY;
    let mut prev_residual = f64::INFINITY;
    let mut polishing = false;
    let mut polish_left = 8usize;
    let mut iterations = 0usize;

    for iter in 1..=max_iter {
        iterations = iter;
        for k in 0..n {
            let dir = BranchDirection::from_increment(u[k] - prev.u[k]);
            let (s, slope) = op.linearize(u[k], prev.memory.row(k), mesh.nodes()[k], dir)?;
            s_trial[k] = s;
            lin.slopes[k] = slope;
            lin.intercepts[k] = s - slope * u[k];
        }
        let sys = assemble_step_system(mesh, laws, &s_trial, &prev.s, ustar_now, tau, &lin)?;
        let scale = inf_norm(&sys.rhs).max(1.0);
        let residual = inf_norm(&sys.residual(&u)) / scale;

        if residual < best_residual {
            best_residual = residual;
            best_u.copy_from_slice(&u);
        }
        if residual <= tol {
            // the requested tolerance is met; take full correction steps
            // while the residual keeps dropping towards machine precision
            if !polishing {
                polishing = true;
            } else if residual >= prev_residual {
                break;
            }
            if polish_left == 0 || best_residual <= residual_floor {
                break;
            }
            polish_left -= 1;
            prev_residual = residual;
            let u_solve = solve_tridiagonal(&sys)?;
            for k in 0..n {
                u[k] = u_solve[k].clamp(-range, range);
            }
            continue;
        }
        if polishing {
            // a full step left the tolerance band; keep the best iterate
            break;
        }

        let u_solve = solve_tridiagonal(&sys)?;
        for k in 0..n {
            u[k] = ((1.0 - omega) * u[k] + omega * u_solve[k]).clamp(-range, range);
        }
    }

    Ok(IterationOutcome {
        u: best_u,
        iterations,
        residual: best_residual,
        converged: best_residual <= tol,
    })
}

/// Solves one implicit step against the previous state. On convergence
/// failure the iteration is retried with halved relaxation before the step
/// error is reported.
pub fn solve_step(
    prev: &StepState,
    ustar_now: [f64; 2],
    mesh: &Mesh1D,
    laws: &MaterialLaws,
    op: &PreisachOperator,
    tau: f64,
    solver: &SolverConfig,
) -> Result<StepState> {
    if prev.u.len() != mesh.node_count() {
        return Err(HystError::dim("previous state does not match the mesh"));
    }
    let mut omega = solver.relaxation;
    let mut last = None;
    for _ in 0..=solver.max_retries {
        let out = iterate_step(
            prev,
            ustar_now,
            mesh,
            laws,
            op,
            tau,
            solver.tol,
            solver.max_iter,
            omega,
        )?;
        if out.converged {
            // commit the memory update
            let n = mesh.node_count();
            let mut memory = prev.memory.clone();
            let mut s = vec![0.0; n];
            for k in 0..n {
                s[k] = op.step_into(out.u[k], mesh.nodes()[k], memory.row_mut(k))?;
            }
            return Ok(StepState {
                index: prev.index + 1,
                time: prev.time + tau,
                u: out.u,
                s,
                memory,
                iterations: out.iterations,
                residual: out.residual,
            });
        }
        last = Some(out);
        omega *= 0.5;
    }
    let out = last.unwrap();
    Err(HystError::StepFailure {
        step: prev.index + 1,
        iterations: out.iterations,
        residual: out.residual,
        relaxation: omega * 2.0,
    })
}

/// Initial state of a problem: saturation from the initial memory, zero
/// solver counters.
pub fn initial_state(problem: &Problem) -> Result<StepState> {
    let n = problem.mesh.node_count();
    if problem.u0.len() != n || problem.memory0.node_count() != n {
        return Err(HystError::dim("initial data does not match the mesh"));
    }
    let mut s = vec![0.0; n];
    for k in 0..n {
        s[k] = problem
            .op
            .output(problem.memory0.row(k), problem.mesh.nodes()[k])?;
    }
    Ok(StepState {
        index: 0,
        time: 0.0,
        u: problem.u0.clone(),
        s,
        memory: problem.memory0.clone(),
        iterations: 0,
        residual: 0.0,
    })
}

/// Runs the full implicit scheme, recording per-step diagnostics.
pub fn run_simulation(problem: &Problem) -> Result<Trajectory> {
    if problem.laws.ustar.len() < problem.steps + 1 {
        return Err(HystError::dim(format!(
            "boundary series has {} levels, need {}",
            problem.laws.ustar.len(),
            problem.steps + 1
        )));
    }
    let tau = problem.tau();
    let mesh = &problem.mesh;
    let n = mesh.node_count();
    let mut states = Vec::with_capacity(problem.steps + 1);
    let mut rows = Vec::with_capacity(problem.steps);
    states.push(initial_state(problem)?);

    for i in 1..=problem.steps {
        let ustar_now = problem.laws.ustar[i];
        let next = solve_step(
            &states[i - 1],
            ustar_now,
            mesh,
            &problem.laws,
            &problem.op,
            tau,
            &problem.solver,
        )?;
        let prev = &states[i - 1];

        let mut mass = 0.0;
        let mut psi_total = 0.0;
        let mut philog = 0.0;
        for k in 0..n {
            let m = mesh.lumped_mass(k);
            mass += m * (next.s[k] - prev.s[k]);
            psi_total += m * problem
                .op
                .stored_energy(next.memory.row(k), mesh.nodes()[k])?;
            let du = (next.u[k] - prev.u[k]).abs();
            philog += m * du * (du / tau).ln_1p();
        }
        mass += tau * problem.laws.gamma_left * (next.u[0] - ustar_now[0]);
        mass += tau * problem.laws.gamma_right * (next.u[n - 1] - ustar_now[1]);

        rows.push(DiagnosticsRow {
            step: i,
            time: next.time,
            max_abs_u: inf_norm(&next.u),
            mass_residual: mass,
            energy_grad: mesh.gradient_energy(&next.u),
            energy_boundary: problem.laws.gamma_left * next.u[0] * next.u[0]
                + problem.laws.gamma_right * next.u[n - 1] * next.u[n - 1],
            psi_total,
            philog_increment: philog,
            solver_iters: next.iterations,
            solver_residual: next.residual,
        });
        states.push(next);
    }

    Ok(Trajectory {
        problem: problem.clone(),
        states,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Interpolants
// ---------------------------------------------------------------------------

/// Piecewise-linear (hat) or piecewise-constant (bar) time interpolation of
/// a trajectory field. Both agree with the grid values at grid times; the
/// bar interpolant takes the level-i value on (t_{i−1}, t_i].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpMode {
    Hat,
    Bar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpField {
    Pressure,
    Saturation,
}

/// Evaluation view over a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Interpolants<'a> {
    traj: &'a Trajectory,
}

impl<'a> Interpolants<'a> {
    pub fn new(traj: &'a Trajectory) -> Self {
        Self { traj }
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let t_end = self.traj.t_end();
        if !(0.0..=t_end * (1.0 + 1e-12)).contains(&t) {
            return Err(HystError::arg(format!("time {t} outside [0, {t_end}]")));
        }
        let tau = self.traj.tau();
        let frac = t / tau;
        let rounded = frac.round();
        let i = if (frac - rounded).abs() < 1e-9 {
            rounded as usize
        } else {
            frac.ceil() as usize
        };
        Ok((i.clamp(0, self.traj.steps()), frac))
    }

    fn field(&self, field: InterpField, i: usize, node: usize) -> f64 {
        let st = &self.traj.states[i];
        match field {
            InterpField::Pressure => st.u[node],
            InterpField::Saturation => st.s[node],
        }
    }

    pub fn eval(&self, field: InterpField, mode: InterpMode, node: usize, t: f64) -> Result<f64> {
        let (i, frac) = self.locate(t)?;
        if i == 0 {
            return Ok(self.field(field, 0, node));
        }
        match mode {
            InterpMode::Bar => Ok(self.field(field, i, node)),
            InterpMode::Hat => {
                let theta = (frac - (i - 1) as f64).clamp(0.0, 1.0);
                let lo = self.field(field, i - 1, node);
                let hi = self.field(field, i, node);
                Ok(lo + theta * (hi - lo))
            }
        }
    }

    /// Time derivative of the hat interpolant on (t_{i−1}, t_i):
    /// (v_i − v_{i−1})/τ.
    pub fn hat_derivative(&self, field: InterpField, node: usize, t: f64) -> Result<f64> {
        let (i, _) = self.locate(t)?;
        let i = i.max(1);
        let lo = self.field(field, i - 1, node);
        let hi = self.field(field, i, node);
        Ok((hi - lo) / self.traj.tau())
    }
}

// ---------------------------------------------------------------------------
// Initial compatibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// One compatibility item with its measured quantity.
#[derive(Debug, Clone, Serialize)]
pub struct CompatItem {
    pub name: String,
    pub status: CheckStatus,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub items: Vec<CompatItem>,
}

impl CompatReport {
    pub fn has_failures(&self) -> bool {
        self.items.iter().any(|i| i.status == CheckStatus::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.status == CheckStatus::Pass)
    }
}

/// Knobs of the compatibility checker: the scaling constant L of the
/// divergence condition and an optional nodal override for r₀.
#[derive(Debug, Clone)]
pub struct CompatOptions {
    pub scaling_l: f64,
    pub r0_override: Option<Vec<f64>>,
}

impl Default for CompatOptions {
    fn default() -> Self {
        Self {
            scaling_l: 1.0,
            r0_override: None,
        }
    }
}

/// Discrete divergence of κ(x, s₀)∇u₀ at the mesh nodes through the same P1
/// operator used in assembly: div_k = −(K u₀)_k / m_k. Only interior values
/// are meaningful; endpoints carry the boundary flux and are reported as 0.
pub fn discrete_divergence(mesh: &Mesh1D, laws: &MaterialLaws, s0: &[f64], u0: &[f64]) -> Vec<f64> {
    let n = mesh.node_count();
    let h = mesh.spacing();
    let mut ku = vec![0.0; n];
    for e in 0..n - 1 {
        let xm = 0.5 * (mesh.nodes()[e] + mesh.nodes()[e + 1]);
        let sm = 0.5 * (s0[e] + s0[e + 1]);
        let k = laws.kappa.eval(xm, sm) / h;
        let d = u0[e + 1] - u0[e];
        ku[e] += -k * d;
        ku[e + 1] += k * d;
    }
    let mut div = vec![0.0; n];
    for k in 1..n - 1 {
        div[k] = -ku[k] / mesh.lumped_mass(k);
    }
    div
}

/// Verifies the initial compatibility of a problem: memory matches u₀ at
/// r = 0, the memory curve is admissible, the divergence fits under r₀, the
/// memory slope carries the right sign on (0, r₀), the Robin data is
/// consistent at the endpoints, and the backward-step increment is bounded.
/// Report-only; callers decide what failures mean.
pub fn check_initial_compatibility(
    problem: &Problem,
    lambda_fn: &dyn Fn(f64, f64) -> f64,
    opts: &CompatOptions,
) -> Result<CompatReport> {
    let mesh = &problem.mesh;
    let n = mesh.node_count();
    let grid = problem.op.grid();
    let lambda_max = grid.lambda_max();
    let big_l = opts.scaling_l;
    let mut items = Vec::new();

    // initial saturation from the stored memory
    let mut s0 = vec![0.0; n];
    for k in 0..n {
        s0[k] = problem.op.output(problem.memory0.row(k), mesh.nodes()[k])?;
    }

    // c0: lambda(x, 0) equals the initial play input (g(u0) under an outer
    // map, u0 itself otherwise)
    {
        let mut worst = 0.0;
        let mut where_at = 0.0;
        for (k, &x) in mesh.nodes().iter().enumerate() {
            let w0 = match problem.op.outer() {
                Some(g) => g.eval(problem.u0[k]),
                None => problem.u0[k],
            };
            let gap = (lambda_fn(x, 0.0) - w0).abs();
            if gap > worst {
                worst = gap;
                where_at = x;
            }
        }
        let scale = inf_norm(&problem.u0).max(1.0);
        let threshold = 1e-9 * scale;
        items.push(CompatItem {
            name: "c0".into(),
            status: if worst <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst,
            threshold,
            detail: format!("max |lambda(x,0) - u0(x)| at x = {where_at}"),
        });
    }

    // c0a: memory-curve admissibility (1-Lipschitz in r, vanishing at the
    // support bound) and the induced s0
    {
        let dr = grid.spacing();
        let mut worst_lip: f64 = 0.0;
        let mut worst_tail: f64 = 0.0;
        for (k, &x) in mesh.nodes().iter().enumerate() {
            let row = problem.memory0.row(k);
            let mut prev = lambda_fn(x, 0.0);
            for &v in row {
                worst_lip = worst_lip.max((v - prev).abs() / dr);
                prev = v;
            }
            worst_tail = worst_tail.max(lambda_fn(x, lambda_max).abs());
        }
        let smin = s0.iter().cloned().fold(f64::INFINITY, f64::min);
        let smax = s0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lip_exceed = (worst_lip - 1.0).max(worst_tail);
        items.push(CompatItem {
            name: "c0a".into(),
            status: if lip_exceed <= 1e-9 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst_lip.max(worst_tail),
            threshold: 1.0,
            detail: format!("memory slope bound and tail; s0 in [{smin:.6}, {smax:.6}]"),
        });
    }

    let div = discrete_divergence(mesh, &problem.laws, &s0, &problem.u0);
    let r0: Vec<f64> = match &opts.r0_override {
        Some(r) => {
            if r.len() != n {
                return Err(HystError::dim("r0 override does not match the mesh"));
            }
            r.clone()
        }
        None => div
            .iter()
            .map(|d| (d.abs().sqrt() / big_l).min(lambda_max))
            .collect(),
    };

    // c1: (1/L) sqrt|div| <= r0 <= Lambda at interior nodes
    {
        let mut worst = 0.0_f64;
        for k in 1..n - 1 {
            let need = div[k].abs().sqrt() / big_l;
            worst = worst.max(need - r0[k]).max(r0[k] - lambda_max);
        }
        items.push(CompatItem {
            name: "c1".into(),
            status: if worst <= 1e-9 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst,
            threshold: 0.0,
            detail: format!(
                "max((1/L)sqrt|div| - r0, r0 - Lambda); L = {big_l}, max|div| = {:.6e}",
                div.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            ),
        });
    }

    // c2: -d(lambda)/dr in sign(div) on (0, r0) by finite differences in r
    {
        let div_tol = 1e-9 * div.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let mut tested = 0usize;
        let mut violations = 0usize;
        for k in 1..n - 1 {
            if div[k].abs() <= div_tol || r0[k] <= 0.0 {
                continue;
            }
            let want = -div[k].signum();
            let x = mesh.nodes()[k];
            let samples = 16;
            let delta = (r0[k] / 64.0).max(1e-9);
            for m in 0..samples {
                let r = (m as f64 + 0.5) * r0[k] / samples as f64;
                let slope = (lambda_fn(x, r + delta) - lambda_fn(x, r)) / delta;
                tested += 1;
                if (slope - want).abs() > 0.02 {
                    violations += 1;
                }
            }
        }
        let frac = if tested == 0 {
            0.0
        } else {
            violations as f64 / tested as f64
        };
        items.push(CompatItem {
            name: "c2".into(),
            status: if frac == 0.0 {
                CheckStatus::Pass
            } else if frac <= 0.1 {
                CheckStatus::Warn
            } else {
                CheckStatus::Fail
            },
            measured: frac,
            threshold: 0.0,
            detail: format!("{violations} of {tested} sampled memory slopes off sign(div)"),
        });
    }

    // c2a: discrete Robin compatibility at both endpoints
    {
        let h = mesh.spacing();
        let u0 = &problem.u0;
        let du_left = (u0[1] - u0[0]) / h;
        let du_right = (u0[n - 1] - u0[n - 2]) / h;
        let k_left = problem.laws.kappa.eval(0.5 * h, 0.5 * (s0[0] + s0[1]));
        let k_right = problem
            .laws
            .kappa
            .eval(mesh.length() - 0.5 * h, 0.5 * (s0[n - 1] + s0[n - 2]));
        let ustar0 = problem.laws.ustar[0];
        let left_gap = k_left * du_left - problem.laws.gamma_left * (u0[0] - ustar0[0]);
        let right_gap = -k_right * du_right - problem.laws.gamma_right * (u0[n - 1] - ustar0[1]);
        let scale = inf_norm(u0).max(problem.laws.ustar_bound).max(1.0);
        let measured = left_gap.abs().max(right_gap.abs()) / scale;
        let strict = 1e-8;
        let loose = 2.0 * h;
        items.push(CompatItem {
            name: "c2a".into(),
            status: if measured <= strict {
                CheckStatus::Pass
            } else if measured <= loose {
                CheckStatus::Warn
            } else {
                CheckStatus::Fail
            },
            measured,
            threshold: loose,
            detail: format!(
                "Robin defect left {left_gap:.3e}, right {right_gap:.3e} (one-sided differences, O(h))"
            ),
        });
    }

    // inim: backward-step increment bound. With G_{-1} := G_0 - tau*div, the
    // memory slope condition gives |u_0 - u_{-1}|/tau <= |div|/(rho_lo * r0),
    // which c1 caps at L^2*Lambda/rho_lo.
    {
        let (rho_lo, _) =
            problem
                .op
                .density()
                .sampled_bounds(mesh.nodes(), lambda_max, problem.op.range())?;
        let mut measured = 0.0_f64;
        for k in 1..n - 1 {
            if r0[k] > 1e-12 {
                measured = measured.max(div[k].abs() / (rho_lo.max(1e-300) * r0[k]));
            }
        }
        let bound = big_l * big_l * lambda_max / rho_lo.max(1e-300);
        let status = if rho_lo <= 0.0 {
            CheckStatus::Warn
        } else if measured <= bound * (1.0 + 1e-9) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        items.push(CompatItem {
            name: "inim".into(),
            status,
            measured,
            threshold: bound,
            detail: format!(
                "backward-step rate bound sup |div|/(rho_lo r0); valid for tau < {:.3e}",
                rho_lo / (2.0 * big_l * big_l)
            ),
        });
    }

    Ok(CompatReport { items })
}
