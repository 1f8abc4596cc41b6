//! Flat key-value configuration (`section.key = value`) with hypothesis-aware
//! validation, bit-exact round-tripping, and construction of a runnable
//! [`Problem`] from named material/initial-data profiles.
//!
//! Tabulated inputs come from CSV files: density tables as (r, v, rho),
//! initial memory as (x, r, lambda), boundary series as (left, right) rows —
//! comma-separated, `.` decimal point, mandatory header, LF line endings.

use crate::error::{HystError, Result};
use crate::hysteresis::{
    MemoryState, OuterFunction, OuterKind, PreisachDensity, PreisachOperator, ThresholdGrid,
};
use crate::mesh::{KappaBounds, KappaLaw, MaterialLaws, Mesh1D};
use crate::stepper::{Problem, SolverConfig};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub length: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub total: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Constant {
        value: f64,
    },
    Separable {
        space: [f64; 2],
        radial: [f64; 2],
        state: [f64; 3],
    },
    File {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OuterSpec {
    None,
    Linear { slope: f64 },
    Cubic { linear: f64, cubic: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreisachConfig {
    pub grid_count: usize,
    pub lambda_max: f64,
    pub offset: f64,
    pub density: DensitySpec,
    pub outer: OuterSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KappaSpec {
    Constant {
        value: f64,
    },
    Affine {
        base: f64,
        slope_x: f64,
        slope_s: f64,
        lower: f64,
        upper: f64,
        lipschitz: f64,
    },
    Saturating {
        lower: f64,
        upper: f64,
        rate: f64,
        midpoint: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum UstarSpec {
    Constant {
        left: f64,
        right: f64,
    },
    Ramp {
        left_start: f64,
        left_end: f64,
        right_start: f64,
        right_end: f64,
    },
    Sinusoid {
        mean_left: f64,
        amp_left: f64,
        mean_right: f64,
        amp_right: f64,
        cycles: f64,
        phase: f64,
    },
    File {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawsConfig {
    pub kappa: KappaSpec,
    pub gamma_left: f64,
    pub gamma_right: f64,
    pub ustar: UstarSpec,
    /// Declared bound U*; when absent it is computed from the series.
    pub ustar_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPressureSpec {
    Constant {
        value: f64,
    },
    /// u₀(x) = base + amplitude·(x/L − 1/2)²; convex for amplitude > 0.
    Quadratic {
        base: f64,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    /// The memory left by a monotone excursion from the virgin state to the
    /// initial pressure: λ(x, r) = sign(w₀)·max(|w₀(x)| − r, 0) with
    /// w₀ = g(u₀) when an outer map is configured, w₀ = u₀ otherwise.
    History,
    /// λ ≡ 0 (requires u₀ ≡ 0 for the memory to match the initial pressure).
    Virgin,
    /// Tabulated (x, r) memory curve; given in the mapped variable w = g(u)
    /// when an outer map is configured.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub u0: InitialPressureSpec,
    pub lambda: LambdaSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub snapshot_stride: usize,
    pub memory_snapshots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub mesh: MeshConfig,
    pub time: TimeConfig,
    pub preisach: PreisachConfig,
    pub laws: LawsConfig,
    pub initial: InitialConfig,
    pub solver: SolverConfig,
    pub compat_l: f64,
    pub output: OutputConfig,
    /// Directory against which file references are resolved.
    pub base_dir: PathBuf,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct KeyValues {
    entries: BTreeMap<String, (String, usize)>,
    consumed: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| HystError::Parse {
                line,
                message: format!("expected `key = value`, got `{stripped}`"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(HystError::Parse {
                    line,
                    message: "empty key or value".into(),
                });
            }
            if entries.insert(key.clone(), (value, line)).is_some() {
                return Err(HystError::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self {
            entries,
            consumed: Default::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.consumed.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn require(&self, key: &str, missing: &mut Vec<String>) -> Option<&str> {
        let v = self.raw(key);
        if v.is_none() {
            missing.push(format!("missing required key `{key}`"));
        }
        v
    }

    fn f64_at(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let line = self.entries[key].1;
                v.parse::<f64>().map(Some).map_err(|_| HystError::Parse {
                    line,
                    message: format!("`{key}` expects a number, got `{v}`"),
                })
            }
        }
    }

    fn usize_at(&self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let line = self.entries[key].1;
                v.parse::<usize>().map(Some).map_err(|_| HystError::Parse {
                    line,
                    message: format!("`{key}` expects a nonnegative integer, got `{v}`"),
                })
            }
        }
    }

    fn bool_at(&self, key: &str) -> Result<Option<bool>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let line = self.entries[key].1;
                match v {
                    "true" => Ok(Some(true)),
                    "false" => Ok(Some(false)),
                    _ => Err(HystError::Parse {
                        line,
                        message: format!("`{key}` expects true/false, got `{v}`"),
                    }),
                }
            }
        }
    }

    fn reject_unknown(&self) -> Result<()> {
        let consumed = self.consumed.borrow();
        for (key, (_, line)) in &self.entries {
            if !consumed.contains(key) {
                return Err(HystError::Parse {
                    line: *line,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }
}

impl SimulationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse_with_base(&text, base)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse_with_base(text, PathBuf::from("."))
    }

    pub fn parse_with_base(text: &str, base_dir: PathBuf) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let mut missing = Vec::new();

        let mesh = MeshConfig {
            length: kv
                .require("mesh.length", &mut missing)
                .map(|_| kv.f64_at("mesh.length"))
                .transpose()?
                .flatten()
                .unwrap_or(1.0),
            nodes: kv
                .require("mesh.nodes", &mut missing)
                .map(|_| kv.usize_at("mesh.nodes"))
                .transpose()?
                .flatten()
                .unwrap_or(2),
        };
        let time = TimeConfig {
            total: kv
                .require("time.total", &mut missing)
                .map(|_| kv.f64_at("time.total"))
                .transpose()?
                .flatten()
                .unwrap_or(1.0),
            steps: kv
                .require("time.steps", &mut missing)
                .map(|_| kv.usize_at("time.steps"))
                .transpose()?
                .flatten()
                .unwrap_or(1),
        };

        let density = match kv.require("preisach.density.kind", &mut missing) {
            Some("constant") => DensitySpec::Constant {
                value: kv.f64_at("preisach.density.value")?.unwrap_or(1.0),
            },
            Some("separable") => DensitySpec::Separable {
                space: [
                    kv.f64_at("preisach.density.space0")?.unwrap_or(1.0),
                    kv.f64_at("preisach.density.space1")?.unwrap_or(0.0),
                ],
                radial: [
                    kv.f64_at("preisach.density.radial0")?.unwrap_or(1.0),
                    kv.f64_at("preisach.density.radial1")?.unwrap_or(0.0),
                ],
                state: [
                    kv.f64_at("preisach.density.state0")?.unwrap_or(1.0),
                    kv.f64_at("preisach.density.state1")?.unwrap_or(0.0),
                    kv.f64_at("preisach.density.state2")?.unwrap_or(0.0),
                ],
            },
            Some("tabulated") => DensitySpec::File {
                path: kv
                    .require("preisach.density.file", &mut missing)
                    .unwrap_or("")
                    .to_string(),
            },
            Some(other) => {
                missing.push(format!("unknown density kind `{other}`"));
                DensitySpec::Constant { value: 1.0 }
            }
            None => DensitySpec::Constant { value: 1.0 },
        };
        let outer = match kv.raw("preisach.outer.kind") {
            None | Some("none") => OuterSpec::None,
            Some("linear") => OuterSpec::Linear {
                slope: kv.f64_at("preisach.outer.slope")?.unwrap_or(1.0),
            },
            Some("cubic") => OuterSpec::Cubic {
                linear: kv.f64_at("preisach.outer.linear")?.unwrap_or(1.0),
                cubic: kv.f64_at("preisach.outer.cubic")?.unwrap_or(0.0),
            },
            Some(other) => {
                missing.push(format!("unknown outer kind `{other}`"));
                OuterSpec::None
            }
        };
        let preisach = PreisachConfig {
            grid_count: kv.usize_at("preisach.grid_count")?.unwrap_or(128),
            lambda_max: kv
                .require("preisach.lambda_max", &mut missing)
                .map(|_| kv.f64_at("preisach.lambda_max"))
                .transpose()?
                .flatten()
                .unwrap_or(1.0),
            offset: kv
                .require("preisach.offset", &mut missing)
                .map(|_| kv.f64_at("preisach.offset"))
                .transpose()?
                .flatten()
                .unwrap_or(0.5),
            density,
            outer,
        };

        let kappa = match kv.require("laws.kappa.kind", &mut missing) {
            Some("constant") => KappaSpec::Constant {
                value: kv.f64_at("laws.kappa.value")?.unwrap_or(1.0),
            },
            Some("affine") => KappaSpec::Affine {
                base: kv.f64_at("laws.kappa.base")?.unwrap_or(1.0),
                slope_x: kv.f64_at("laws.kappa.slope_x")?.unwrap_or(0.0),
                slope_s: kv.f64_at("laws.kappa.slope_s")?.unwrap_or(0.0),
                lower: kv.f64_at("laws.kappa.lower")?.unwrap_or(0.1),
                upper: kv.f64_at("laws.kappa.upper")?.unwrap_or(10.0),
                lipschitz: kv.f64_at("laws.kappa.lipschitz")?.unwrap_or(1.0),
            },
            Some("saturating") => KappaSpec::Saturating {
                lower: kv.f64_at("laws.kappa.lower")?.unwrap_or(0.5),
                upper: kv.f64_at("laws.kappa.upper")?.unwrap_or(2.0),
                rate: kv.f64_at("laws.kappa.rate")?.unwrap_or(1.0),
                midpoint: kv.f64_at("laws.kappa.midpoint")?.unwrap_or(0.5),
            },
            Some(other) => {
                missing.push(format!("unknown kappa kind `{other}`"));
                KappaSpec::Constant { value: 1.0 }
            }
            None => KappaSpec::Constant { value: 1.0 },
        };
        let ustar = match kv.require("laws.ustar.kind", &mut missing) {
            Some("constant") => UstarSpec::Constant {
                left: kv.f64_at("laws.ustar.left")?.unwrap_or(0.0),
                right: kv.f64_at("laws.ustar.right")?.unwrap_or(0.0),
            },
            Some("ramp") => UstarSpec::Ramp {
                left_start: kv.f64_at("laws.ustar.left_start")?.unwrap_or(0.0),
                left_end: kv.f64_at("laws.ustar.left_end")?.unwrap_or(0.0),
                right_start: kv.f64_at("laws.ustar.right_start")?.unwrap_or(0.0),
                right_end: kv.f64_at("laws.ustar.right_end")?.unwrap_or(0.0),
            },
            Some("sinusoid") => UstarSpec::Sinusoid {
                mean_left: kv.f64_at("laws.ustar.mean_left")?.unwrap_or(0.0),
                amp_left: kv.f64_at("laws.ustar.amp_left")?.unwrap_or(0.0),
                mean_right: kv.f64_at("laws.ustar.mean_right")?.unwrap_or(0.0),
                amp_right: kv.f64_at("laws.ustar.amp_right")?.unwrap_or(0.0),
                cycles: kv.f64_at("laws.ustar.cycles")?.unwrap_or(1.0),
                phase: kv.f64_at("laws.ustar.phase")?.unwrap_or(0.0),
            },
            Some("file") => UstarSpec::File {
                path: kv
                    .require("laws.ustar.file", &mut missing)
                    .unwrap_or("")
                    .to_string(),
            },
            Some(other) => {
                missing.push(format!("unknown ustar kind `{other}`"));
                UstarSpec::Constant {
                    left: 0.0,
                    right: 0.0,
                }
            }
            None => UstarSpec::Constant {
                left: 0.0,
                right: 0.0,
            },
        };
        let laws = LawsConfig {
            kappa,
            gamma_left: kv
                .require("laws.gamma_left", &mut missing)
                .map(|_| kv.f64_at("laws.gamma_left"))
                .transpose()?
                .flatten()
                .unwrap_or(0.0),
            gamma_right: kv
                .require("laws.gamma_right", &mut missing)
                .map(|_| kv.f64_at("laws.gamma_right"))
                .transpose()?
                .flatten()
                .unwrap_or(0.0),
            ustar,
            ustar_bound: kv.f64_at("laws.ustar.bound")?,
        };

        let u0 = match kv.require("initial.u0.kind", &mut missing) {
            Some("constant") => InitialPressureSpec::Constant {
                value: kv.f64_at("initial.u0.value")?.unwrap_or(0.0),
            },
            Some("quadratic") => InitialPressureSpec::Quadratic {
                base: kv.f64_at("initial.u0.base")?.unwrap_or(0.0),
                amplitude: kv.f64_at("initial.u0.amplitude")?.unwrap_or(0.0),
            },
            Some(other) => {
                missing.push(format!("unknown u0 kind `{other}`"));
                InitialPressureSpec::Constant { value: 0.0 }
            }
            None => InitialPressureSpec::Constant { value: 0.0 },
        };
        let lambda = match kv.raw("initial.lambda.kind") {
            None | Some("history") => LambdaSpec::History,
            Some("virgin") => LambdaSpec::Virgin,
            Some("file") => LambdaSpec::File {
                path: kv
                    .require("initial.lambda.file", &mut missing)
                    .unwrap_or("")
                    .to_string(),
            },
            Some(other) => {
                missing.push(format!("unknown lambda kind `{other}`"));
                LambdaSpec::History
            }
        };
        let initial = InitialConfig { u0, lambda };

        let solver = SolverConfig {
            tol: kv.f64_at("solver.tol")?.unwrap_or(1e-10),
            max_iter: kv.usize_at("solver.max_iter")?.unwrap_or(200),
            relaxation: kv.f64_at("solver.relaxation")?.unwrap_or(0.8),
            max_retries: kv.usize_at("solver.max_retries")?.unwrap_or(3),
        };
        let compat_l = kv.f64_at("compat.l")?.unwrap_or(1.0);
        let output = OutputConfig {
            directory: kv.raw("output.directory").unwrap_or("out").to_string(),
            snapshot_stride: kv.usize_at("output.snapshot_stride")?.unwrap_or(10),
            memory_snapshots: kv.bool_at("output.memory_snapshots")?.unwrap_or(false),
        };

        kv.reject_unknown()?;
        if !missing.is_empty() {
            return Err(HystError::Validation(missing));
        }

        let config = Self {
            mesh,
            time,
            preisach,
            laws,
            initial,
            solver,
            compat_l,
            output,
            base_dir,
        };
        let violations = config.validate();
        if violations.is_empty() {
            Ok(config)
        } else {
            Err(HystError::Validation(violations))
        }
    }

    /// Canonical flat rendering; `parse_str(write_string(c))` reproduces `c`
    /// field by field.
    pub fn write_string(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("mesh.length", self.mesh.length.to_string());
        push("mesh.nodes", self.mesh.nodes.to_string());
        push("time.total", self.time.total.to_string());
        push("time.steps", self.time.steps.to_string());
        push("preisach.grid_count", self.preisach.grid_count.to_string());
        push("preisach.lambda_max", self.preisach.lambda_max.to_string());
        push("preisach.offset", self.preisach.offset.to_string());
        match &self.preisach.density {
            DensitySpec::Constant { value } => {
                push("preisach.density.kind", "constant".into());
                push("preisach.density.value", value.to_string());
            }
            DensitySpec::Separable {
                space,
                radial,
                state,
            } => {
                push("preisach.density.kind", "separable".into());
                push("preisach.density.space0", space[0].to_string());
                push("preisach.density.space1", space[1].to_string());
                push("preisach.density.radial0", radial[0].to_string());
                push("preisach.density.radial1", radial[1].to_string());
                push("preisach.density.state0", state[0].to_string());
                push("preisach.density.state1", state[1].to_string());
                push("preisach.density.state2", state[2].to_string());
            }
            DensitySpec::File { path } => {
                push("preisach.density.kind", "tabulated".into());
                push("preisach.density.file", path.clone());
            }
        }
        match &self.preisach.outer {
            OuterSpec::None => push("preisach.outer.kind", "none".into()),
            OuterSpec::Linear { slope } => {
                push("preisach.outer.kind", "linear".into());
                push("preisach.outer.slope", slope.to_string());
            }
            OuterSpec::Cubic { linear, cubic } => {
                push("preisach.outer.kind", "cubic".into());
                push("preisach.outer.linear", linear.to_string());
                push("preisach.outer.cubic", cubic.to_string());
            }
        }
        match &self.laws.kappa {
            KappaSpec::Constant { value } => {
                push("laws.kappa.kind", "constant".into());
                push("laws.kappa.value", value.to_string());
            }
            KappaSpec::Affine {
                base,
                slope_x,
                slope_s,
                lower,
                upper,
                lipschitz,
            } => {
                push("laws.kappa.kind", "affine".into());
                push("laws.kappa.base", base.to_string());
                push("laws.kappa.slope_x", slope_x.to_string());
                push("laws.kappa.slope_s", slope_s.to_string());
                push("laws.kappa.lower", lower.to_string());
                push("laws.kappa.upper", upper.to_string());
                push("laws.kappa.lipschitz", lipschitz.to_string());
            }
            KappaSpec::Saturating {
                lower,
                upper,
                rate,
                midpoint,
            } => {
                push("laws.kappa.kind", "saturating".into());
                push("laws.kappa.lower", lower.to_string());
                push("laws.kappa.upper", upper.to_string());
                push("laws.kappa.rate", rate.to_string());
                push("laws.kappa.midpoint", midpoint.to_string());
            }
        }
        push("laws.gamma_left", self.laws.gamma_left.to_string());
        push("laws.gamma_right", self.laws.gamma_right.to_string());
        match &self.laws.ustar {
            UstarSpec::Constant { left, right } => {
                push("laws.ustar.kind", "constant".into());
                push("laws.ustar.left", left.to_string());
                push("laws.ustar.right", right.to_string());
            }
            UstarSpec::Ramp {
                left_start,
                left_end,
                right_start,
                right_end,
            } => {
                push("laws.ustar.kind", "ramp".into());
                push("laws.ustar.left_start", left_start.to_string());
                push("laws.ustar.left_end", left_end.to_string());
                push("laws.ustar.right_start", right_start.to_string());
                push("laws.ustar.right_end", right_end.to_string());
            }
            UstarSpec::Sinusoid {
                mean_left,
                amp_left,
                mean_right,
                amp_right,
                cycles,
                phase,
            } => {
                push("laws.ustar.kind", "sinusoid".into());
                push("laws.ustar.mean_left", mean_left.to_string());
                push("laws.ustar.amp_left", amp_left.to_string());
                push("laws.ustar.mean_right", mean_right.to_string());
                push("laws.ustar.amp_right", amp_right.to_string());
                push("laws.ustar.cycles", cycles.to_string());
                push("laws.ustar.phase", phase.to_string());
            }
            UstarSpec::File { path } => {
                push("laws.ustar.kind", "file".into());
                push("laws.ustar.file", path.clone());
            }
        }
        if let Some(b) = self.laws.ustar_bound {
            push("laws.ustar.bound", b.to_string());
        }
        match &self.initial.u0 {
            InitialPressureSpec::Constant { value } => {
                push("initial.u0.kind", "constant".into());
                push("initial.u0.value", value.to_string());
            }
            InitialPressureSpec::Quadratic { base, amplitude } => {
                push("initial.u0.kind", "quadratic".into());
                push("initial.u0.base", base.to_string());
                push("initial.u0.amplitude", amplitude.to_string());
            }
        }
        match &self.initial.lambda {
            LambdaSpec::History => push("initial.lambda.kind", "history".into()),
            LambdaSpec::Virgin => push("initial.lambda.kind", "virgin".into()),
            LambdaSpec::File { path } => {
                push("initial.lambda.kind", "file".into());
                push("initial.lambda.file", path.clone());
            }
        }
        push("solver.tol", self.solver.tol.to_string());
        push("solver.max_iter", self.solver.max_iter.to_string());
        push("solver.relaxation", self.solver.relaxation.to_string());
        push("solver.max_retries", self.solver.max_retries.to_string());
        push("compat.l", self.compat_l.to_string());
        push("output.directory", self.output.directory.clone());
        push(
            "output.snapshot_stride",
            self.output.snapshot_stride.to_string(),
        );
        push(
            "output.memory_snapshots",
            self.output.memory_snapshots.to_string(),
        );
        out
    }

    /// Structural validation with hypothesis tags; file contents are checked
    /// later, at build time.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.mesh.length > 0.0) {
            v.push("mesh: length must be positive".into());
        }
        if self.mesh.nodes < 2 {
            v.push("mesh: need at least 2 nodes".into());
        }
        if !(self.time.total > 0.0) {
            v.push("time: total must be positive".into());
        }
        if self.time.steps == 0 {
            v.push("time: need at least one step".into());
        }
        if self.preisach.grid_count == 0 {
            v.push("preisach: threshold grid count must be positive".into());
        }
        if !(self.preisach.lambda_max > 0.0) {
            v.push("hy1: memory support bound Lambda must be positive".into());
        }
        if self.laws.gamma_left < 0.0 || self.laws.gamma_right < 0.0 {
            v.push("hy2: boundary permeability must be nonnegative".into());
        }
        if !(self.laws.gamma_left + self.laws.gamma_right > 0.0) {
            v.push("hy2: gamma integral zero (gamma_left + gamma_right must be positive)".into());
        }
        if !(self.solver.tol > 0.0)
            || !(self.solver.relaxation > 0.0)
            || self.solver.relaxation > 1.0
            || self.solver.max_iter == 0
        {
            v.push("solver: tol > 0, 0 < relaxation <= 1, max_iter > 0 required".into());
        }
        if !(self.compat_l > 0.0) {
            v.push("compat: scaling constant L must be positive".into());
        }
        if self.output.snapshot_stride == 0 {
            v.push("output: snapshot stride must be positive".into());
        }
        // hy1: sup |u0| <= Lambda, and the same for the mapped play input
        // w0 = g(u0), which is what the initial memory curve must support.
        let u0_extremes = match &self.initial.u0 {
            InitialPressureSpec::Constant { value } => [*value, *value],
            InitialPressureSpec::Quadratic { base, amplitude } => [*base, base + 0.25 * amplitude],
        };
        let sup_u0 = u0_extremes[0].abs().max(u0_extremes[1].abs());
        let sup_w0 = self
            .outer_eval(u0_extremes[0])
            .abs()
            .max(self.outer_eval(u0_extremes[1]).abs());
        if sup_u0.max(sup_w0) > self.preisach.lambda_max * (1.0 + 1e-12) {
            v.push(format!(
                "hy1: sup|u0| = {sup_u0} (mapped {sup_w0}) exceeds Lambda = {}",
                self.preisach.lambda_max
            ));
        }
        if matches!(self.initial.lambda, LambdaSpec::Virgin) && sup_u0 > 0.0 {
            v.push("hy1: virgin memory requires u0 = 0 (lambda(x,0) must equal u0)".into());
        }
        v
    }

    // -- evaluators ---------------------------------------------------------

    pub fn u0_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        let length = self.mesh.length;
        let spec = self.initial.u0.clone();
        move |x: f64| match spec {
            InitialPressureSpec::Constant { value } => value,
            InitialPressureSpec::Quadratic { base, amplitude } => {
                let t = x / length - 0.5;
                base + amplitude * t * t
            }
        }
    }

    fn outer_eval(&self, u: f64) -> f64 {
        match &self.preisach.outer {
            OuterSpec::None => u,
            OuterSpec::Linear { slope } => slope * u,
            OuterSpec::Cubic { linear, cubic } => linear * u + cubic * u * u * u,
        }
    }

    /// The initial memory curve λ(x, r) as a closure; file tables are
    /// loaded eagerly. Memory curves live in the play-input variable, i.e.
    /// in w = g(u) when an outer map is configured.
    pub fn lambda_fn(&self) -> Result<Box<dyn Fn(f64, f64) -> f64>> {
        match &self.initial.lambda {
            LambdaSpec::Virgin => Ok(Box::new(|_x, _r| 0.0)),
            LambdaSpec::History => {
                let length = self.mesh.length;
                let spec = self.initial.u0.clone();
                let outer = self.preisach.outer.clone();
                Ok(Box::new(move |x, r| {
                    let u0 = match spec {
                        InitialPressureSpec::Constant { value } => value,
                        InitialPressureSpec::Quadratic { base, amplitude } => {
                            let t = x / length - 0.5;
                            base + amplitude * t * t
                        }
                    };
                    let w0 = match &outer {
                        OuterSpec::None => u0,
                        OuterSpec::Linear { slope } => slope * u0,
                        OuterSpec::Cubic { linear, cubic } => linear * u0 + cubic * u0 * u0 * u0,
                    };
                    w0.signum() * (w0.abs() - r).max(0.0)
                }))
            }
            LambdaSpec::File { path } => {
                let table = load_lambda_table(&self.base_dir.join(path))?;
                Ok(Box::new(move |x, r| table.eval(x, r)))
            }
        }
    }

    /// Builds the runnable problem: mesh, operator, material laws with the
    /// sampled boundary series, and the initial memory.
    pub fn build(&self) -> Result<Problem> {
        let mesh = Mesh1D::new(self.mesh.length, self.mesh.nodes)?;
        let grid = ThresholdGrid::new(self.preisach.grid_count, self.preisach.lambda_max)?;

        let density = match &self.preisach.density {
            DensitySpec::Constant { value } => {
                if !(*value > 0.0) {
                    return Err(HystError::Validation(vec![
                        "regularity: density must be positive".into(),
                    ]));
                }
                PreisachDensity::Constant { value: *value }
            }
            DensitySpec::Separable {
                space,
                radial,
                state,
            } => PreisachDensity::Separable {
                space: *space,
                radial: *radial,
                state: *state,
            },
            DensitySpec::File { path } => load_density_table(&self.base_dir.join(path))?,
        };

        // boundary series and its bound
        let steps = self.time.steps;
        let ustar: Vec<[f64; 2]> = match &self.laws.ustar {
            UstarSpec::Constant { left, right } => vec![[*left, *right]; steps + 1],
            UstarSpec::Ramp {
                left_start,
                left_end,
                right_start,
                right_end,
            } => (0..=steps)
                .map(|i| {
                    let t = i as f64 / steps as f64;
                    [
                        left_start + (left_end - left_start) * t,
                        right_start + (right_end - right_start) * t,
                    ]
                })
                .collect(),
            UstarSpec::Sinusoid {
                mean_left,
                amp_left,
                mean_right,
                amp_right,
                cycles,
                phase,
            } => (0..=steps)
                .map(|i| {
                    let t = i as f64 / steps as f64;
                    let arg = 2.0 * std::f64::consts::PI * cycles * t + phase;
                    [
                        mean_left + amp_left * arg.sin(),
                        mean_right + amp_right * arg.sin(),
                    ]
                })
                .collect(),
            UstarSpec::File { path } => {
                let series = load_ustar_series(&self.base_dir.join(path))?;
                if series.len() != steps + 1 {
                    return Err(HystError::dim(format!(
                        "boundary series has {} rows, need steps + 1 = {}",
                        series.len(),
                        steps + 1
                    )));
                }
                series
            }
        };
        let sup_ustar = ustar
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let ustar_bound = self.laws.ustar_bound.unwrap_or(sup_ustar);

        let range = ustar_bound.max(self.preisach.lambda_max);
        let outer = match &self.preisach.outer {
            OuterSpec::None => None,
            OuterSpec::Linear { slope } => Some(OuterFunction::new(
                OuterKind::Linear { slope: *slope },
                range,
            )?),
            OuterSpec::Cubic { linear, cubic } => Some(OuterFunction::new(
                OuterKind::CubicOdd {
                    linear: *linear,
                    cubic: *cubic,
                },
                range,
            )?),
        };
        let op = PreisachOperator::new(grid.clone(), density, self.preisach.offset, outer, range)?;

        let kappa = match &self.laws.kappa {
            KappaSpec::Constant { value } => KappaLaw::Constant { value: *value },
            KappaSpec::Affine {
                base,
                slope_x,
                slope_s,
                lower,
                upper,
                lipschitz,
            } => KappaLaw::Affine {
                base: *base,
                slope_x: *slope_x,
                slope_s: *slope_s,
                declared: KappaBounds {
                    lower: *lower,
                    upper: *upper,
                    lipschitz: *lipschitz,
                },
            },
            KappaSpec::Saturating {
                lower,
                upper,
                rate,
                midpoint,
            } => KappaLaw::Saturating {
                lower: *lower,
                upper: *upper,
                rate: *rate,
                midpoint: *midpoint,
            },
        };
        let laws = MaterialLaws {
            kappa,
            gamma_left: self.laws.gamma_left,
            gamma_right: self.laws.gamma_right,
            ustar,
            ustar_bound,
        };

        // validate material laws against the operating envelope (hy2)
        let (rho_lo, rho_hi) =
            op.density()
                .sampled_bounds(mesh.nodes(), grid.lambda_max(), range)?;
        if !(rho_lo > 0.0) {
            return Err(HystError::Validation(vec![format!(
                "regularity: density reaches {rho_lo} on the operating box; must be positive"
            )]));
        }
        let s_span = rho_hi * range * range / 2.0;
        let mut violations = laws.kappa.validate(
            mesh.length(),
            self.preisach.offset - s_span,
            self.preisach.offset + s_span,
        );
        violations.extend(laws.validate());
        if let Some(g) = op.outer() {
            if g.check_bounds(64) > 1e-6 {
                violations.push("convexifiable: outer function violates its bounds".into());
            }
        }
        if !violations.is_empty() {
            return Err(HystError::Validation(violations));
        }

        let u0_fn = self.u0_fn();
        let u0: Vec<f64> = mesh.nodes().iter().map(|&x| u0_fn(x)).collect();
        let lambda = self.lambda_fn()?;
        let memory0 = MemoryState::from_profile(mesh.nodes(), &grid, &*lambda);

        Ok(Problem {
            mesh,
            laws,
            op,
            u0,
            memory0,
            t_end: self.time.total,
            steps: self.time.steps,
            solver: self.solver,
        })
    }
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

fn read_csv_rows(path: &Path, expected_header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| HystError::Parse {
        line: 1,
        message: format!("{}: empty file", path.display()),
    })?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    if cols != expected_header {
        return Err(HystError::Parse {
            line: 1,
            message: format!(
                "{}: expected header `{}`, got `{header}`",
                path.display(),
                expected_header.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(expected_header.len());
        for part in line.split(',') {
            row.push(part.trim().parse::<f64>().map_err(|_| HystError::Parse {
                line: idx + 1,
                message: format!("{}: bad number `{part}`", path.display()),
            })?);
        }
        if row.len() != expected_header.len() {
            return Err(HystError::Parse {
                line: idx + 1,
                message: format!(
                    "{}: expected {} columns",
                    path.display(),
                    expected_header.len()
                ),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

fn unique_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    v
}

fn load_density_table(path: &Path) -> Result<PreisachDensity> {
    let rows = read_csv_rows(path, &["r", "v", "rho"])?;
    let r_nodes = unique_sorted(rows.iter().map(|r| r[0]));
    let v_nodes = unique_sorted(rows.iter().map(|r| r[1]));
    let mut values = vec![f64::NAN; r_nodes.len() * v_nodes.len()];
    let locate = |nodes: &[f64], x: f64| -> Option<usize> {
        nodes
            .iter()
            .position(|&n| (n - x).abs() <= 1e-12 * n.abs().max(1.0))
    };
    for row in &rows {
        let i = locate(&r_nodes, row[0]).unwrap();
        let j = locate(&v_nodes, row[1]).unwrap();
        values[i * v_nodes.len() + j] = row[2];
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(HystError::arg(format!(
            "{}: density table is not a full (r, v) grid",
            path.display()
        )));
    }
    PreisachDensity::tabulated(r_nodes, v_nodes, values)
}

/// Bilinear (x, r) table of the initial memory curve, clamped at the edges.
pub struct LambdaTable {
    x_nodes: Vec<f64>,
    r_nodes: Vec<f64>,
    values: Vec<f64>,
}

impl LambdaTable {
    pub fn eval(&self, x: f64, r: f64) -> f64 {
        let xi = bracket_clamped(&self.x_nodes, x);
        let ri = bracket_clamped(&self.r_nodes, r);
        let nr = self.r_nodes.len();
        let f = |i: usize, j: usize| self.values[i * nr + j];
        let (i, tx) = xi;
        let (j, tr) = ri;
        f(i, j) * (1.0 - tx) * (1.0 - tr)
            + f(i, j + 1) * (1.0 - tx) * tr
            + f(i + 1, j) * tx * (1.0 - tr)
            + f(i + 1, j + 1) * tx * tr
    }
}

fn bracket_clamped(nodes: &[f64], x: f64) -> (usize, f64) {
    let n = nodes.len();
    if x <= nodes[0] {
        return (0, 0.0);
    }
    if x >= nodes[n - 1] {
        return (n - 2, 1.0);
    }
    let mut i = 0;
    while i + 2 < n && nodes[i + 1] <= x {
        i += 1;
    }
    let t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    (i, t)
}

fn load_lambda_table(path: &Path) -> Result<LambdaTable> {
    let rows = read_csv_rows(path, &["x", "r", "lambda"])?;
    let x_nodes = unique_sorted(rows.iter().map(|r| r[0]));
    let r_nodes = unique_sorted(rows.iter().map(|r| r[1]));
    if x_nodes.len() < 2 || r_nodes.len() < 2 {
        return Err(HystError::arg(format!(
            "{}: memory table needs at least a 2x2 grid",
            path.display()
        )));
    }
    let mut values = vec![f64::NAN; x_nodes.len() * r_nodes.len()];
    let locate = |nodes: &[f64], x: f64| -> usize {
        nodes
            .iter()
            .position(|&n| (n - x).abs() <= 1e-12 * n.abs().max(1.0))
            .unwrap()
    };
    for row in &rows {
        let i = locate(&x_nodes, row[0]);
        let j = locate(&r_nodes, row[1]);
        values[i * r_nodes.len() + j] = row[2];
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(HystError::arg(format!(
            "{}: memory table is not a full (x, r) grid",
            path.display()
        )));
    }
    Ok(LambdaTable {
        x_nodes,
        r_nodes,
        values,
    })
}

fn load_ustar_series(path: &Path) -> Result<Vec<[f64; 2]>> {
    let rows = read_csv_rows(path, &["left", "right"])?;
    Ok(rows.iter().map(|r| [r[0], r[1]]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn minimal_config_text() -> &'static str {
        "mesh.length = 1.0\n\
         mesh.nodes = 11\n\
         time.total = 1.0\n\
         time.steps = 10\n\
         preisach.lambda_max = 1.0\n\
         preisach.offset = 0.5\n\
         preisach.density.kind = constant\n\
         preisach.density.value = 1.0\n\
         laws.kappa.kind = constant\n\
         laws.kappa.value = 1.0\n\
         laws.gamma_left = 1.0\n\
         laws.gamma_right = 1.0\n\
         laws.ustar.kind = constant\n\
         laws.ustar.left = 0.2\n\
         laws.ustar.right = 0.2\n\
         initial.u0.kind = constant\n\
         initial.u0.value = 0.2\n"
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = SimulationConfig::parse_str(minimal_config_text()).unwrap();
        assert_eq!(cfg.solver.tol, 1e-10);
        assert_eq!(cfg.solver.relaxation, 0.8);
        assert_eq!(cfg.solver.max_iter, 200);
        assert_eq!(cfg.preisach.grid_count, 128);
        assert!(matches!(cfg.initial.lambda, LambdaSpec::History));
        let problem = cfg.build().unwrap();
        assert_eq!(problem.mesh.node_count(), 11);
        assert_eq!(problem.laws.ustar.len(), 11);
        assert_eq!(problem.op.range(), 1.0);
    }

    #[test]
    fn zero_gamma_rejected_with_tag() {
        let text = minimal_config_text()
            .replace("laws.gamma_left = 1.0", "laws.gamma_left = 0.0")
            .replace("laws.gamma_right = 1.0", "laws.gamma_right = 0.0");
        match SimulationConfig::parse_str(&text) {
            Err(HystError::Validation(v)) => {
                assert!(v.iter().any(|m| m.starts_with("hy2:")), "{v:?}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn oversized_initial_pressure_rejected_with_tag() {
        let text =
            minimal_config_text().replace("initial.u0.value = 0.2", "initial.u0.value = 1.5");
        match SimulationConfig::parse_str(&text) {
            Err(HystError::Validation(v)) => {
                assert!(v.iter().any(|m| m.starts_with("hy1:")), "{v:?}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "mesh.length = 1.0\nmesh.nodes eleven\n";
        match SimulationConfig::parse_str(text) {
            Err(HystError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{}mesh.spacing = 0.1\n", minimal_config_text());
        assert!(matches!(
            SimulationConfig::parse_str(&text),
            Err(HystError::Parse { .. })
        ));
    }

    #[test]
    fn roundtrip_identity() {
        let mut cfg = SimulationConfig::parse_str(minimal_config_text()).unwrap();
        cfg.laws.ustar = UstarSpec::Sinusoid {
            mean_left: 0.2,
            amp_left: 0.15,
            mean_right: 0.2,
            amp_right: 0.0,
            cycles: 2.0,
            phase: 0.5,
        };
        cfg.laws.ustar_bound = Some(0.5);
        cfg.preisach.outer = OuterSpec::Cubic {
            linear: 1.0,
            cubic: 0.1,
        };
        cfg.initial.u0 = InitialPressureSpec::Quadratic {
            base: 0.2,
            amplitude: 0.04,
        };
        cfg.solver.tol = 1e-11;
        let text = cfg.write_string();
        let back = SimulationConfig::parse_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn build_validates_kappa_envelope() {
        let text = minimal_config_text().replace(
            "laws.kappa.kind = constant\nlaws.kappa.value = 1.0\n",
            "laws.kappa.kind = affine\nlaws.kappa.base = 0.1\nlaws.kappa.slope_s = -0.5\n\
             laws.kappa.lower = 0.05\nlaws.kappa.upper = 0.2\nlaws.kappa.lipschitz = 0.6\n",
        );
        // kappa goes negative over the saturation envelope [0, 1]
        let cfg = SimulationConfig::parse_str(&text).unwrap();
        match cfg.build() {
            Err(HystError::Validation(v)) => {
                assert!(v.iter().any(|m| m.starts_with("hy2:")), "{v:?}")
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }
}
