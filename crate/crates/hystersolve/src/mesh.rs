//! 1-D P1 finite elements with mass lumping: mesh, material laws,
//! saturation-dependent stiffness, Robin boundary terms, and the Thomas
//! solver for the resulting tridiagonal systems.
//!
//! Mass lumping makes the hysteresis term act nodewise, which is what allows
//! the play-state memory to be threaded through time steps per node.

use crate::error::{HystError, Result};

/// Uniform mesh on Ω = (0, L) with n ≥ 2 nodes and spacing h = L/(n−1).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    length: f64,
    nodes: Vec<f64>,
    spacing: f64,
}

impl Mesh1D {
    pub fn new(length: f64, node_count: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(HystError::arg(format!(
                "mesh length must be positive, got {length}"
            )));
        }
        if node_count < 2 {
            return Err(HystError::arg("mesh needs at least 2 nodes"));
        }
        let spacing = length / (node_count - 1) as f64;
        let mut nodes: Vec<f64> = (0..node_count).map(|k| k as f64 * spacing).collect();
        // pin the endpoints exactly
        nodes[0] = 0.0;
        *nodes.last_mut().unwrap() = length;
        Ok(Self {
            length,
            nodes,
            spacing,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lumped P1 mass: h at interior nodes, h/2 at the endpoints.
    pub fn lumped_mass(&self, node: usize) -> f64 {
        if node == 0 || node + 1 == self.nodes.len() {
            self.spacing / 2.0
        } else {
            self.spacing
        }
    }

    /// ∫_Ω f dx under the lumped nodal quadrature.
    pub fn integrate_nodal(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| self.lumped_mass(k) * v)
            .sum()
    }

    /// ∫_Ω |∇u|² dx of the P1 interpolant.
    pub fn gradient_energy(&self, u: &[f64]) -> f64 {
        u.windows(2)
            .map(|w| {
                let g = (w[1] - w[0]) / self.spacing;
                g * g * self.spacing
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Material laws
// ---------------------------------------------------------------------------

/// Declared bounds of the permeability: 0 < κ_* ≤ κ ≤ κ* with joint
/// Lipschitz constant κ̄ in (x, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaBounds {
    pub lower: f64,
    pub upper: f64,
    pub lipschitz: f64,
}

/// Saturation-dependent permeability κ(x, s).
#[derive(Debug, Clone, PartialEq)]
pub enum KappaLaw {
    Constant {
        value: f64,
    },
    /// κ = base + slope_x·x + slope_s·s, with declared bounds that must be
    /// verified against the operating range.
    Affine {
        base: f64,
        slope_x: f64,
        slope_s: f64,
        declared: KappaBounds,
    },
    /// κ = lower + (upper−lower)/(1 + e^{−rate(s−midpoint)}); bounded and
    /// Lipschitz by construction.
    Saturating {
        lower: f64,
        upper: f64,
        rate: f64,
        midpoint: f64,
    },
}

impl KappaLaw {
    pub fn eval(&self, x: f64, s: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine {
                base,
                slope_x,
                slope_s,
                ..
            } => base + slope_x * x + slope_s * s,
            Self::Saturating {
                lower,
                upper,
                rate,
                midpoint,
            } => lower + (upper - lower) / (1.0 + (-rate * (s - midpoint)).exp()),
        }
    }

    pub fn bounds(&self) -> KappaBounds {
        match self {
            Self::Constant { value } => KappaBounds {
                lower: *value,
                upper: *value,
                lipschitz: 0.0,
            },
            Self::Affine { declared, .. } => *declared,
            Self::Saturating {
                lower, upper, rate, ..
            } => KappaBounds {
                lower: *lower,
                upper: *upper,
                lipschitz: (upper - lower) * rate / 4.0,
            },
        }
    }

    /// Spot-checks the declared bounds by sampling over x ∈ [0, L] and
    /// s ∈ [s_lo, s_hi]. Returns the violations found, if any.
    pub fn validate(&self, x_max: f64, s_lo: f64, s_hi: f64) -> Vec<String> {
        let b = self.bounds();
        let mut issues = Vec::new();
        if !(b.lower > 0.0) {
            issues.push(format!(
                "hy2: kappa lower bound {} is not positive",
                b.lower
            ));
        }
        if b.upper < b.lower {
            issues.push("hy2: kappa upper bound below lower bound".into());
        }
        let m = 21;
        let mut worst_low: f64 = f64::INFINITY;
        let mut worst_high: f64 = f64::NEG_INFINITY;
        let mut worst_lip: f64 = 0.0;
        for i in 0..=m {
            let x = x_max * i as f64 / m as f64;
            for j in 0..=m {
                let s = s_lo + (s_hi - s_lo) * j as f64 / m as f64;
                let v = self.eval(x, s);
                worst_low = worst_low.min(v);
                worst_high = worst_high.max(v);
                let ds = (s_hi - s_lo).max(1e-6) * 1e-3;
                worst_lip = worst_lip.max((self.eval(x, s + ds) - v).abs() / ds);
                let dx = x_max.max(1e-6) * 1e-3;
                worst_lip = worst_lip.max((self.eval(x + dx, s) - v).abs() / dx);
            }
        }
        let tol = 1e-9 * b.upper.abs().max(1.0);
        if worst_low < b.lower - tol {
            issues.push(format!(
                "hy2: kappa drops to {worst_low} below the declared lower bound {}",
                b.lower
            ));
        }
        if worst_high > b.upper + tol {
            issues.push(format!(
                "hy2: kappa reaches {worst_high} above the declared upper bound {}",
                b.upper
            ));
        }
        if worst_lip > b.lipschitz + 1e-6 * b.lipschitz.max(1.0) {
            issues.push(format!(
                "hy2: kappa Lipschitz quotient {worst_lip} exceeds the declared constant {}",
                b.lipschitz
            ));
        }
        issues
    }
}

/// Material data of one simulation: permeability, boundary permeabilities,
/// and the Robin boundary pressure series u*(t_i) at both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLaws {
    pub kappa: KappaLaw,
    pub gamma_left: f64,
    pub gamma_right: f64,
    /// [left, right] per time level 0..=steps.
    pub ustar: Vec<[f64; 2]>,
    /// Declared bound U* with |u*| ≤ U*.
    pub ustar_bound: f64,
}

impl MaterialLaws {
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.gamma_left < 0.0 || self.gamma_right < 0.0 {
            issues.push("hy2: boundary permeability must be nonnegative".into());
        }
        if !(self.gamma_left + self.gamma_right > 0.0) {
            issues.push(
                "hy2: gamma integral zero (gamma_left + gamma_right must be positive)".into(),
            );
        }
        let sup = self
            .ustar
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if sup > self.ustar_bound * (1.0 + 1e-12) {
            issues.push(format!(
                "hy2: |u*| reaches {sup}, above the declared bound {}",
                self.ustar_bound
            ));
        }
        issues
    }
}

// ---------------------------------------------------------------------------
// Tridiagonal systems
// ---------------------------------------------------------------------------

/// Nodal hysteresis linearization s ≈ slope·u + intercept used to assemble
/// one fixed-point iterate of the implicit step.
#[derive(Debug, Clone)]
pub struct HysteresisLinearization {
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// A·u for residual evaluation.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.diag[k] * u[k];
            if k > 0 {
                acc += self.sub[k - 1] * u[k - 1];
            }
            if k + 1 < n {
                acc += self.sup[k] * u[k + 1];
            }
            out[k] = acc;
        }
        out
    }

    /// Residual A·u − rhs.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// P1/lumped-mass assembly of one linearized implicit step:
///
///   (m_k/τ)(slope_k u_k + intercept_k − s_prev_k) + (K(s_field) u)_k
///     + γ(u_k − u*)·[endpoint] = 0.
///
/// κ is evaluated at element midpoints with s averaged from the endpoints,
/// which keeps the stiffness symmetric.
pub fn assemble_step_system(
    mesh: &Mesh1D,
    laws: &MaterialLaws,
    s_field: &[f64],
    s_prev: &[f64],
    ustar_now: [f64; 2],
    tau: f64,
    lin: &HysteresisLinearization,
) -> Result<TridiagonalSystem> {
    let n = mesh.node_count();
    if s_field.len() != n || s_prev.len() != n || lin.slopes.len() != n || lin.intercepts.len() != n
    {
        return Err(HystError::dim("assembly fields do not match the mesh"));
    }
    if !(tau > 0.0) {
        return Err(HystError::arg(format!(
            "time step must be positive, got {tau}"
        )));
    }
    if lin.slopes.iter().any(|&b| b < 0.0) {
        return Err(HystError::arg("hysteresis slopes must be nonnegative"));
    }
    let h = mesh.spacing();
    let mut sub = vec![0.0; n - 1];
    let mut sup = vec![0.0; n - 1];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    // stiffness with kappa at element midpoints
    for e in 0..n - 1 {
        let xm = 0.5 * (mesh.nodes()[e] + mesh.nodes()[e + 1]);
        let sm = 0.5 * (s_field[e] + s_field[e + 1]);
        let k = laws.kappa.eval(xm, sm) / h;
        diag[e] += k;
        diag[e + 1] += k;
        sub[e] -= k;
        sup[e] -= k;
    }

    // lumped hysteresis mass
    for k in 0..n {
        let m = mesh.lumped_mass(k);
        diag[k] += m * lin.slopes[k] / tau;
        rhs[k] += m * (s_prev[k] - lin.intercepts[k]) / tau;
    }

    // Robin endpoints
    diag[0] += laws.gamma_left;
    rhs[0] += laws.gamma_left * ustar_now[0];
    diag[n - 1] += laws.gamma_right;
    rhs[n - 1] += laws.gamma_right * ustar_now[1];

    // Diagonal dominance is structural here; guard against law violations.
    for k in 0..n {
        if !(diag[k] > 0.0) {
            return Err(HystError::arg(format!(
                "assembled diagonal entry {k} is not positive"
            )));
        }
        let off =
            if k > 0 { sub[k - 1].abs() } else { 0.0 } + if k + 1 < n { sup[k].abs() } else { 0.0 };
        if diag[k] + 1e-12 * diag[k].abs() < off {
            return Err(HystError::arg(format!(
                "assembled row {k} lost diagonal dominance"
            )));
        }
    }

    Ok(TridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
    })
}

/// Thomas algorithm. Errors on vanishing pivots; for the diagonally dominant
/// systems assembled above the residual stays near machine precision.
pub fn solve_tridiagonal(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = system.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n.saturating_sub(1)];
    let mut d = vec![0.0; n];
    let scale = system
        .diag
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let mut pivot = system.diag[0];
    if pivot.abs() < 1e-14 * scale {
        return Err(HystError::SingularSystem { row: 0, pivot });
    }
    if n > 1 {
        c[0] = system.sup[0] / pivot;
    }
    d[0] = system.rhs[0] / pivot;
    for k in 1..n {
        pivot = system.diag[k] - system.sub[k - 1] * c[k - 1];
        if pivot.abs() < 1e-14 * scale {
            return Err(HystError::SingularSystem { row: k, pivot });
        }
        if k + 1 < n {
            c[k] = system.sup[k] / pivot;
        }
        d[k] = (system.rhs[k] - system.sub[k - 1] * d[k - 1]) / pivot;
    }
    let mut u = d;
    for k in (0..n - 1).rev() {
        u[k] -= c[k] * u[k + 1];
    }
    Ok(u)
}
