//! Scalar hysteresis engine: discrete play operators, Preisach output via
//! density integration, the potentials ψ/Ψ, and the generalized
//! Prandtl-Ishlinskii composition G = P∘g.
//!
//! The continuous threshold variable r is discretized by a midpoint grid on
//! (0, Λ); the density is treated as vanishing beyond Λ. Memory is stored
//! densely per (node, threshold). All operators are immutable after
//! construction and safe to share across threads; memory updates are pure
//! per-node transformations.

use crate::error::{HystError, Result};

/// Tolerance used to decide whether a threshold currently sits on its
/// constraint (engaged) when taking one-sided branch derivatives.
fn engaged_tol(w: f64) -> f64 {
    1e-12 * w.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Play operator
// ---------------------------------------------------------------------------

/// One update of the discrete play with threshold `r`:
/// ξ_new = min(u + r, max(u − r, ξ_prev)).
///
/// The result satisfies |u − ξ_new| ≤ r and
/// (ξ_new − ξ_prev)(u − ξ_new − z) ≥ 0 for every z ∈ [−r, r].
pub fn play_update(input: f64, state_prev: f64, threshold: f64) -> Result<f64> {
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(HystError::InvalidThreshold(threshold));
    }
    Ok(state_prev.max(input - threshold).min(input + threshold))
}

/// Folds [`play_update`] over an input sequence starting from memory `xi0`.
pub fn play_sequence(inputs: &[f64], xi0: f64, threshold: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(inputs.len());
    let mut xi = xi0;
    for &u in inputs {
        xi = play_update(u, xi, threshold)?;
        out.push(xi);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Threshold grid
// ---------------------------------------------------------------------------

/// Midpoint grid of play thresholds r_j = (j − 1/2)·Δr, j = 1..count, with
/// Δr = Λ/count. Integrals over r use the midpoint rule on this grid, which
/// is second order for smooth memory curves.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    count: usize,
    lambda_max: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

impl ThresholdGrid {
    pub fn new(count: usize, lambda_max: f64) -> Result<Self> {
        if count == 0 {
            return Err(HystError::arg("threshold grid count must be positive"));
        }
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(HystError::arg(format!(
                "memory support bound must be positive, got {lambda_max}"
            )));
        }
        let spacing = lambda_max / count as f64;
        let nodes = (1..=count).map(|j| (j as f64 - 0.5) * spacing).collect();
        Ok(Self {
            count,
            lambda_max,
            spacing,
            nodes,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

// ---------------------------------------------------------------------------
// Memory state
// ---------------------------------------------------------------------------

/// Per-node, per-threshold play states ξ^r — the full hysteresis memory of a
/// spatial field. Row-major: `values[node * thresholds + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    node_count: usize,
    threshold_count: usize,
    values: Vec<f64>,
}

impl MemoryState {
    pub fn new(node_count: usize, threshold_count: usize) -> Self {
        Self {
            node_count,
            threshold_count,
            values: vec![0.0; node_count * threshold_count],
        }
    }

    /// Builds the memory from an initial memory curve λ(x, r) sampled on the
    /// grid thresholds at the given node positions.
    pub fn from_profile(
        positions: &[f64],
        grid: &ThresholdGrid,
        lambda: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut mem = Self::new(positions.len(), grid.count());
        for (k, &x) in positions.iter().enumerate() {
            let row = mem.row_mut(k);
            for (j, &r) in grid.nodes().iter().enumerate() {
                row[j] = lambda(x, r);
            }
        }
        mem
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn threshold_count(&self) -> usize {
        self.threshold_count
    }

    pub fn row(&self, node: usize) -> &[f64] {
        let base = node * self.threshold_count;
        &self.values[base..base + self.threshold_count]
    }

    pub fn row_mut(&mut self, node: usize) -> &mut [f64] {
        let base = node * self.threshold_count;
        &mut self.values[base..base + self.threshold_count]
    }
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// Preisach density ρ(x, r, v).
///
/// Constant and separable kinds are global formulas with closed-form
/// potentials; tabulated densities are bilinear in (r, v) with Simpson
/// quadrature for the potentials. In r, tabulated densities are extended
/// constantly beyond the table; in v they error out, since the table is the
/// declared range.
#[derive(Debug, Clone, PartialEq)]
pub enum PreisachDensity {
    Constant {
        value: f64,
    },
    /// ρ(x,r,v) = (s0 + s1·x)(a0 + a1·r)(b0 + b1·v + b2·v²)
    Separable {
        space: [f64; 2],
        radial: [f64; 2],
        state: [f64; 3],
    },
    Tabulated {
        r_nodes: Vec<f64>,
        v_nodes: Vec<f64>,
        /// row-major over (r, v)
        values: Vec<f64>,
        simpson_panels: usize,
    },
}

pub const DEFAULT_SIMPSON_PANELS: usize = 64;

impl PreisachDensity {
    pub fn tabulated(r_nodes: Vec<f64>, v_nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r_nodes.len() < 2 || v_nodes.len() < 2 {
            return Err(HystError::arg(
                "tabulated density needs at least a 2x2 grid",
            ));
        }
        if values.len() != r_nodes.len() * v_nodes.len() {
            return Err(HystError::dim(format!(
                "density table has {} values for a {}x{} grid",
                values.len(),
                r_nodes.len(),
                v_nodes.len()
            )));
        }
        if !is_strictly_increasing(&r_nodes) || !is_strictly_increasing(&v_nodes) {
            return Err(HystError::arg("density table axes must be increasing"));
        }
        Ok(Self::Tabulated {
            r_nodes,
            v_nodes,
            values,
            simpson_panels: DEFAULT_SIMPSON_PANELS,
        })
    }

    /// Overrides the Simpson panel count of a tabulated density; no effect
    /// on the closed-form kinds.
    pub fn set_simpson_panels(&mut self, panels: usize) {
        if let Self::Tabulated { simpson_panels, .. } = self {
            *simpson_panels = panels.max(2);
        }
    }

    /// Pointwise density value. Tabulated kinds clamp r to the table and
    /// error for v outside it.
    pub fn eval(&self, x: f64, r: f64, v: f64) -> Result<f64> {
        match self {
            Self::Constant { value } => Ok(*value),
            Self::Separable {
                space,
                radial,
                state,
            } => Ok((space[0] + space[1] * x)
                * (radial[0] + radial[1] * r)
                * (state[0] + state[1] * v + state[2] * v * v)),
            Self::Tabulated {
                r_nodes,
                v_nodes,
                values,
                ..
            } => {
                let (lo, hi) = (v_nodes[0], v_nodes[v_nodes.len() - 1]);
                if v < lo - 1e-12 || v > hi + 1e-12 {
                    return Err(HystError::RangeExceeded { value: v, lo, hi });
                }
                let rc = r.clamp(r_nodes[0], r_nodes[r_nodes.len() - 1]);
                let vc = v.clamp(lo, hi);
                let (i, tr) = bracket(r_nodes, rc);
                let (j, tv) = bracket(v_nodes, vc);
                let nv = v_nodes.len();
                let f00 = values[i * nv + j];
                let f01 = values[i * nv + j + 1];
                let f10 = values[(i + 1) * nv + j];
                let f11 = values[(i + 1) * nv + j + 1];
                Ok(f00 * (1.0 - tr) * (1.0 - tv)
                    + f01 * (1.0 - tr) * tv
                    + f10 * tr * (1.0 - tv)
                    + f11 * tr * tv)
            }
        }
    }

    /// The potentials ψ(x,r,ξ) = ∫₀^ξ ρ dv and Ψ(x,r,ξ) = ∫₀^ξ v·ρ dv,
    /// closed-form where the kind allows it, composite Simpson otherwise.
    pub fn potentials(&self, x: f64, r: f64, xi: f64) -> Result<(f64, f64)> {
        match self {
            Self::Constant { value } => Ok((value * xi, value * xi * xi / 2.0)),
            Self::Separable {
                space,
                radial,
                state,
            } => {
                let factor = (space[0] + space[1] * x) * (radial[0] + radial[1] * r);
                let x2 = xi * xi;
                let x3 = x2 * xi;
                let x4 = x3 * xi;
                let psi = state[0] * xi + state[1] * x2 / 2.0 + state[2] * x3 / 3.0;
                let big = state[0] * x2 / 2.0 + state[1] * x3 / 3.0 + state[2] * x4 / 4.0;
                Ok((factor * psi, factor * big))
            }
            Self::Tabulated {
                v_nodes,
                simpson_panels,
                ..
            } => {
                let (lo, hi) = (v_nodes[0], v_nodes[v_nodes.len() - 1]);
                if xi < lo - 1e-12 || xi > hi + 1e-12 {
                    return Err(HystError::RangeExceeded { value: xi, lo, hi });
                }
                if xi == 0.0 {
                    return Ok((0.0, 0.0));
                }
                // Composite Simpson on [0, xi]; the signed step handles xi < 0.
                let n = (*simpson_panels).max(2) & !1usize;
                let h = xi / n as f64;
                let mut psi = 0.0;
                let mut big = 0.0;
                for k in 0..=n {
                    let v = h * k as f64;
                    let w = if k == 0 || k == n {
                        1.0
                    } else if k % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    let rho = self.eval(x, r, v)?;
                    psi += w * rho;
                    big += w * v * rho;
                }
                Ok((psi * h / 3.0, big * h / 3.0))
            }
        }
    }

    /// Sampled (min, max) of ρ over x-probes × (0,r_max) × (−v_range,v_range).
    pub fn sampled_bounds(&self, x_probes: &[f64], r_max: f64, v_range: f64) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let m = 33;
        for &x in x_probes {
            for i in 0..m {
                let r = r_max * (i as f64 + 0.5) / m as f64;
                for j in 0..=m {
                    let v = -v_range + 2.0 * v_range * j as f64 / m as f64;
                    let v = v.clamp(self.v_support().0, self.v_support().1);
                    let rho = self.eval(x, r, v)?;
                    lo = lo.min(rho);
                    hi = hi.max(rho);
                }
            }
        }
        Ok((lo, hi))
    }

    /// Sampled spatial Lipschitz quotient sup |ρ(x₁,·)−ρ(x₂,·)|/|x₁−x₂|.
    pub fn sampled_spatial_lipschitz(&self, x_probes: &[f64], r_max: f64, v_range: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let m = 17;
        for w in x_probes.windows(2) {
            let dx = (w[1] - w[0]).abs();
            if dx == 0.0 {
                continue;
            }
            for i in 0..m {
                let r = r_max * (i as f64 + 0.5) / m as f64;
                for j in 0..=m {
                    let v = (-v_range + 2.0 * v_range * j as f64 / m as f64)
                        .clamp(self.v_support().0, self.v_support().1);
                    if let (Ok(a), Ok(b)) = (self.eval(w[0], r, v), self.eval(w[1], r, v)) {
                        worst = worst.max((a - b).abs() / dx);
                    }
                }
            }
        }
        worst
    }

    /// Declared v-support; formula kinds are unbounded.
    pub fn v_support(&self) -> (f64, f64) {
        match self {
            Self::Tabulated { v_nodes, .. } => (v_nodes[0], v_nodes[v_nodes.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

fn is_strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

/// Locate `x` in sorted `nodes`, returning the left index and the local
/// coordinate t ∈ [0,1]. Assumes `x` within [first, last].
fn bracket(nodes: &[f64], x: f64) -> (usize, f64) {
    let n = nodes.len();
    let mut i = match nodes.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    if i >= n - 1 {
        i = n - 2;
    }
    let t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    (i, t.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Outer function of the GPI composition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterKind {
    /// g(u) = slope·u
    Linear { slope: f64 },
    /// g(u) = a·u + b·u³, monotone on the declared range when a > 0 and
    /// a + 3b·range² > 0.
    CubicOdd { linear: f64, cubic: f64 },
}

/// Smooth increasing outer map with g(0) = 0 and derivative bounds
/// g_* ≤ g' ≤ g^* and |g''| ≤ ḡ on [−range, range].
#[derive(Debug, Clone, PartialEq)]
pub struct OuterFunction {
    kind: OuterKind,
    range: f64,
    slope_min: f64,
    slope_max: f64,
    curvature_bound: f64,
}

impl OuterFunction {
    pub fn new(kind: OuterKind, range: f64) -> Result<Self> {
        if !(range > 0.0) {
            return Err(HystError::arg("outer function range must be positive"));
        }
        let (slope_min, slope_max, curvature_bound) = match kind {
            OuterKind::Linear { slope } => {
                if !(slope > 0.0) {
                    return Err(HystError::arg("outer slope must be positive"));
                }
                (slope, slope, 0.0)
            }
            OuterKind::CubicOdd { linear, cubic } => {
                let at_edge = linear + 3.0 * cubic * range * range;
                let lo = linear.min(at_edge);
                let hi = linear.max(at_edge);
                if !(lo > 0.0) {
                    return Err(HystError::arg(
                        "cubic outer function is not increasing on the declared range",
                    ));
                }
                (lo, hi, 6.0 * cubic.abs() * range)
            }
        };
        Ok(Self {
            kind,
            range,
            slope_min,
            slope_max,
            curvature_bound,
        })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self.kind {
            OuterKind::Linear { slope } => slope * u,
            OuterKind::CubicOdd { linear, cubic } => linear * u + cubic * u * u * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self.kind {
            OuterKind::Linear { slope } => slope,
            OuterKind::CubicOdd { linear, cubic } => linear + 3.0 * cubic * u * u,
        }
    }

    pub fn slope_bounds(&self) -> (f64, f64) {
        (self.slope_min, self.slope_max)
    }

    pub fn curvature_bound(&self) -> f64 {
        self.curvature_bound
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Finite-difference spot check of g(0) = 0 and the declared derivative
    /// bounds; returns the worst violation beyond the finite-difference
    /// noise floor.
    pub fn check_bounds(&self, samples: usize) -> f64 {
        let mut worst = self.eval(0.0).abs();
        let h = 1e-4 * self.range;
        let slack = 1e-3 * self.slope_max.max(1.0);
        for i in 0..=samples {
            let u = -self.range + 2.0 * self.range * i as f64 / samples as f64;
            let d = (self.eval(u + h) - self.eval(u - h)) / (2.0 * h);
            worst = worst.max(self.slope_min - d - slack);
            worst = worst.max(d - self.slope_max - slack);
            let dd = (self.eval(u + h) - 2.0 * self.eval(u) + self.eval(u - h)) / (h * h);
            worst = worst.max(dd.abs() - self.curvature_bound - slack);
        }
        worst.max(0.0)
    }
}

// ---------------------------------------------------------------------------
// Preisach operator
// ---------------------------------------------------------------------------

/// Direction of a one-sided branch derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchDirection {
    Ascending,
    Descending,
}

impl BranchDirection {
    pub fn from_increment(delta: f64) -> Self {
        if delta < 0.0 {
            Self::Descending
        } else {
            Self::Ascending
        }
    }
}

/// Preisach operator: threshold grid, density, constant offset Ḡ, and an
/// optional outer map g (G = P∘g). `range` is the admissible input interval
/// [−U, U]; a well-posed run never leaves it.
///
/// When an outer map is present, memory rows hold play states of the mapped
/// input w = g(u); initial memory curves must be given in the same variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PreisachOperator {
    grid: ThresholdGrid,
    density: PreisachDensity,
    offset: f64,
    outer: Option<OuterFunction>,
    range: f64,
}

impl PreisachOperator {
    pub fn new(
        grid: ThresholdGrid,
        density: PreisachDensity,
        offset: f64,
        outer: Option<OuterFunction>,
        range: f64,
    ) -> Result<Self> {
        if !(range > 0.0) || !range.is_finite() {
            return Err(HystError::arg("operator range must be positive"));
        }
        let (vlo, vhi) = density.v_support();
        if vlo > -range || vhi < range {
            return Err(HystError::arg(format!(
                "density v-support [{vlo}, {vhi}] does not cover the operator range ±{range}"
            )));
        }
        Ok(Self {
            grid,
            density,
            offset,
            outer,
            range,
        })
    }

    pub fn grid(&self) -> &ThresholdGrid {
        &self.grid
    }

    pub fn density(&self) -> &PreisachDensity {
        &self.density
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn outer(&self) -> Option<&OuterFunction> {
        self.outer.as_ref()
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Memory at the virgin state (all play states zero).
    pub fn virgin_row(&self) -> Vec<f64> {
        vec![0.0; self.grid.count()]
    }

    fn check_input(&self, u: f64) -> Result<f64> {
        if !u.is_finite() || u.abs() > self.range * (1.0 + 1e-9) + 1e-12 {
            return Err(HystError::RangeExceeded {
                value: u,
                lo: -self.range,
                hi: self.range,
            });
        }
        Ok(match &self.outer {
            Some(g) => g.eval(u),
            None => u,
        })
    }

    /// Output Ḡ + Σ_j ψ(x, r_j, ξ^{r_j})·Δr for a fixed memory row.
    /// Midpoint rule in r: O(Δr²) for smooth memory curves.
    pub fn output(&self, memory_row: &[f64], x: f64) -> Result<f64> {
        if memory_row.len() != self.grid.count() {
            return Err(HystError::dim(format!(
                "memory row has {} thresholds, grid has {}",
                memory_row.len(),
                self.grid.count()
            )));
        }
        let dr = self.grid.spacing();
        let mut acc = 0.0;
        for (j, &r) in self.grid.nodes().iter().enumerate() {
            let (psi, _) = self.density.potentials(x, r, memory_row[j])?;
            acc += psi;
        }
        Ok(self.offset + acc * dr)
    }

    /// Advances every play state with the (mapped) input and returns the new
    /// saturation together with the updated memory row.
    pub fn step(&self, u_new: f64, memory_row: &[f64], x: f64) -> Result<(f64, Vec<f64>)> {
        let mut row = memory_row.to_vec();
        let s = self.step_into(u_new, x, &mut row)?;
        Ok((s, row))
    }

    /// In-place variant of [`Self::step`]: `row` holds the previous memory on
    /// entry and the updated memory on exit.
    pub fn step_into(&self, u_new: f64, x: f64, row: &mut [f64]) -> Result<f64> {
        if row.len() != self.grid.count() {
            return Err(HystError::dim("memory row does not match grid"));
        }
        let w = self.check_input(u_new)?;
        let dr = self.grid.spacing();
        let mut acc = 0.0;
        for (j, &r) in self.grid.nodes().iter().enumerate() {
            let xi = row[j].max(w - r).min(w + r);
            row[j] = xi;
            let (psi, _) = self.density.potentials(x, r, xi)?;
            acc += psi;
        }
        Ok(self.offset + acc * dr)
    }

    /// Saturation and one-sided branch slope at trial input `u` against a
    /// frozen memory row, without committing the memory update. The slope is
    /// Δr·Σ over engaged thresholds of ρ(x, r_j, ξ_j)·g'(u).
    pub fn linearize(
        &self,
        u: f64,
        memory_row: &[f64],
        x: f64,
        direction: BranchDirection,
    ) -> Result<(f64, f64)> {
        if memory_row.len() != self.grid.count() {
            return Err(HystError::dim("memory row does not match grid"));
        }
        let w = self.check_input(u)?;
        let gp = self.outer.as_ref().map_or(1.0, |g| g.derivative(u));
        let dr = self.grid.spacing();
        let tol = engaged_tol(w);
        let mut acc = 0.0;
        let mut slope = 0.0;
        for (j, &r) in self.grid.nodes().iter().enumerate() {
            let xi = memory_row[j].max(w - r).min(w + r);
            let (psi, _) = self.density.potentials(x, r, xi)?;
            acc += psi;
            let engaged = match direction {
                BranchDirection::Ascending => (w - xi - r).abs() <= tol,
                BranchDirection::Descending => (xi - w - r).abs() <= tol,
            };
            if engaged {
                slope += self.density.eval(x, r, xi)?;
            }
        }
        Ok((self.offset + acc * dr, slope * dr * gp))
    }

    /// One-sided derivative of the local Preisach branch at `u`.
    pub fn branch_slope(
        &self,
        memory_row: &[f64],
        u: f64,
        direction: BranchDirection,
        x: f64,
    ) -> Result<f64> {
        self.linearize(u, memory_row, x, direction).map(|(_, b)| b)
    }

    /// Hysteresis potential Σ_j Ψ(x, r_j, ξ_j)·Δr of a memory row.
    pub fn stored_energy(&self, memory_row: &[f64], x: f64) -> Result<f64> {
        let dr = self.grid.spacing();
        let mut acc = 0.0;
        for (j, &r) in self.grid.nodes().iter().enumerate() {
            let (_, big) = self.density.potentials(x, r, memory_row[j])?;
            acc += big;
        }
        Ok(acc * dr)
    }

    /// Advisory check of the physical saturation condition: the density mass
    /// reachable from admissible inputs must fit in [0, 1] around Ḡ. The
    /// reachable states at threshold r are |v| ≤ (U − r)^+, so the integrals
    /// run over that triangle.
    pub fn saturation_range_check(&self, x_probes: &[f64]) -> SaturationRangeReport {
        let dr = self.grid.spacing();
        let u = self.range;
        let mut worst_pos: f64 = 0.0;
        let mut worst_neg: f64 = 0.0;
        for &x in x_probes {
            let mut pos = 0.0;
            let mut neg = 0.0;
            for &r in self.grid.nodes() {
                let reach = (u - r).max(0.0);
                if let Ok((psi_hi, _)) = self.density.potentials(x, r, reach) {
                    pos += psi_hi;
                }
                if let Ok((psi_lo, _)) = self.density.potentials(x, r, -reach) {
                    neg += -psi_lo;
                }
            }
            worst_pos = worst_pos.max(pos * dr);
            worst_neg = worst_neg.max(neg * dr);
        }
        let tol = 1e-12;
        SaturationRangeReport {
            positive_mass: worst_pos,
            negative_mass: worst_neg,
            positive_bound: 1.0 - self.offset,
            negative_bound: self.offset,
            pass: worst_pos <= 1.0 - self.offset + tol && worst_neg <= self.offset + tol,
        }
    }
}

/// Report of [`PreisachOperator::saturation_range_check`]; advisory only.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationRangeReport {
    pub positive_mass: f64,
    pub negative_mass: f64,
    pub positive_bound: f64,
    pub negative_bound: f64,
    pub pass: bool,
}
