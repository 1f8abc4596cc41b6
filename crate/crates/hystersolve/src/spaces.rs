//! Orlicz-space machinery (strict Young functions, conjugates, Luxemburg
//! norms, the Hölder-type pairing) and the Fourier-based anisotropic norms:
//! Dirichlet sine modes in time for H/V/V*, Neumann cosine modes in space,
//! and the tensor norms ‖·‖_X, ‖·‖_Y on Ω×(0,T).
//!
//! All operations here are pure and safe for concurrent use.

use crate::error::{HystError, Result};
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Young functions
// ---------------------------------------------------------------------------

/// A strict Young function Φ: convex, Φ(0) = 0, Φ(u)/u → 0 at 0 and → ∞ at
/// infinity, together with its generator φ = Φ'.
#[derive(Debug, Clone, PartialEq)]
pub enum YoungFunction {
    /// Φ(u) = coeff·u^p, p > 1.
    Power { p: f64, coeff: f64 },
    /// Φ(u) = (1+u)log(1+u) − u, generator log(1+r).
    ExpMinusLinear,
    /// Φ*(v) = e^v − v − 1, the conjugate of [`Self::ExpMinusLinear`].
    Exponential,
    /// Φ_log(u) = u·log(1+u).
    PhiLog,
    /// Tabulated increasing generator φ; Φ by trapezoid integration of the
    /// table, φ⁻¹ by monotone bisection.
    Custom { r: Vec<f64>, phi: Vec<f64> },
    /// Numeric conjugate of the inner function.
    Conjugate(Box<YoungFunction>),
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(HystError::arg(format!(
                "power Young function needs p > 1, got {p}"
            )));
        }
        Ok(Self::Power { p, coeff: 1.0 })
    }

    pub fn custom(r: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if r.len() != phi.len() || r.len() < 2 {
            return Err(HystError::dim(
                "generator table needs matching axes, length >= 2",
            ));
        }
        if r[0] != 0.0 || phi[0] != 0.0 {
            return Err(HystError::arg("generator table must start at (0, 0)"));
        }
        if !r.windows(2).all(|w| w[1] > w[0]) || !phi.windows(2).all(|w| w[1] >= w[0]) {
            return Err(HystError::arg("generator table must be increasing"));
        }
        Ok(Self::Custom { r, phi })
    }

    /// Φ(u) for u ≥ 0.
    pub fn eval(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        match self {
            Self::Power { p, coeff } => coeff * u.powf(*p),
            Self::ExpMinusLinear => (1.0 + u) * u.ln_1p() - u,
            Self::Exponential => u.exp_m1() - u,
            Self::PhiLog => u * u.ln_1p(),
            Self::Custom { r, phi } => {
                // trapezoid integral of the generator up to u, linear
                // extrapolation of phi beyond the table
                let mut acc = 0.0;
                let mut prev_r = 0.0;
                let mut prev_phi = 0.0;
                for (rk, pk) in r.iter().zip(phi.iter()).skip(1) {
                    if u <= *rk {
                        let t = (u - prev_r) / (rk - prev_r);
                        let pu = prev_phi + t * (pk - prev_phi);
                        return acc + 0.5 * (prev_phi + pu) * (u - prev_r);
                    }
                    acc += 0.5 * (prev_phi + pk) * (rk - prev_r);
                    prev_r = *rk;
                    prev_phi = *pk;
                }
                let n = r.len();
                let slope = (phi[n - 1] - phi[n - 2]) / (r[n - 1] - r[n - 2]);
                let pu = prev_phi + slope * (u - prev_r);
                acc + 0.5 * (prev_phi + pu) * (u - prev_r)
            }
            Self::Conjugate(base) => conjugate_value(base, u),
        }
    }

    /// The generator φ(r) = Φ'(r).
    pub fn generator(&self, r: f64) -> f64 {
        match self {
            Self::Power { p, coeff } => coeff * p * r.powf(p - 1.0),
            Self::ExpMinusLinear => r.ln_1p(),
            Self::Exponential => r.exp_m1(),
            Self::PhiLog => r.ln_1p() + r / (1.0 + r),
            Self::Custom { r: rs, phi } => {
                let n = rs.len();
                if r >= rs[n - 1] {
                    let slope = (phi[n - 1] - phi[n - 2]) / (rs[n - 1] - rs[n - 2]);
                    return phi[n - 1] + slope * (r - rs[n - 1]);
                }
                let mut k = 1;
                while rs[k] < r {
                    k += 1;
                }
                let t = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
                phi[k - 1] + t * (phi[k] - phi[k - 1])
            }
            Self::Conjugate(base) => base.generator_inverse(r),
        }
    }

    /// φ⁻¹(v) by closed form where available, else monotone bisection.
    pub fn generator_inverse(&self, v: f64) -> f64 {
        debug_assert!(v >= 0.0);
        match self {
            Self::Power { p, coeff } => (v / (coeff * p)).powf(1.0 / (p - 1.0)),
            Self::ExpMinusLinear => v.exp() - 1.0,
            Self::Exponential => v.ln_1p(),
            _ => {
                if v == 0.0 {
                    return 0.0;
                }
                let mut hi = 1.0;
                let mut guard = 0;
                while self.generator(hi) < v && guard < 2000 {
                    hi *= 2.0;
                    guard += 1;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.generator(mid) < v {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// The conjugate Young function Φ*, closed-form for the classical pairs.
    pub fn conjugate(&self) -> YoungFunction {
        match self {
            Self::Power { p, coeff } => {
                let q = p / (p - 1.0);
                let a = (coeff * p).powf(1.0 / (p - 1.0));
                let c = 1.0 / a - coeff / a.powf(*p);
                Self::Power { p: q, coeff: c }
            }
            Self::ExpMinusLinear => Self::Exponential,
            Self::Exponential => Self::ExpMinusLinear,
            Self::PhiLog | Self::Custom { .. } => Self::Conjugate(Box::new(self.clone())),
            Self::Conjugate(base) => (**base).clone(),
        }
    }

    /// Spot check of strictness: Φ(u)/u must decay towards 0 and grow
    /// without bound relative to its value at u = 1. Returns false on
    /// violation.
    pub fn check_strictness(&self) -> bool {
        let mid = self.eval(1.0);
        let tiny = self.eval(1e-9) / 1e-9;
        let big = self.eval(1e9) / 1e9;
        self.eval(0.0) == 0.0 && mid > 0.0 && tiny < 1e-3 * mid && big > 10.0 * mid
    }
}

/// Φ*(v) = v·φ⁻¹(v) − Φ(φ⁻¹(v)), valid for v ≥ 0.
pub fn young_conjugate(phi: &YoungFunction, v: f64) -> Result<f64> {
    if v < 0.0 {
        return Err(HystError::arg(format!(
            "conjugate argument must be nonnegative, got {v}"
        )));
    }
    Ok(conjugate_value(phi, v))
}

fn conjugate_value(phi: &YoungFunction, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let u = phi.generator_inverse(v);
    v * u - phi.eval(u)
}

// ---------------------------------------------------------------------------
// Sampled functions and the Luxemburg norm
// ---------------------------------------------------------------------------

/// A function sampled on a quadrature grid: values with positive weights
/// summing to the domain measure. Piecewise-constant convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(HystError::dim("sample values and weights differ in length"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(HystError::arg("quadrature weights must be positive"));
        }
        Ok(Self { values, weights })
    }

    /// Uniform cells on an interval of the given length.
    pub fn on_interval(values: Vec<f64>, length: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(HystError::arg("empty sample set"));
        }
        if !(length > 0.0) {
            return Err(HystError::arg("interval length must be positive"));
        }
        let w = length / values.len() as f64;
        let weights = vec![w; values.len()];
        Self::new(values, weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn integral_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v.abs() * w)
            .sum()
    }

    /// The modular ∫ Φ(|f|/b).
    pub fn modular(&self, phi: &YoungFunction, b: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * phi.eval(v.abs() / b))
            .sum()
    }

    /// Pointwise sum with matching weights.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.weights != other.weights {
            return Err(HystError::dim("sampled functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(values, self.weights.clone())
    }
}

/// Luxemburg norm inf{b > 0 : ∫ Φ(|f|/b) ≤ 1} by bracketed bisection.
/// Zero functions have norm 0.
pub fn luxemburg_norm(f: &SampledFunction, phi: &YoungFunction) -> f64 {
    let sup = f.sup_abs();
    if sup == 0.0 {
        return 0.0;
    }
    // bracket: grow/shrink geometrically from a mass-based guess
    let mut b = (f.integral_abs() / f.measure())
        .max(1e-300)
        .max(sup * 1e-12);
    let mut guard = 0;
    while f.modular(phi, b) > 1.0 && guard < 4096 {
        b *= 2.0;
        guard += 1;
    }
    let mut hi = b;
    let mut lo = b;
    guard = 0;
    while f.modular(phi, lo) <= 1.0 && lo > f64::MIN_POSITIVE && guard < 4096 {
        lo *= 0.5;
        guard += 1;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f.modular(phi, mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Hölder-type pairing report: ∫fg against 2·|f|_Φ·|g|_{Φ*}.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub pairing: f64,
    pub norm_f: f64,
    pub norm_g_conj: f64,
    pub holds: bool,
}

pub fn holder_pairing_check(
    f: &SampledFunction,
    g: &SampledFunction,
    phi: &YoungFunction,
) -> Result<HolderReport> {
    if f.weights() != g.weights() {
        return Err(HystError::dim("paired functions live on different grids"));
    }
    let pairing: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .zip(f.weights())
        .map(|((a, b), w)| (a * b).abs() * w)
        .sum();
    let norm_f = luxemburg_norm(f, phi);
    let conj = phi.conjugate();
    let norm_g = luxemburg_norm(g, &conj);
    let bound = 2.0 * norm_f * norm_g;
    Ok(HolderReport {
        pairing,
        norm_f,
        norm_g_conj: norm_g,
        holds: pairing <= bound + 1e-12 * bound.max(1.0),
    })
}

/// Outcome of the norm-vs-modular scaling bound |f|_Φ ≤ a·∫Φ(|f|/a), valid
/// whenever |f|_Φ ≥ a.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingBound {
    NotApplicable { norm: f64 },
    Checked { norm: f64, bound: f64, holds: bool },
}

pub fn scaling_bound_check(
    f: &SampledFunction,
    phi: &YoungFunction,
    a: f64,
) -> Result<ScalingBound> {
    if !(a > 0.0) {
        return Err(HystError::arg("scaling parameter must be positive"));
    }
    let norm = luxemburg_norm(f, phi);
    if norm < a {
        return Ok(ScalingBound::NotApplicable { norm });
    }
    let bound = a * f.modular(phi, a);
    Ok(ScalingBound::Checked {
        norm,
        bound,
        holds: norm <= bound * (1.0 + 1e-10) + 1e-14,
    })
}

/// Pointwise check Φ(u) ≤ Φ_log(u) ≤ 2Φ(u) with Φ = (1+u)log(1+u) − u.
#[derive(Debug, Clone, PartialEq)]
pub struct PhilogEquivalenceReport {
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
    pub holds: bool,
}

pub fn philog_equivalence_check(samples: &[f64]) -> PhilogEquivalenceReport {
    let phi = YoungFunction::ExpMinusLinear;
    let philog = YoungFunction::PhiLog;
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for &u in samples {
        let a = phi.eval(u);
        let b = philog.eval(u);
        lower = lower.max(a - b);
        upper = upper.max(b - 2.0 * a);
    }
    PhilogEquivalenceReport {
        max_lower_violation: lower,
        max_upper_violation: upper,
        holds: lower <= 1e-14 && upper <= 1e-14,
    }
}

// ---------------------------------------------------------------------------
// Fourier norms in time and space-time
// ---------------------------------------------------------------------------

/// Dirichlet sine eigenpairs on (0, T): ℓ_j(t) = √(2/T)·sin(jπt/T) with
/// μ_j = (jπ/T)².
pub fn time_mode(j: usize, t: f64, t_len: f64) -> f64 {
    (2.0 / t_len).sqrt() * (j as f64 * PI * t / t_len).sin()
}

pub fn time_eigenvalue(j: usize, t_len: f64) -> f64 {
    let w = j as f64 * PI / t_len;
    w * w
}

/// Sine-series coefficients of uniformly sampled values on [0, T]
/// (endpoints included) by trapezoid quadrature, modes 1..=J.
fn sine_coefficients(v: &[f64], t_len: f64, modes: usize) -> Vec<f64> {
    let n = v.len();
    let dt = t_len / (n - 1) as f64;
    (1..=modes)
        .map(|j| {
            let mut acc = 0.0;
            for (k, &val) in v.iter().enumerate() {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += w * val * time_mode(j, k as f64 * dt, t_len);
            }
            acc * dt
        })
        .collect()
}

/// L², H¹₀-seminorm and dual norms of a time signal via its sine expansion:
/// |v|_H² = Σ v_j², |v|_V² = Σ μ_j v_j², |v|_{V*}² = Σ v_j²/μ_j.
pub fn sobolev_time_norms(v: &[f64], t_len: f64) -> Result<(f64, f64, f64)> {
    if v.len() < 2 {
        return Err(HystError::arg("need at least 2 time samples"));
    }
    if !(t_len > 0.0) {
        return Err(HystError::arg("time length must be positive"));
    }
    let modes = v.len() - 1;
    let coef = sine_coefficients(v, t_len, modes);
    let mut h2 = 0.0;
    let mut v2 = 0.0;
    let mut d2 = 0.0;
    for (j, c) in coef.iter().enumerate() {
        let mu = time_eigenvalue(j + 1, t_len);
        h2 += c * c;
        v2 += mu * c * c;
        d2 += c * c / mu;
    }
    Ok((h2.sqrt(), v2.sqrt(), d2.sqrt()))
}

/// Neumann cosine modes on (0, L): e_0 = 1/√L, e_k = √(2/L)·cos(kπx/L) with
/// ω_k = (kπ/L)².
pub fn space_mode(k: usize, x: f64, length: f64) -> f64 {
    if k == 0 {
        1.0 / length.sqrt()
    } else {
        (2.0 / length).sqrt() * (k as f64 * PI * x / length).cos()
    }
}

pub fn space_eigenvalue(k: usize, length: f64) -> f64 {
    let w = k as f64 * PI / length;
    w * w
}

/// Tensor-mode norms of a space-time field sampled as `field[time][node]` on
/// uniform grids: ‖u‖_X² = Σ(1+ω_k)|u_jk|² and ‖u‖_Y² = Σ|u_jk|²/μ_j,
/// truncated at the grid-resolved modes.
pub fn space_time_norms(field: &[Vec<f64>], length: f64, t_len: f64) -> Result<(f64, f64)> {
    let nt = field.len();
    if nt < 2 {
        return Err(HystError::arg("need at least 2 time levels"));
    }
    let nx = field[0].len();
    if nx < 2 || field.iter().any(|row| row.len() != nx) {
        return Err(HystError::dim("ragged space-time field"));
    }
    let dx = length / (nx - 1) as f64;
    let dt = t_len / (nt - 1) as f64;
    let kmodes = nx - 1;
    let jmodes = nt - 1;

    // spatial transform per time level
    let mut a = vec![vec![0.0; kmodes + 1]; nt];
    for (i, row) in field.iter().enumerate() {
        for k in 0..=kmodes {
            let mut acc = 0.0;
            for (m, &v) in row.iter().enumerate() {
                let w = if m == 0 || m == nx - 1 { 0.5 } else { 1.0 };
                acc += w * v * space_mode(k, m as f64 * dx, length);
            }
            a[i][k] = acc * dx;
        }
    }

    // temporal transform per spatial mode
    let mut x2 = 0.0;
    let mut y2 = 0.0;
    for k in 0..=kmodes {
        let omega = space_eigenvalue(k, length);
        for j in 1..=jmodes {
            let mu = time_eigenvalue(j, t_len);
            let mut c = 0.0;
            for i in 0..nt {
                let w = if i == 0 || i == nt - 1 { 0.5 } else { 1.0 };
                c += w * a[i][k] * time_mode(j, i as f64 * dt, t_len);
            }
            c *= dt;
            x2 += (1.0 + omega) * c * c;
            y2 += c * c / mu;
        }
    }
    Ok((x2.sqrt(), y2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_of_half_square_is_half_square() {
        // Phi(u) = u^2/2 is self-conjugate.
        let phi = YoungFunction::Power { p: 2.0, coeff: 0.5 };
        assert!((young_conjugate(&phi, 3.0).unwrap() - 4.5).abs() < 1e-12);
        let conj = phi.conjugate();
        match conj {
            YoungFunction::Power { p, coeff } => {
                assert!((p - 2.0).abs() < 1e-15 && (coeff - 0.5).abs() < 1e-15);
            }
            _ => panic!("expected power kind"),
        }
    }

    #[test]
    fn conjugate_of_entropy_pair() {
        // Phi = (1+u)log(1+u) - u pairs with e^v - v - 1.
        let phi = YoungFunction::ExpMinusLinear;
        let expect = std::f64::consts::E - 2.0;
        assert!((young_conjugate(&phi, 1.0).unwrap() - expect).abs() < 1e-12);
        assert_eq!(young_conjugate(&phi, 0.0).unwrap(), 0.0);
        assert!(young_conjugate(&phi, -1.0).is_err());
    }

    #[test]
    fn conjugate_duality_roundtrip() {
        for phi in [
            YoungFunction::Power { p: 3.0, coeff: 1.0 },
            YoungFunction::ExpMinusLinear,
            YoungFunction::PhiLog,
        ] {
            let conj = phi.conjugate();
            let back = conj.conjugate();
            for &u in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                let direct = phi.eval(u);
                let roundtrip = match &back {
                    YoungFunction::Conjugate(inner) => conjugate_value(inner, u),
                    other => other.eval(u),
                };
                assert!(
                    (direct - roundtrip).abs() <= 1e-8 * direct.max(1.0),
                    "{direct} vs {roundtrip} at u = {u}"
                );
            }
        }
    }

    #[test]
    fn young_inequality_with_equality_on_graph() {
        let phi = YoungFunction::PhiLog;
        for &u in &[0.05, 0.3, 1.0, 4.0] {
            for &v in &[0.05, 0.5, 2.0] {
                let lhs = u * v;
                let rhs = phi.eval(u) + young_conjugate(&phi, v).unwrap();
                assert!(lhs <= rhs + 1e-10, "Young inequality failed at ({u}, {v})");
            }
            // equality when v = phi'(u)
            let v = phi.generator(u);
            let gap = phi.eval(u) + young_conjugate(&phi, v).unwrap() - u * v;
            assert!(gap.abs() < 1e-8, "gap {gap} at u = {u}");
        }
    }

    #[test]
    fn luxemburg_matches_l2() {
        let f = SampledFunction::on_interval(vec![1.0; 16], 1.0).unwrap();
        let phi = YoungFunction::power(2.0).unwrap();
        assert!((luxemburg_norm(&f, &phi) - 1.0).abs() < 1e-12);

        let g = SampledFunction::on_interval(vec![2.0; 64], 4.0).unwrap();
        assert!((luxemburg_norm(&g, &phi) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn luxemburg_philog_against_scalar_root() {
        // For f = 1 on (0,1): b solves (1/b)·log(1 + 1/b) = 1.
        let mut lo = 0.1_f64;
        let mut hi = 10.0_f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (1.0 / mid) * (1.0 + 1.0 / mid).ln() > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let f = SampledFunction::on_interval(vec![1.0; 32], 1.0).unwrap();
        let norm = luxemburg_norm(&f, &YoungFunction::PhiLog);
        assert!((norm - root).abs() < 1e-10, "norm {norm} vs root {root}");
    }

    #[test]
    fn luxemburg_zero_function() {
        let f = SampledFunction::on_interval(vec![0.0; 8], 1.0).unwrap();
        assert_eq!(luxemburg_norm(&f, &YoungFunction::PhiLog), 0.0);
    }

    #[test]
    fn luxemburg_normalization() {
        let f = SampledFunction::on_interval(vec![0.3, -1.7, 0.9, 2.4, -0.2, 1.1], 2.0).unwrap();
        for phi in [
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::PhiLog,
            YoungFunction::ExpMinusLinear,
        ] {
            let b = luxemburg_norm(&f, &phi);
            let m = f.modular(&phi, b);
            assert!((m - 1.0).abs() < 1e-10, "modular at the norm is {m}");
        }
    }

    #[test]
    fn holder_pairing_cases() {
        let phi = YoungFunction::power(2.0).unwrap();
        let f = SampledFunction::on_interval(vec![1.0; 10], 1.0).unwrap();
        let g = SampledFunction::on_interval(vec![1.0; 10], 1.0).unwrap();
        let rep = holder_pairing_check(&f, &g, &phi).unwrap();
        assert!(rep.holds && (rep.pairing - 1.0).abs() < 1e-12);

        let zero = SampledFunction::on_interval(vec![0.0; 10], 1.0).unwrap();
        let rep = holder_pairing_check(&f, &zero, &phi).unwrap();
        assert!(rep.holds && rep.pairing == 0.0 && rep.norm_g_conj == 0.0);
    }

    #[test]
    fn scaling_bound_gate_and_hold() {
        let phi = YoungFunction::PhiLog;
        let small = SampledFunction::on_interval(vec![0.01; 8], 1.0).unwrap();
        assert!(matches!(
            scaling_bound_check(&small, &phi, 1.0).unwrap(),
            ScalingBound::NotApplicable { .. }
        ));
        let big = SampledFunction::on_interval(vec![std::f64::consts::E; 8], 1.0).unwrap();
        match scaling_bound_check(&big, &phi, 1.0).unwrap() {
            ScalingBound::Checked { holds, .. } => assert!(holds),
            _ => panic!("expected applicable case"),
        }
    }

    #[test]
    fn philog_equivalence_chain() {
        let phi = YoungFunction::ExpMinusLinear;
        let philog = YoungFunction::PhiLog;
        assert!((phi.eval(1.0) - (2.0 * 2.0_f64.ln() - 1.0)).abs() < 1e-15);
        assert!((philog.eval(1.0) - 2.0_f64.ln()).abs() < 1e-15);
        let samples: Vec<f64> = (0..400).map(|k| 1e-4 * 1.05_f64.powi(k)).collect();
        let rep = philog_equivalence_check(&samples);
        assert!(rep.holds, "{rep:?}");
        // ratio tends to 2 as u -> 0
        let u = 1e-8;
        let ratio = philog.eval(u) / phi.eval(u);
        assert!((ratio - 2.0).abs() < 1e-4, "ratio {ratio}");
        assert_eq!(philog.eval(0.0), 0.0);
    }

    #[test]
    fn sine_norms_of_first_mode() {
        let t_len = 2.0;
        let n = 257;
        let v: Vec<f64> = (0..n)
            .map(|k| time_mode(1, t_len * k as f64 / (n - 1) as f64, t_len))
            .collect();
        let (h, vn, vd) = sobolev_time_norms(&v, t_len).unwrap();
        let mu1 = time_eigenvalue(1, t_len);
        assert!((h - 1.0).abs() < 1e-4, "h = {h}");
        assert!((vn - mu1.sqrt()).abs() < 1e-3);
        assert!((vd - 1.0 / mu1.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn sine_norms_zero_and_errors() {
        assert_eq!(
            sobolev_time_norms(&[0.0; 16], 1.0).unwrap(),
            (0.0, 0.0, 0.0)
        );
        assert!(sobolev_time_norms(&[1.0], 1.0).is_err());
    }

    #[test]
    fn parseval_on_smooth_function() {
        let t_len = 1.0;
        let n = 513;
        // smooth, vanishing at both endpoints
        let v: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                (PI * t).sin().powi(2) * (3.0 * PI * t).sin()
            })
            .collect();
        let (h, _, _) = sobolev_time_norms(&v, t_len).unwrap();
        let mut l2 = 0.0;
        for k in 0..n {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            l2 += w * v[k] * v[k] / (n - 1) as f64;
        }
        assert!((h * h - l2).abs() < 1e-6, "{} vs {}", h * h, l2);
    }

    #[test]
    fn dual_chain_inequality() {
        // |v|_{V*} <= (T/pi) |v|_H <= (T/pi)^2 |v|_V for endpoint-vanishing v.
        let t_len = 3.0;
        let n = 129;
        let v: Vec<f64> = (0..n)
            .map(|k| {
                let t = t_len * k as f64 / (n - 1) as f64;
                (PI * t / t_len).sin() + 0.3 * (4.0 * PI * t / t_len).sin()
            })
            .collect();
        let (h, vn, vd) = sobolev_time_norms(&v, t_len).unwrap();
        let c = t_len / PI;
        assert!(vd <= c * h * (1.0 + 1e-12));
        assert!(c * h <= c * c * vn * (1.0 + 1e-12));
    }

    #[test]
    fn space_time_norms_single_mode() {
        let (length, t_len) = (1.0, 2.0);
        let (nx, nt) = (41, 201);
        let field: Vec<Vec<f64>> = (0..nt)
            .map(|i| {
                let t = t_len * i as f64 / (nt - 1) as f64;
                vec![time_mode(1, t, t_len); nx]
            })
            .collect();
        let (x, y) = space_time_norms(&field, length, t_len).unwrap();
        let mu1 = time_eigenvalue(1, t_len);
        assert!((x - 1.0).abs() < 2e-3, "x = {x}");
        assert!((y - 1.0 / mu1.sqrt()).abs() < 2e-3, "y = {y}");
    }

    #[test]
    fn space_time_y_vs_l2_bound() {
        // ||u||_Y <= (T/pi) ||u||_{L2} coefficientwise.
        let (length, t_len) = (2.0, 1.5);
        let (nx, nt) = (31, 63);
        let field: Vec<Vec<f64>> = (0..nt)
            .map(|i| {
                (0..nx)
                    .map(|m| {
                        let t = t_len * i as f64 / (nt - 1) as f64;
                        let x = length * m as f64 / (nx - 1) as f64;
                        (x * 2.13).sin() * (t * 5.7).cos() + 0.3 * x - 0.1 * t
                    })
                    .collect()
            })
            .collect();
        let (_, y) = space_time_norms(&field, length, t_len).unwrap();
        // L2 norm of the expanded part (same truncation): use the X norm with
        // omega weights stripped by re-expanding; cheaper: Parseval gives
        // sum of c^2 <= X^2, so compare against X directly.
        let (x, _) = space_time_norms(&field, length, t_len).unwrap();
        assert!(y <= (t_len / PI) * x * (1.0 + 1e-12));
    }

    #[test]
    fn custom_generator_roundtrip() {
        // tabulated phi(r) = r matches Phi(u) = u^2/2
        let r: Vec<f64> = (0..=100).map(|k| k as f64 / 50.0).collect();
        let phi_vals = r.clone();
        let phi = YoungFunction::custom(r, phi_vals).unwrap();
        assert!((phi.eval(1.0) - 0.5).abs() < 1e-12);
        assert!((phi.generator_inverse(0.7) - 0.7).abs() < 1e-9);
        assert!((young_conjugate(&phi, 1.0).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn strictness_check() {
        assert!(YoungFunction::PhiLog.check_strictness());
        assert!(YoungFunction::ExpMinusLinear.check_strictness());
        assert!(YoungFunction::power(1.5).unwrap().check_strictness());
        assert!(YoungFunction::power(1.0).is_err());
    }
}
