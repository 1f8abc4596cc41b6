//! Implicit simulator and verification harness for the degenerate diffusion
//! equation s_t = div κ(x,s)∇u with s = G[u] a Preisach hysteresis operator
//! and Robin boundary conditions on a 1-D interval.
//!
//! Each implicit time step is a monotone quasilinear elliptic solve; the
//! crate additionally provides the Orlicz/Luxemburg norm machinery and the
//! diagnostic estimates (maximum principle, energy sums, convexity
//! inequality, interpolant gaps, weak residuals) used to verify the scheme's
//! a priori bounds numerically.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod hysteresis;
pub mod mesh;
pub mod spaces;
pub mod stepper;

pub use error::{HystError, Result};
