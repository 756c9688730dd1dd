//! Simulation of the saturable nonlinear Schrödinger equation
//!
//! ```text
//! i·ψ_t + ½·ψ_xx + |ψ|²ψ / (1 + S|ψ|²) = 0
//! ```
//!
//! on a periodic domain, with two interchangeable time integrators (split-step Fourier and
//! explicit leapfrog finite differences), soliton initial data, Von Neumann stability tools for
//! the leapfrog scheme, conservation diagnostics and plain-text run I/O.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fd;
pub mod initial;
pub mod io;
pub mod presets;
pub mod run;
pub mod spectral;
pub mod stability;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    make_grid, step_count, DiagnosticsRecord, GridSpec, Nonlinearity, NormIntegrand, RunConfig,
    Saturation, Scheme, SolitonSpec, Splitting, WaveState,
};
