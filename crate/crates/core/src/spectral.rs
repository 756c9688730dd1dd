//! Split-step Fourier integration.
//!
//! The nonlinear sub-problem `ψ_t = i·|ψ|²/(1 + S|ψ|²)·ψ` keeps `|ψ|` fixed, so it is solved
//! exactly by a pointwise phase rotation. The linear sub-problem `iψ_t + ½ψ_xx = 0` is solved
//! exactly per Fourier mode: mode `n` picks up `exp(−i·2(πn/L)²·τ)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::run::{Monitor, RunSink};
use crate::types::{GridSpec, Nonlinearity, RunConfig, Scheme, Splitting, WaveState};

/// Signed mode index for position `k` in the transform's native output order.
pub fn mode_index(k: usize, points: usize) -> i64 {
    if k < points / 2 {
        k as i64
    } else {
        k as i64 - points as i64
    }
}

/// Per-mode linear propagator for a fixed `(grid, τ)` together with the transform plans it
/// is applied with.
#[derive(Clone)]
pub struct ModePhases {
    grid: GridSpec,
    tau: f64,
    factors: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl fmt::Debug for ModePhases {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModePhases")
            .field("grid", &self.grid)
            .field("tau", &self.tau)
            .field("factors", &self.factors.len())
            .finish()
    }
}

impl ModePhases {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Unit-modulus factors in native transform order (mode `n` at position `n mod N`).
    pub fn factors(&self) -> &[Complex64] {
        &self.factors
    }

    /// Factor for signed mode `n`.
    pub fn factor(&self, n: i64) -> Complex64 {
        let points = self.grid.points() as i64;
        self.factors[n.rem_euclid(points) as usize]
    }

    fn apply(&self, amplitudes: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        scratch.resize(self.scratch_len, Complex64::new(0.0, 0.0));
        self.forward.process_with_scratch(amplitudes, scratch);
        let scale = 1.0 / self.grid.points() as f64;
        for (c, f) in amplitudes.iter_mut().zip(&self.factors) {
            *c *= f * scale;
        }
        self.inverse.process_with_scratch(amplitudes, scratch);
    }
}

pub fn make_mode_phases(grid: GridSpec, tau: f64) -> ModePhases {
    let n = grid.points();
    let length = grid.length();
    let factors = (0..n)
        .map(|k| {
            let wavenumber = PI * mode_index(k, n) as f64 / length;
            Complex64::from_polar(1.0, -2.0 * wavenumber * wavenumber * tau)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let scratch_len = forward
        .get_inplace_scratch_len()
        .max(inverse.get_inplace_scratch_len());
    ModePhases {
        grid,
        tau,
        factors,
        forward,
        inverse,
        scratch_len,
    }
}

fn rotate_nonlinear(
    amplitudes: &mut [Complex64],
    tau: f64,
    nonlinearity: Nonlinearity,
) -> Result<()> {
    if let Nonlinearity::Off = nonlinearity {
        return Ok(());
    }
    // Validate everything first so an error leaves the state untouched.
    let coefficients = amplitudes
        .iter()
        .enumerate()
        .map(|(j, &psi)| nonlinearity.coefficient(j, psi))
        .collect::<Result<Vec<_>>>()?;
    // Rotating in polar form keeps |ψ| within one ulp; a complex multiply can drift by two.
    for (psi, a) in amplitudes.iter_mut().zip(coefficients) {
        let (r, theta) = psi.to_polar();
        *psi = Complex64::from_polar(r, theta + tau * a);
    }
    Ok(())
}

/// Exact solution of the nonlinear sub-problem over `τ`. Time is not advanced.
pub fn nonlinear_step(
    state: &WaveState,
    tau: f64,
    nonlinearity: impl Into<Nonlinearity>,
) -> Result<WaveState> {
    let mut out = state.clone();
    rotate_nonlinear(out.amplitudes_mut(), tau, nonlinearity.into())?;
    Ok(out)
}

/// Exact solution of the free-dispersion sub-problem over `phases.tau()`. Time is not advanced.
pub fn linear_step(state: &WaveState, phases: &ModePhases) -> Result<WaveState> {
    state.grid().ensure_same(phases.grid())?;
    let mut out = state.clone();
    phases.apply(out.amplitudes_mut(), &mut Vec::new());
    Ok(out)
}

/// One Lie step: nonlinear rotation, then free dispersion. Advances time by `τ`.
pub fn split_step(
    state: &WaveState,
    tau: f64,
    nonlinearity: impl Into<Nonlinearity>,
    phases: &ModePhases,
) -> Result<WaveState> {
    if (phases.tau() - tau).abs() > f64::EPSILON * tau {
        return Err(Error::Format(format!(
            "mode phases were built for tau = {}, step requested with tau = {}",
            phases.tau(),
            tau
        )));
    }
    let mut stepper =
        SplitStepper::with_phases(phases.clone(), nonlinearity.into(), Splitting::Lie);
    let mut out = state.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// Reusable split-step integrator for a fixed grid, `τ`, nonlinearity and splitting.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    phases: ModePhases,
    nonlinearity: Nonlinearity,
    splitting: Splitting,
    scratch: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: GridSpec, tau: f64, nonlinearity: Nonlinearity, splitting: Splitting) -> Self {
        Self::with_phases(make_mode_phases(grid, tau), nonlinearity, splitting)
    }

    pub fn with_phases(
        phases: ModePhases,
        nonlinearity: Nonlinearity,
        splitting: Splitting,
    ) -> Self {
        Self {
            phases,
            nonlinearity,
            splitting,
            scratch: Vec::new(),
        }
    }

    pub fn tau(&self) -> f64 {
        self.phases.tau()
    }

    /// Advances `state` in place by one step of `τ`. On error the state is left unchanged.
    pub fn step(&mut self, state: &mut WaveState) -> Result<()> {
        state.grid().ensure_same(self.phases.grid())?;
        let tau = self.phases.tau();
        match self.splitting {
            Splitting::Lie => {
                rotate_nonlinear(state.amplitudes_mut(), tau, self.nonlinearity)?;
                self.phases.apply(state.amplitudes_mut(), &mut self.scratch);
            }
            Splitting::Strang => {
                let backup = state.amplitudes().to_vec();
                let result = rotate_nonlinear(state.amplitudes_mut(), 0.5 * tau, self.nonlinearity)
                    .and_then(|()| {
                        self.phases.apply(state.amplitudes_mut(), &mut self.scratch);
                        rotate_nonlinear(state.amplitudes_mut(), 0.5 * tau, self.nonlinearity)
                    });
                if let Err(e) = result {
                    state.amplitudes_mut().copy_from_slice(&backup);
                    return Err(e);
                }
            }
        }
        state.set_time(state.time() + tau);
        Ok(())
    }
}

/// Runs the split-step scheme for `floor(T/τ)` steps with the configured splitting.
/// Stops with [`Error::Diverged`] on non-finite amplitudes or runaway norm growth.
pub fn evolve_split_step(
    initial: &WaveState,
    config: &RunConfig,
    sink: &mut impl RunSink,
) -> Result<WaveState> {
    if config.scheme != Scheme::SplitStep {
        return Err(Error::config(
            "scheme",
            "evolve_split_step requires scheme = splitstep",
        ));
    }
    config.validate()?;
    initial.grid().ensure_same(&config.grid)?;
    let mut monitor = Monitor::new(sink, config);
    monitor.observe(0, initial)?;
    let mut stepper = SplitStepper::new(
        config.grid,
        config.tau,
        config.saturation.into(),
        config.splitting,
    );
    let mut state = initial.clone();
    for step in 1..=config.steps() {
        stepper
            .step(&mut state)
            .map_err(|e| monitor.escalate(e, step))?;
        state.set_time(initial.time() + step as f64 * config.tau);
        monitor.observe(step, &state)?;
    }
    Ok(state)
}
