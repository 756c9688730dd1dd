//! Explicit finite differences: one forward-Euler bootstrap step, then leapfrog.
//!
//! Both updates use the periodic three-point Laplacian and the saturable coefficient
//! `A = |ψ|²/(1 + S|ψ|²)` evaluated at the newest level:
//!
//! ```text
//! forward:  ψ_{k+1} = ψ_k     +  τ·i·(½ψ_xx + A·ψ_k)
//! leapfrog: ψ_{k+1} = ψ_{k−1} + 2τ·i·(½ψ_xx + A·ψ_k)
//! ```
//!
//! The leapfrog update is stable for the linearised problem only while `τ < h²/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::run::{Monitor, RunSink};
use crate::types::{Nonlinearity, RunConfig, Saturation, Scheme, WaveState};

/// The two most recent time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LeapfrogState {
    pub previous: WaveState,
    pub current: WaveState,
}

impl LeapfrogState {
    pub fn new(previous: WaveState, current: WaveState) -> Result<Self> {
        previous.grid().ensure_same(current.grid())?;
        Ok(Self { previous, current })
    }
}

fn laplacian_into(psi: &[Complex64], h: f64, out: &mut [Complex64]) {
    let n = psi.len();
    let inv_h2 = 1.0 / (h * h);
    for j in 0..n {
        let left = psi[if j == 0 { n - 1 } else { j - 1 }];
        let right = psi[if j == n - 1 { 0 } else { j + 1 }];
        out[j] = (left - 2.0 * psi[j] + right) * inv_h2;
    }
}

/// Periodic second difference `(ψ_{j−1} − 2ψ_j + ψ_{j+1}) / h²`.
pub fn discrete_laplacian(state: &WaveState) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
    laplacian_into(state.amplitudes(), state.grid().spacing(), &mut out);
    out
}

/// `|ψ|²/(1 + S|ψ|²)`. The error reports index 0 since there is no grid context here.
pub fn saturated_coefficient(psi: Complex64, s: Saturation) -> Result<f64> {
    Nonlinearity::Saturable(s).coefficient(0, psi)
}

/// `i·(½ψ_xx + A·ψ)` at every grid point.
fn right_hand_side(
    psi: &[Complex64],
    h: f64,
    nonlinearity: Nonlinearity,
    out: &mut [Complex64],
) -> Result<()> {
    laplacian_into(psi, h, out);
    for (j, (rhs, &p)) in out.iter_mut().zip(psi).enumerate() {
        let a = nonlinearity.coefficient(j, p)?;
        *rhs = Complex64::i() * (0.5 * *rhs + a * p);
    }
    Ok(())
}

pub fn forward_step(
    state: &WaveState,
    tau: f64,
    nonlinearity: impl Into<Nonlinearity>,
) -> Result<WaveState> {
    let mut rhs = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
    right_hand_side(
        state.amplitudes(),
        state.grid().spacing(),
        nonlinearity.into(),
        &mut rhs,
    )?;
    let amps = state
        .amplitudes()
        .iter()
        .zip(&rhs)
        .map(|(p, r)| p + tau * r)
        .collect();
    WaveState::new(*state.grid(), amps, state.time() + tau)
}

pub fn central_step(
    lf: &LeapfrogState,
    tau: f64,
    nonlinearity: impl Into<Nonlinearity>,
) -> Result<LeapfrogState> {
    let mut next = lf.previous.clone();
    let mut rhs = vec![Complex64::new(0.0, 0.0); next.amplitudes().len()];
    central_step_into(&lf.current, &mut next, tau, nonlinearity.into(), &mut rhs)?;
    Ok(LeapfrogState {
        previous: lf.current.clone(),
        current: next,
    })
}

/// Overwrites `older` (level k−1) with level k+1 computed from `newer` (level k).
fn central_step_into(
    newer: &WaveState,
    older: &mut WaveState,
    tau: f64,
    nonlinearity: Nonlinearity,
    rhs: &mut [Complex64],
) -> Result<()> {
    right_hand_side(
        newer.amplitudes(),
        newer.grid().spacing(),
        nonlinearity,
        rhs,
    )?;
    for (o, r) in older.amplitudes_mut().iter_mut().zip(rhs.iter()) {
        *o += 2.0 * tau * r;
    }
    older.set_time(newer.time() + tau);
    Ok(())
}

/// Reusable leapfrog integrator that swaps buffers instead of allocating per step.
#[derive(Debug, Clone)]
pub struct Leapfrog {
    state: LeapfrogState,
    tau: f64,
    nonlinearity: Nonlinearity,
    rhs: Vec<Complex64>,
    steps: usize,
    start_time: f64,
}

impl Leapfrog {
    /// Bootstraps the second level with one forward step from `initial`.
    pub fn start(initial: &WaveState, tau: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        let current = forward_step(initial, tau, nonlinearity)?;
        let rhs = vec![Complex64::new(0.0, 0.0); initial.amplitudes().len()];
        Ok(Self {
            state: LeapfrogState {
                previous: initial.clone(),
                current,
            },
            tau,
            nonlinearity,
            rhs,
            steps: 1,
            start_time: initial.time(),
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let LeapfrogState { previous, current } = &mut self.state;
        central_step_into(
            current,
            previous,
            self.tau,
            self.nonlinearity,
            &mut self.rhs,
        )?;
        std::mem::swap(previous, current);
        self.steps += 1;
        // Time from the step count so it does not accumulate rounding.
        self.state
            .current
            .set_time(self.start_time + self.steps as f64 * self.tau);
        Ok(())
    }

    pub fn state(&self) -> &LeapfrogState {
        &self.state
    }

    pub fn current(&self) -> &WaveState {
        &self.state.current
    }

    pub fn into_state(self) -> LeapfrogState {
        self.state
    }

    /// Time levels advanced past the initial state.
    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Runs the finite-difference scheme for `floor(T/τ)` steps: one forward step, then leapfrog.
/// Stops with [`Error::Diverged`] on non-finite amplitudes or runaway norm growth.
pub fn evolve_fd(
    initial: &WaveState,
    config: &RunConfig,
    sink: &mut impl RunSink,
) -> Result<LeapfrogState> {
    if config.scheme != Scheme::FiniteDifference {
        return Err(Error::config("scheme", "evolve_fd requires scheme = fd"));
    }
    config.validate()?;
    initial.grid().ensure_same(&config.grid)?;
    let total = config.steps();
    let mut monitor = Monitor::new(sink, config);
    monitor.observe(0, initial)?;

    let nonlinearity = Nonlinearity::from(config.saturation);
    let mut lf =
        Leapfrog::start(initial, config.tau, nonlinearity).map_err(|e| monitor.escalate(e, 1))?;
    monitor.observe(1, lf.current())?;
    for step in 2..=total {
        lf.step().map_err(|e| monitor.escalate(e, step))?;
        monitor.observe(step, lf.current())?;
    }
    Ok(lf.into_state())
}
