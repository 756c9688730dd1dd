//! Scheme-independent run driving: snapshot/diagnostics sinks and divergence detection.

use crate::diagnostics::diagnostics_record;
use crate::error::{Error, Result};
use crate::fd::evolve_fd;
use crate::initial::init_solitons;
use crate::spectral::evolve_split_step;
use crate::types::{DiagnosticsRecord, NormIntegrand, RunConfig, Scheme, WaveState};

/// A run is declared diverged once the norm exceeds this multiple of its initial value.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

/// Receives run output as it is produced.
pub trait RunSink {
    /// Called for steps `0, stride, 2·stride, …` strictly before the final step.
    fn snapshot(&mut self, _step: usize, _state: &WaveState) {}

    /// Called once per step, including step 0 and the final step.
    fn record(&mut self, _record: &DiagnosticsRecord) {}

    /// Called with every accepted state, after `record`.
    fn state(&mut self, _step: usize, _state: &WaveState) {}
}

impl RunSink for () {}

/// Collects everything in memory.
#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub snapshots: Vec<(usize, WaveState)>,
    pub records: Vec<DiagnosticsRecord>,
}

impl RunSink for MemorySink {
    fn snapshot(&mut self, step: usize, state: &WaveState) {
        self.snapshots.push((step, state.clone()));
    }

    fn record(&mut self, record: &DiagnosticsRecord) {
        self.records.push(*record);
    }
}

impl<S: RunSink + ?Sized> RunSink for &mut S {
    fn snapshot(&mut self, step: usize, state: &WaveState) {
        (**self).snapshot(step, state)
    }

    fn record(&mut self, record: &DiagnosticsRecord) {
        (**self).record(record)
    }

    fn state(&mut self, step: usize, state: &WaveState) {
        (**self).state(step, state)
    }
}

/// Feeds a sink and watches for blow-up.
pub(crate) struct Monitor<'a, S: RunSink> {
    sink: &'a mut S,
    integrand: NormIntegrand,
    stride: usize,
    total_steps: usize,
    limit: f64,
    last_finite_norm: f64,
}

impl<'a, S: RunSink> Monitor<'a, S> {
    pub(crate) fn new(sink: &'a mut S, config: &RunConfig) -> Self {
        Self {
            sink,
            integrand: config.norm_integrand,
            stride: config.snapshot_stride,
            total_steps: config.steps(),
            limit: f64::INFINITY,
            last_finite_norm: f64::NAN,
        }
    }

    /// A singular nonlinearity mid-run is a numerical blow-up, not a configuration problem.
    pub(crate) fn escalate(&self, error: Error, step: usize) -> Error {
        match error {
            Error::SingularNonlinearity { .. } => Error::Diverged {
                step,
                last_finite_norm: self.last_finite_norm,
            },
            other => other,
        }
    }

    pub(crate) fn observe(&mut self, step: usize, state: &WaveState) -> Result<()> {
        let record = diagnostics_record(step, state, self.integrand);
        if !state.is_finite() || !record.norm.is_finite() || record.norm > self.limit {
            return Err(Error::Diverged {
                step,
                last_finite_norm: self.last_finite_norm,
            });
        }
        if step == 0 {
            self.limit = DIVERGENCE_FACTOR * record.norm;
        }
        self.last_finite_norm = record.norm;
        self.sink.record(&record);
        if step < self.total_steps && step.is_multiple_of(self.stride) {
            self.sink.snapshot(step, state);
        }
        self.sink.state(step, state);
        Ok(())
    }
}

/// Builds the initial state from the configured solitons and runs the configured scheme,
/// returning the initial and final states.
pub fn simulate(config: &RunConfig, sink: &mut impl RunSink) -> Result<(WaveState, WaveState)> {
    config.validate()?;
    let initial = init_solitons(config.grid, &config.solitons, config.saturation)?;
    let last = match config.scheme {
        Scheme::SplitStep => evolve_split_step(&initial, config, sink)?,
        Scheme::FiniteDifference => evolve_fd(&initial, config, sink)?.current,
    };
    Ok((initial, last))
}
