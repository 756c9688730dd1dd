use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use crate::diagnostics::{
    conservation_drift_with, peak_report, state_distance, trapezoid_norm_with,
};
use crate::error::{Error, Result};
use crate::io::{parse_config, write_diagnostics, write_evolution, write_manifest, write_snapshot};
use crate::presets::{preset, PRESETS};
use crate::run::{simulate as run_simulation, RunSink};
use crate::stability::{is_stable, stability_report, stability_threshold, StabilityReport};
use crate::types::{DiagnosticsRecord, RunConfig, Scheme, WaveState};

use super::{Overrides, EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, EXIT_UNSTABLE};

/// Conservation tolerance for the single-soliton check.
pub const CONSERVATION_EPSILON: f64 = 1e-3;

pub const EVOLUTION_FILE: &str = "evolution.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const FINAL_SNAPSHOT_FILE: &str = "final.snapshot";

const STABILITY_CAVEAT: &str =
    "note: the analysis linearises the equation; the saturable term can still destabilise a run";

fn preflight(config: &RunConfig) -> Option<StabilityReport> {
    (config.scheme == Scheme::FiniteDifference)
        .then(|| is_stable(config.tau, config.grid.spacing()))
}

fn print_preflight(report: &StabilityReport) {
    if report.stable {
        println!(
            "stability preflight: tau = {} < h^2/2 = {:.7} (stable)",
            report.tau, report.threshold
        );
    } else {
        eprintln!(
            "warning: tau = {} violates tau < h^2/2 = {:.7}; worst |alpha| = {:.6}. Expect blow-up.",
            report.tau, report.threshold, report.worst_magnitude
        );
    }
}

#[derive(Default)]
struct FileSink {
    rows: Vec<Vec<f64>>,
    records: Vec<DiagnosticsRecord>,
    last: Option<WaveState>,
}

impl RunSink for FileSink {
    fn snapshot(&mut self, _step: usize, state: &WaveState) {
        self.rows.push(state.magnitudes());
    }

    fn record(&mut self, record: &DiagnosticsRecord) {
        self.records.push(*record);
    }

    fn state(&mut self, _step: usize, state: &WaveState) {
        self.last = Some(state.clone());
    }
}

fn write_outputs(
    config: &RunConfig,
    sink: &FileSink,
    report: Option<&StabilityReport>,
) -> Result<()> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    if !sink.rows.is_empty() {
        let spacing = config.tau * config.snapshot_stride as f64;
        write_evolution(
            &sink.rows,
            config.grid.length(),
            spacing,
            dir.join(EVOLUTION_FILE),
        )?;
    }
    write_diagnostics(&sink.records, dir.join(DIAGNOSTICS_FILE))?;
    if let Some(last) = &sink.last {
        write_snapshot(last, dir.join(FINAL_SNAPSHOT_FILE))?;
    }
    write_manifest(dir, config, report)?;
    Ok(())
}

pub(super) fn simulate(config: &RunConfig) -> i32 {
    let report = preflight(config);
    if let Some(r) = &report {
        print_preflight(r);
    }
    let mut sink = FileSink::default();
    let outcome = run_simulation(config, &mut sink);
    if let Err(e) = write_outputs(config, &sink, report.as_ref()) {
        eprintln!(
            "error: writing outputs to {}: {e}",
            config.output_dir.display()
        );
        return EXIT_CONFIG;
    }
    match outcome {
        Ok((initial, last)) => {
            let n0 = trapezoid_norm_with(&initial, config.norm_integrand);
            let n1 = trapezoid_norm_with(&last, config.norm_integrand);
            println!(
                "{}: {} steps to t = {}; norm {:.12} -> {:.12} (drift {:.3e}); outputs in {}",
                config.scheme,
                config.steps(),
                last.time(),
                n0,
                n1,
                (n1 - n0).abs(),
                config.output_dir.display()
            );
            EXIT_OK
        }
        Err(e @ Error::Diverged { .. }) => {
            eprintln!(
                "{e}; partial outputs kept in {}",
                config.output_dir.display()
            );
            EXIT_DIVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Parameters for the short single-soliton conservation check of each scheme.
pub fn conservation_config(
    scheme: Scheme,
    steps: usize,
    overrides: &Overrides,
) -> Result<RunConfig> {
    let base: &[(&str, &str)] = match scheme {
        Scheme::SplitStep => &[("L", "64"), ("tau", "0.01"), ("solitons", "8:10")],
        Scheme::FiniteDifference => &[("L", "30"), ("tau", "0.001"), ("solitons", "8:20")],
    };
    let mut pairs: Vec<(String, String)> = base
        .iter()
        .chain(&[("N", "512"), ("S", "-0.1"), ("T", "1")])
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    pairs.push(("scheme".into(), scheme.to_string()));
    let mut config = overrides.apply(pairs)?;
    // The fd bootstrap is an extra step on top of the requested leapfrog steps.
    let total = match config.scheme {
        Scheme::SplitStep => steps,
        Scheme::FiniteDifference => steps + 1,
    };
    if total == 0 {
        return Err(Error::config("steps", "must be at least 1"));
    }
    config.total_time = config.tau * total as f64;
    config.validate()?;
    Ok(config)
}

pub(super) fn conserve(scheme: Scheme, steps: usize, overrides: &Overrides) -> i32 {
    let config = match conservation_config(scheme, steps, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(r) = preflight(&config) {
        print_preflight(&r);
    }
    match run_simulation(&config, &mut ()) {
        Ok((initial, last)) => {
            let drift =
                conservation_drift_with(&initial, &last, config.norm_integrand).expect("same grid");
            let ok = drift < CONSERVATION_EPSILON;
            println!(
                "{} conservation: {} steps, tau = {}, L = {}, N = {}: drift = {:.6e} ({} epsilon = {:e})",
                config.scheme,
                config.steps(),
                config.tau,
                config.grid.length(),
                config.grid.points(),
                drift,
                if ok { "within" } else { "EXCEEDS" },
                CONSERVATION_EPSILON
            );
            if ok {
                EXIT_OK
            } else {
                EXIT_DIVERGED
            }
        }
        Err(e @ Error::Diverged { .. }) => {
            eprintln!("{e}");
            EXIT_DIVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

pub(super) fn stability(tau: f64, length: f64, points: usize, sweep: Option<usize>) -> i32 {
    if !(tau.is_finite() && tau > 0.0) {
        eprintln!("error: tau must be positive");
        return EXIT_CONFIG;
    }
    let grid = match crate::types::GridSpec::new(length, points) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let h = grid.spacing();
    let samples = sweep.unwrap_or(crate::stability::DEFAULT_SWEEP_SAMPLES);
    if samples < 2 {
        eprintln!("error: --sweep needs at least 2 samples");
        return EXIT_CONFIG;
    }
    let report = stability_report(tau, h, samples);
    println!("h = {h}");
    println!("threshold h^2/2 = {}", stability_threshold(h));
    println!("tau = {tau} (tau / threshold = {:.6})", report.ratio());
    println!(
        "verdict: {}",
        if report.stable { "stable" } else { "unstable" }
    );
    println!(
        "worst |alpha| = {:.12} at beta = {:.6}",
        report.worst_magnitude, report.worst_beta
    );
    if let Some(samples) = sweep {
        println!("beta,max_abs_alpha");
        for r in crate::stability::sweep_modes(tau, h, samples) {
            println!("{:.10},{:.15}", r.beta, r.max_magnitude);
        }
    }
    println!("{STABILITY_CAVEAT}");
    if report.stable {
        EXIT_OK
    } else {
        EXIT_UNSTABLE
    }
}

/// Peak count per step, compressed to the steps where the count changes.
#[derive(Default)]
struct PeakTimeline {
    changes: Vec<(usize, f64, usize, f64)>,
    tallest: f64,
}

impl RunSink for PeakTimeline {
    fn state(&mut self, step: usize, state: &WaveState) {
        let report = peak_report(state);
        let top = report.highest().map_or(0.0, |p| p.magnitude);
        self.tallest = self.tallest.max(top);
        if self.changes.last().is_none_or(|c| c.2 != report.count()) {
            self.changes.push((step, state.time(), report.count(), top));
        }
    }
}

/// Fraction of `h²/2` that [`fd_safe_tau`] aims below.
const FD_SAFETY: f64 = 0.6;

/// `τ` halved until it sits below `FD_SAFETY·h²/2`, so `T/τ` stays a whole number of steps.
fn fd_safe_tau(tau: f64, h: f64) -> f64 {
    let limit = FD_SAFETY * stability_threshold(h);
    let mut safe = tau;
    while safe > limit {
        safe *= 0.5;
    }
    safe
}

pub(super) fn compare(config: &RunConfig) -> i32 {
    let tau = fd_safe_tau(config.tau, config.grid.spacing());
    if tau != config.tau {
        println!(
            "tau = {} is not stable for fd on this grid; both schemes run with tau = {tau}",
            config.tau
        );
    }
    let fd_config = RunConfig {
        scheme: Scheme::FiniteDifference,
        tau,
        ..config.clone()
    };
    let ss_config = RunConfig {
        scheme: Scheme::SplitStep,
        tau,
        ..config.clone()
    };
    if let Some(r) = preflight(&fd_config) {
        print_preflight(&r);
    }
    let ((ss, ss_peaks), (fd, fd_peaks)) = std::thread::scope(|scope| {
        let run = |c: &RunConfig| -> (Result<(WaveState, WaveState)>, PeakTimeline) {
            let mut timeline = PeakTimeline::default();
            let result = run_simulation(c, &mut timeline);
            (result, timeline)
        };
        let ss = scope.spawn(move || run(&ss_config));
        let fd = run(&fd_config);
        (ss.join().expect("split-step thread panicked"), fd)
    });

    let mut code = EXIT_OK;
    for (name, result, timeline) in [("splitstep", &ss, &ss_peaks), ("fd", &fd, &fd_peaks)] {
        println!("{name} peak timeline (step, t, count, highest):");
        for (step, t, count, top) in &timeline.changes {
            println!("  {step:>6} {t:>10.5} {count:>3} {top:.6}");
        }
        match result {
            Ok(_) => println!("  tallest peak over run: {:.6}", timeline.tallest),
            Err(e @ Error::Diverged { .. }) => {
                println!("  {e}");
                code = EXIT_DIVERGED;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
    }
    if let (Ok((_, a)), Ok((_, b))) = (&ss, &fd) {
        let d = state_distance(a, b).expect("same grid");
        println!(
            "distance at t = {}: l2 = {:.6e}, linf = {:.6e}",
            a.time(),
            d.l2,
            d.linf
        );
    }
    code
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub(super) fn bench(paths: &[PathBuf], repeat: usize) -> i32 {
    if repeat == 0 {
        eprintln!("error: --repeat must be at least 1");
        return EXIT_CONFIG;
    }
    let configs: Result<Vec<(String, RunConfig)>> = if paths.is_empty() {
        ["fig2", "fig1"]
            .iter()
            .map(|n| preset(n).map(|c| (n.to_string(), c)))
            .collect()
    } else {
        paths
            .iter()
            .map(|p| parse_config(p).map(|c| (p.display().to_string(), c)))
            .collect()
    };
    let configs = match configs {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if repeat == 1 {
        println!("note: single measurement per config; timings are noisy");
    }
    println!("config,scheme,steps,median_run_s,min_run_s,max_run_s,median_step_us");
    let mut code = EXIT_OK;
    for (name, config) in configs {
        let mut times = Vec::with_capacity(repeat);
        for _ in 0..repeat {
            let start = Instant::now();
            let result = run_simulation(&config, &mut ());
            times.push(start.elapsed().as_secs_f64());
            if let Err(e) = result {
                eprintln!("{name}: {e}");
                code = EXIT_DIVERGED;
                break;
            }
        }
        times.sort_by(f64::total_cmp);
        let med = median(&times);
        println!(
            "{name},{},{},{:.6},{:.6},{:.6},{:.3}",
            config.scheme,
            config.steps(),
            med,
            times[0],
            times[times.len() - 1],
            1e6 * med / config.steps() as f64
        );
    }
    code
}

pub(super) fn presets(name: Option<&str>) -> i32 {
    match name {
        None => {
            for (name, text) in PRESETS {
                let title = text.lines().next().unwrap_or("").trim_start_matches("# ");
                println!("{name:<22} {title}");
            }
            EXIT_OK
        }
        Some(name) => match crate::presets::preset_text(name) {
            Some(text) => {
                print!("{text}");
                EXIT_OK
            }
            None => {
                eprintln!("error: no preset named `{name}`");
                EXIT_CONFIG
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_safe_tau_halves_below_threshold() {
        assert_eq!(fd_safe_tau(0.01, 0.125), 0.0025);
        assert_eq!(fd_safe_tau(0.001, 30.0 / 512.0), 0.001);
        assert_eq!(fd_safe_tau(0.004, 30.0 / 512.0), 0.001);
    }
}
