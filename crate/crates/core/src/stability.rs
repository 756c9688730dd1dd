//! Von Neumann analysis of the leapfrog scheme for the linearised equation `iψ_t + ½ψ_xx = 0`.
//!
//! Inserting `ψ_{j,k} = α^k·e^{iβj}` into the leapfrog update gives
//! `α² + (4τi/h²)·sin²(β/2)·α − 1 = 0`. Writing `q = 2τ/h²` and `s = sin²(β/2)`, the roots are
//! `α = −i·q·s ± √(1 − q²s²)`. While the discriminant is positive both roots lie on the unit
//! circle; once `q·s > 1` one root leaves it. Requiring this for every `β` gives `τ < h²/2`.
//!
//! The nonlinear term is ignored, so the threshold is a guide for the full scheme rather than a
//! guarantee.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Default number of β samples used by [`is_stable`].
pub const DEFAULT_SWEEP_SAMPLES: usize = 360;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationResult {
    pub beta: f64,
    pub roots: [Complex64; 2],
    pub max_magnitude: f64,
}

pub fn amplification_roots(tau: f64, h: f64, beta: f64) -> AmplificationResult {
    let q = 2.0 * tau / (h * h);
    let s = (0.5 * beta).sin().powi(2);
    let centre = Complex64::new(0.0, -q * s);
    let disc = 1.0 - q * q * s * s;
    let root = if disc >= 0.0 {
        Complex64::new(disc.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-disc).sqrt())
    };
    let roots = [centre + root, centre - root];
    AmplificationResult {
        beta,
        roots,
        max_magnitude: roots[0].norm().max(roots[1].norm()),
    }
}

/// Roots at `β = 2πk/samples` for `k = 0..samples`.
pub fn sweep_modes(tau: f64, h: f64, samples: usize) -> Vec<AmplificationResult> {
    (0..samples)
        .map(|k| amplification_roots(tau, h, 2.0 * PI * k as f64 / samples as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub tau: f64,
    pub h: f64,
    /// `h²/2`
    pub threshold: f64,
    /// Strict `τ < h²/2`; the marginal case has a defective double root and grows linearly.
    pub stable: bool,
    /// Largest `|α|` over the β sweep.
    pub worst_magnitude: f64,
    pub worst_beta: f64,
    pub samples: usize,
}

impl StabilityReport {
    pub fn ratio(&self) -> f64 {
        self.tau / self.threshold
    }
}

pub fn stability_threshold(h: f64) -> f64 {
    0.5 * h * h
}

pub fn is_stable(tau: f64, h: f64) -> StabilityReport {
    stability_report(tau, h, DEFAULT_SWEEP_SAMPLES)
}

pub fn stability_report(tau: f64, h: f64, samples: usize) -> StabilityReport {
    let threshold = stability_threshold(h);
    // β = π is the worst mode; include it even when the sweep would skip it.
    let worst = sweep_modes(tau, h, samples.max(2))
        .into_iter()
        .chain(std::iter::once(amplification_roots(tau, h, PI)))
        .max_by(|a, b| a.max_magnitude.total_cmp(&b.max_magnitude))
        .expect("sweep is nonempty");
    StabilityReport {
        tau,
        h,
        threshold,
        stable: tau < threshold,
        worst_magnitude: worst.max_magnitude,
        worst_beta: worst.beta,
        samples,
    }
}
