//! Shared domain types: the periodic grid, wave states, soliton parameters and run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Periodic 1-D mesh on `[0, length)` with `points` samples at `x_j = j·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    length: f64,
    points: usize,
}

impl GridSpec {
    /// `points` must be a power of two no smaller than 8 and `length` positive and finite.
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(
                "L",
                format!("length must be positive, got {length}"),
            ));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::config(
                "N",
                format!("point count must be a power of two and at least 8, got {points}"),
            ));
        }
        Ok(Self { length, points })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left_length: self.length,
                left_points: self.points,
                right_length: other.length,
                right_points: other.points,
            })
        }
    }
}

/// Equivalent to [`GridSpec::new`].
pub fn make_grid(length: f64, points: usize) -> Result<GridSpec> {
    GridSpec::new(length, points)
}

/// Complex field samples on a grid at simulation time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl WaveState {
    pub fn new(grid: GridSpec, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.points() {
            return Err(Error::Format(format!(
                "wave state needs {} amplitudes, got {}",
                grid.points(),
                amplitudes.len()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            time,
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.points()],
            time: 0.0,
        }
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = (0..grid.points()).map(|j| f(grid.coordinate(j))).collect();
        Self {
            grid,
            amplitudes,
            time,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm()).collect()
    }

    /// False once any component has overflowed or become NaN.
    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Centre and phase-gradient velocity of one soliton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonSpec {
    pub offset: f64,
    pub velocity: f64,
}

impl SolitonSpec {
    pub fn new(offset: f64, velocity: f64) -> Self {
        Self { offset, velocity }
    }
}

/// Saturation strength `S` of the nonlinearity `|ψ|²ψ / (1 + S|ψ|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation(pub f64);

impl Saturation {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Soliton profile coefficient `B = 3/2 − 2S`.
    pub fn profile_coefficient(self) -> f64 {
        1.5 - 2.0 * self.0
    }

    /// `|ψ|² / (1 + S|ψ|²)` for a given intensity, or `None` where the denominator vanishes.
    pub fn coefficient(self, intensity: f64) -> Option<f64> {
        let denom = 1.0 + self.0 * intensity;
        (denom != 0.0).then(|| intensity / denom)
    }
}

/// Whether the stepping schemes include the saturable term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Saturable(Saturation),
    /// Free dispersion only.
    Off,
}

impl From<Saturation> for Nonlinearity {
    fn from(s: Saturation) -> Self {
        Nonlinearity::Saturable(s)
    }
}

impl Nonlinearity {
    pub(crate) fn coefficient(self, index: usize, psi: Complex64) -> Result<f64> {
        match self {
            Nonlinearity::Off => Ok(0.0),
            Nonlinearity::Saturable(s) => {
                let intensity = psi.norm_sqr();
                s.coefficient(intensity)
                    .ok_or(Error::SingularNonlinearity { index, intensity })
            }
        }
    }
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident, $key:literal { $($variant:ident => $word:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub fn keyword(self) -> &'static str {
                match self {
                    $($name::$variant => $word),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($word => Ok($name::$variant),)+
                    other => Err(Error::config(
                        $key,
                        format!(
                            "unknown value `{}` (expected one of: {})",
                            other,
                            [$($word),+].join(", ")
                        ),
                    )),
                }
            }
        }
    };
}

keyword_enum!(
    /// Time integration scheme.
    Scheme, "scheme" {
        SplitStep => "splitstep",
        FiniteDifference => "fd",
    }
);

keyword_enum!(
    /// Operator splitting used by the split-step scheme.
    Splitting, "splitting" {
        Lie => "lie",
        Strang => "strang",
    }
);

keyword_enum!(
    /// Integrand used for the conserved norm. `Abs` reproduces the reference Python helper.
    NormIntegrand, "norm_integrand" {
        Abs2 => "abs2",
        Abs => "abs",
    }
);

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub saturation: Saturation,
    pub tau: f64,
    pub total_time: f64,
    pub grid: GridSpec,
    pub solitons: Vec<SolitonSpec>,
    pub snapshot_stride: usize,
    pub splitting: Splitting,
    pub norm_integrand: NormIntegrand,
    pub output_dir: PathBuf,
}

pub const DEFAULT_OUTPUT_DIR: &str = "satnls-out";

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.saturation.0.is_finite() {
            return Err(Error::config("S", "must be finite"));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::config(
                "tau",
                format!("must be positive, got {}", self.tau),
            ));
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::config(
                "T",
                format!("must be positive, got {}", self.total_time),
            ));
        }
        if step_count(self.total_time, self.tau) < 1 {
            return Err(Error::config(
                "T",
                format!(
                    "T = {} is shorter than one step of tau = {}",
                    self.total_time, self.tau
                ),
            ));
        }
        if self.solitons.is_empty() || self.solitons.len() > 2 {
            return Err(Error::config(
                "solitons",
                format!("expected one or two solitons, got {}", self.solitons.len()),
            ));
        }
        for s in &self.solitons {
            if !(s.offset >= 0.0 && s.offset < self.grid.length()) || !s.velocity.is_finite() {
                return Err(Error::config(
                    "solitons",
                    format!(
                        "soliton {}:{} must have finite velocity and offset in [0, {})",
                        s.offset,
                        s.velocity,
                        self.grid.length()
                    ),
                ));
            }
        }
        if self.snapshot_stride == 0 {
            return Err(Error::config("snapshot_stride", "must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        step_count(self.total_time, self.tau)
    }
}

/// `floor(total_time / tau)`, treating quotients within 1e-9 relative of an integer as that integer
/// so that e.g. `1 / 0.001` counts 1000 steps.
pub fn step_count(total_time: f64, tau: f64) -> usize {
    let ratio = total_time / tau;
    if !ratio.is_finite() || ratio <= 0.0 {
        return 0;
    }
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    }
}

/// One row of the per-step diagnostics log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step_index: usize,
    pub time: f64,
    pub norm: f64,
    pub peak_amplitude: f64,
    pub peak_index: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_examples() {
        assert_eq!(make_grid(64.0, 512).unwrap().spacing(), 0.125);
        assert_eq!(make_grid(30.0, 512).unwrap().spacing(), 0.05859375);
        assert_eq!(make_grid(1.0, 8).unwrap().spacing(), 0.125);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(make_grid(1.0, 500), Err(Error::Config { key, .. }) if key == "N"));
        assert!(make_grid(1.0, 4).is_err());
        assert!(matches!(make_grid(0.0, 8), Err(Error::Config { key, .. }) if key == "L"));
        assert!(make_grid(-3.0, 8).is_err());
        assert!(make_grid(f64::NAN, 8).is_err());
    }

    #[test]
    fn wave_state_length_checked() {
        let g = make_grid(1.0, 8).unwrap();
        assert!(WaveState::new(g, vec![Complex64::new(1.0, 0.0); 7], 0.0).is_err());
        let mut s = WaveState::zeros(g);
        assert!(s.is_finite());
        s.amplitudes_mut()[3].im = f64::INFINITY;
        assert!(!s.is_finite());
    }

    #[test]
    fn step_count_rounds_representation_error() {
        assert_eq!(step_count(1.0, 0.001), 1000);
        assert_eq!(step_count(1.0, 0.01), 100);
        assert_eq!(step_count(0.5, 0.000125), 4000);
        assert_eq!(step_count(1.0, 0.3), 3);
        assert_eq!(step_count(0.001, 0.001), 1);
        assert_eq!(step_count(0.0005, 0.001), 0);
    }

    #[test]
    fn profile_coefficient() {
        assert_eq!(Saturation(-0.1).profile_coefficient(), 1.7);
        assert_eq!(Saturation(0.0).profile_coefficient(), 1.5);
        assert!(Saturation(-1.0).coefficient(1.0).is_none());
    }

    #[test]
    fn keyword_parsing() {
        assert_eq!("fd".parse::<Scheme>().unwrap(), Scheme::FiniteDifference);
        assert_eq!(" strang ".parse::<Splitting>().unwrap(), Splitting::Strang);
        assert!(
            matches!("rk4".parse::<Scheme>(), Err(Error::Config { key, .. }) if key == "scheme")
        );
    }

    proptest::proptest! {
        #[test]
        fn spacing_times_points_reproduces_length(length in 1e-3f64..1e4, exp in 3u32..14) {
            let g = make_grid(length, 1usize << exp).unwrap();
            let back = g.spacing() * g.points() as f64;
            proptest::prop_assert!((back - length).abs() <= f64::EPSILON * length);
        }
    }
}
