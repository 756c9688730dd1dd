//! One- and two-soliton initial data.
//!
//! The profile is `f(x) = 2√2·e^{√2x} / (1 + B·e^{2√2x})` with `B = 3/2 − 2S`, carried by the
//! phase `exp(i·t + i·v·x)` where `x` is measured from the soliton centre. For `B > 0` this is a
//! `sech` pulse of height `√(2/B)`; for `B ≤ 0` the denominator changes sign somewhere and the
//! profile is only usable if no grid point lands exactly on the pole.

use std::f64::consts::SQRT_2;

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{GridSpec, Saturation, SolitonSpec, WaveState};

pub fn soliton_profile(x_rel: f64, t: f64, s: Saturation, velocity: f64) -> Result<Complex64> {
    let b = s.profile_coefficient();
    let e = (SQRT_2 * x_rel).exp();
    let denom = 1.0 + b * e * e;
    if denom == 0.0 {
        return Err(Error::SingularProfile { x: x_rel });
    }
    // Far tails overflow e² before the ratio does; the limit there is zero.
    let f = if e.is_infinite() || (e * e).is_infinite() {
        if b == 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        2.0 * SQRT_2 * e / denom
    };
    Ok(f * Complex64::from_polar(1.0, t + velocity * x_rel))
}

fn warn_if_unbounded(s: Saturation) {
    if s.profile_coefficient() <= 0.0 {
        warn!(
            "S = {} gives B = {} <= 0: the soliton profile has a pole and initial data may be very large",
            s.value(),
            s.profile_coefficient()
        );
    }
}

fn soliton_samples(grid: &GridSpec, spec: SolitonSpec, s: Saturation) -> Result<Vec<Complex64>> {
    (0..grid.points())
        .map(|j| soliton_profile(grid.coordinate(j) - spec.offset, 0.0, s, spec.velocity))
        .collect()
}

pub fn init_one_soliton(grid: GridSpec, spec: SolitonSpec, s: Saturation) -> Result<WaveState> {
    warn_if_unbounded(s);
    WaveState::new(grid, soliton_samples(&grid, spec, s)?, 0.0)
}

/// Superposition of two solitons.
pub fn init_two_soliton(
    grid: GridSpec,
    first: SolitonSpec,
    second: SolitonSpec,
    s: Saturation,
) -> Result<WaveState> {
    warn_if_unbounded(s);
    let mut amps = soliton_samples(&grid, first, s)?;
    for (a, b) in amps.iter_mut().zip(soliton_samples(&grid, second, s)?) {
        *a += b;
    }
    WaveState::new(grid, amps, 0.0)
}

/// Dispatches on the number of solitons (one or two).
pub fn init_solitons(grid: GridSpec, solitons: &[SolitonSpec], s: Saturation) -> Result<WaveState> {
    match solitons {
        [one] => init_one_soliton(grid, *one, s),
        [first, second] => init_two_soliton(grid, *first, *second, s),
        _ => Err(Error::config(
            "solitons",
            format!("expected one or two solitons, got {}", solitons.len()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_grid;

    fn max_magnitude(state: &WaveState) -> (usize, f64) {
        state
            .magnitudes()
            .into_iter()
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (j, m)| if m > best.1 { (j, m) } else { best },
            )
    }

    #[test]
    fn profile_at_centre() {
        let z = soliton_profile(0.0, 0.0, Saturation(-0.1), 20.0).unwrap();
        assert!((z.re - 1.047_565_601_757_848).abs() < 1e-14);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn profile_decays_and_ignores_velocity_in_magnitude() {
        for v in [-20.0, 0.0, 3.0, 20.0] {
            assert!(
                soliton_profile(-20.0, 0.0, Saturation(-0.1), v)
                    .unwrap()
                    .norm()
                    < 1e-10
            );
        }
        for x in [-3.0, -0.4, 0.0, 0.7, 5.0] {
            let a = soliton_profile(x, 0.3, Saturation(0.2), 17.0)
                .unwrap()
                .norm();
            let b = soliton_profile(x, 0.3, Saturation(0.2), 0.0)
                .unwrap()
                .norm();
            assert!((a - b).abs() <= 1e-15 * b.max(1.0));
        }
    }

    #[test]
    fn profile_pole_is_reported() {
        // S = 5/4 gives B = -1, so the denominator vanishes exactly at x = 0.
        assert!(matches!(
            soliton_profile(0.0, 0.0, Saturation(1.25), 0.0),
            Err(Error::SingularProfile { x }) if x == 0.0
        ));
        // Off the pole the profile is merely large.
        assert!(
            soliton_profile(0.01, 0.0, Saturation(1.25), 0.0)
                .unwrap()
                .norm()
                > 10.0
        );
    }

    #[test]
    fn one_soliton_peak() {
        let g = make_grid(64.0, 512).unwrap();
        let st = init_one_soliton(g, SolitonSpec::new(8.0, 10.0), Saturation(-0.1)).unwrap();
        let (j, m) = max_magnitude(&st);
        // Peak of the continuous profile sits at x_rel = -ln(B)/(2√2) ≈ -0.19, i.e. one or two cells left of 64.
        assert!((62..=64).contains(&j), "peak index {j}");
        assert!((m - 1.084_652_289_093).abs() < 2.0 * g.spacing());
        assert_eq!(st.time(), 0.0);

        let st0 = init_one_soliton(g, SolitonSpec::new(32.0, 0.0), Saturation(0.0)).unwrap();
        assert!((max_magnitude(&st0).1 - 1.154_700_538_379).abs() < 2.0 * g.spacing());
    }

    #[test]
    fn velocity_changes_phase_only() {
        let g = make_grid(64.0, 512).unwrap();
        let a = init_one_soliton(g, SolitonSpec::new(20.0, 0.0), Saturation(-0.1)).unwrap();
        let b = init_one_soliton(g, SolitonSpec::new(20.0, 20.0), Saturation(-0.1)).unwrap();
        for (x, y) in a.magnitudes().iter().zip(b.magnitudes()) {
            assert!((x - y).abs() <= 1e-15 * x.max(1e-300));
        }
    }

    #[test]
    fn two_solitons_superpose() {
        let g = make_grid(64.0, 512).unwrap();
        let s = Saturation(-0.1);
        let (p, q) = (SolitonSpec::new(8.0, 20.0), SolitonSpec::new(18.0, -20.0));
        let two = init_two_soliton(g, p, q, s).unwrap();
        let one_p = init_one_soliton(g, p, s).unwrap();
        let one_q = init_one_soliton(g, q, s).unwrap();
        for j in 0..g.points() {
            assert_eq!(
                two.amplitudes()[j],
                one_p.amplitudes()[j] + one_q.amplitudes()[j]
            );
        }
        let mags = two.magnitudes();
        let left = mags[..104].iter().cloned().fold(0.0, f64::max);
        let right = mags[104..].iter().cloned().fold(0.0, f64::max);
        assert!((left - 1.0847).abs() < 0.25 && (right - 1.0847).abs() < 0.25);

        let doubled = init_two_soliton(g, p, p, s).unwrap();
        for j in 0..g.points() {
            assert_eq!(doubled.amplitudes()[j], one_p.amplitudes()[j] * 2.0);
        }
    }

    #[test]
    fn unique_local_maximum_when_b_positive() {
        let g = make_grid(64.0, 512).unwrap();
        for s in [-2.0, -0.1, 0.0, 0.4, 0.7] {
            let st = init_one_soliton(g, SolitonSpec::new(32.0, 5.0), Saturation(s)).unwrap();
            let m = st.magnitudes();
            assert!(m[0] < 1e-8 && m[511] < 1e-8);
            let maxima = (1..511)
                .filter(|&j| m[j] > m[j - 1] && m[j] > m[j + 1])
                .count();
            assert_eq!(maxima, 1, "S = {s}");
            let expected = (2.0 / Saturation(s).profile_coefficient()).sqrt();
            assert!((m.iter().cloned().fold(0.0, f64::max) - expected).abs() < 2.0 * g.spacing());
        }
    }

    #[test]
    fn init_solitons_requires_one_or_two() {
        let g = make_grid(8.0, 8).unwrap();
        assert!(init_solitons(g, &[], Saturation(0.0)).is_err());
        let three = [SolitonSpec::new(1.0, 0.0); 3];
        assert!(init_solitons(g, &three, Saturation(0.0)).is_err());
    }
}
