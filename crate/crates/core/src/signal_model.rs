//! Displacement recovery from per-range-bin complex radar data.
//!
//! Static clutter is removed by subtracting each bin's slow-time mean,
//! the target bin is picked by time-averaged power, and chest
//! displacement is recovered from the unwrapped echo phase scaled by
//! λ/4π.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::{ComplexSeries, RadarConfig, RangeBinMatrix, RealSeries};

/// Subtracts the slow-time mean from every range bin.
///
/// Idempotent: a second application changes nothing beyond rounding.
pub fn clutter_suppress(m: &RangeBinMatrix) -> Result<RangeBinMatrix> {
    if m.data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_t = m.n_samples();
    let mut out = m.clone();
    for bin in 0..m.n_bins {
        let mean = (0..n_t).map(|t| m.at(t, bin)).sum::<Complex64>() / n_t as f64;
        for t in 0..n_t {
            out.data[t * m.n_bins + bin] -= mean;
        }
    }
    Ok(out)
}

/// Index of the bin with the largest time-averaged power; ties go to
/// the smallest index. Expects clutter-suppressed input.
pub fn locate_target(m: &RangeBinMatrix) -> Result<usize> {
    if m.data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_t = m.n_samples();
    let mut best = 0usize;
    let mut best_power = f64::NEG_INFINITY;
    for bin in 0..m.n_bins {
        let p: f64 = (0..n_t).map(|t| m.at(t, bin).norm_sqr()).sum::<f64>() / n_t as f64;
        if p > best_power {
            best_power = p;
            best = bin;
        }
    }
    if best_power <= 0.0 {
        return Err(Error::NoTargetPower);
    }
    Ok(best)
}

/// Wraps a phase difference into (-π, π]; a step of exactly π maps to +π.
fn wrap_step(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Displacement d(t) = (λ/4π) · unwrap(∠s(t)).
///
/// The first sample uses its principal phase; subsequent samples
/// accumulate wrapped phase steps so no step exceeds π in magnitude.
pub fn phase_displacement(s: &ComplexSeries, cfg: &RadarConfig) -> Result<RealSeries> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let scale = cfg.wavelength / (4.0 * PI);
    let mut out = Vec::with_capacity(s.len());
    let mut prev_phase = 0.0f64;
    let mut unwrapped = 0.0f64;
    for (i, z) in s.samples.iter().enumerate() {
        if z.norm_sqr() == 0.0 {
            return Err(Error::UndefinedPhase(i));
        }
        let phase = z.arg();
        if i == 0 {
            unwrapped = phase;
        } else {
            unwrapped += wrap_step(phase - prev_phase);
        }
        prev_phase = phase;
        out.push(scale * unwrapped);
    }
    Ok(RealSeries { samples: out, t0: s.t0, start_time: s.start_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn matrix(cols: &[Vec<Complex64>], t0: f64) -> RangeBinMatrix {
        let n_t = cols[0].len();
        let n_bins = cols.len();
        let mut data = Vec::with_capacity(n_t * n_bins);
        for t in 0..n_t {
            for col in cols {
                data.push(col[t]);
            }
        }
        RangeBinMatrix::new(data, n_bins, t0, 0.05).unwrap()
    }

    #[test]
    fn clutter_constant_column_zeroes() {
        let c = Complex64::new(3.0, -2.0);
        let m = matrix(&[vec![c; 8]], 0.01);
        let out = clutter_suppress(&m).unwrap();
        for z in &out.data {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn clutter_zero_mean_fixed_point() {
        let col = vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let m = matrix(&[col.clone()], 0.01);
        let out = clutter_suppress(&m).unwrap();
        assert_eq!(out.bin_series(0).samples, col);
    }

    #[test]
    fn clutter_hand_computed() {
        let col = vec![Complex64::new(2.0, 2.0), Complex64::new(4.0, 0.0)];
        let m = matrix(&[col], 0.01);
        let out = clutter_suppress(&m).unwrap();
        let s = out.bin_series(0);
        assert_abs_diff_eq!(s.samples[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.samples[0].im, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.samples[1].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.samples[1].im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn clutter_empty_errors() {
        let m = RangeBinMatrix { data: vec![], n_bins: 1, t0: 0.01, bin_spacing: 0.05 };
        assert!(matches!(clutter_suppress(&m), Err(Error::EmptyInput)));
    }

    #[test]
    fn locate_argmax_and_tiebreak() {
        let a = vec![Complex64::new(0.1f64.sqrt(), 0.0); 4];
        let b = vec![Complex64::new(0.9f64.sqrt(), 0.0); 4];
        assert_eq!(locate_target(&matrix(&[a.clone(), b.clone()], 0.01)).unwrap(), 1);
        assert_eq!(locate_target(&matrix(&[a.clone(), a.clone()], 0.01)).unwrap(), 0);
    }

    #[test]
    fn locate_all_zero_errors() {
        let z = vec![Complex64::new(0.0, 0.0); 4];
        assert!(matches!(locate_target(&matrix(&[z.clone(), z], 0.01)), Err(Error::NoTargetPower)));
    }

    #[test]
    fn locate_matches_brute_force_power() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cols: Vec<Vec<Complex64>> = (0..3)
            .map(|_| {
                (0..50)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let m = matrix(&cols, 0.01);
        let powers: Vec<f64> = cols
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>() / c.len() as f64)
            .collect();
        let expect = powers
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(locate_target(&m).unwrap(), expect);
    }

    #[test]
    fn phase_roundtrip_sine() {
        let lambda = 5.0e-3;
        let fs = 100.0;
        let cfg = RadarConfig { wavelength: lambda, fs };
        let n = 1000;
        let d: Vec<f64> = (0..n)
            .map(|i| 1.0e-3 * (2.0 * PI * 0.2 * i as f64 / fs).sin())
            .collect();
        let s = ComplexSeries {
            samples: d
                .iter()
                .map(|&di| Complex64::from_polar(1.0, 4.0 * PI * di / lambda))
                .collect(),
            t0: 1.0 / fs,
            start_time: 0.0,
        };
        let rec = phase_displacement(&s, &cfg).unwrap();
        // recover up to a constant offset
        let offset = rec.samples[0] - d[0];
        for (r, truth) in rec.samples.iter().zip(&d) {
            assert!((r - offset - truth).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_constant_is_zero() {
        let s = ComplexSeries {
            samples: vec![Complex64::new(1.0, 0.0); 10],
            t0: 0.01,
            start_time: 0.0,
        };
        let d = phase_displacement(&s, &RadarConfig::default()).unwrap();
        assert!(d.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_ramp_has_no_jump() {
        let cfg = RadarConfig::default();
        let s = ComplexSeries {
            samples: (0..100)
                .map(|i| Complex64::from_polar(1.0, 0.4 * i as f64))
                .collect(),
            t0: 0.01,
            start_time: 0.0,
        };
        let d = phase_displacement(&s, &cfg).unwrap();
        let max_step = cfg.wavelength / (4.0 * PI) * PI;
        for w in d.samples.windows(2) {
            assert!((w[1] - w[0]).abs() <= max_step + 1e-15);
        }
    }

    #[test]
    fn phase_zero_sample_errors() {
        let s = ComplexSeries {
            samples: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            t0: 0.01,
            start_time: 0.0,
        };
        assert!(matches!(
            phase_displacement(&s, &RadarConfig::default()),
            Err(Error::UndefinedPhase(1))
        ));
    }

    proptest! {
        #[test]
        fn clutter_suppress_idempotent(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<Vec<Complex64>> = (0..2)
                .map(|_| (0..20)
                    .map(|_| Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
                    .collect())
                .collect();
            let m = matrix(&cols, 0.01);
            let once = clutter_suppress(&m).unwrap();
            let twice = clutter_suppress(&once).unwrap();
            for (a, b) in once.data.iter().zip(&twice.data) {
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn locate_scale_invariant(seed in 0u64..200, re in 0.1f64..3.0, im in -3.0f64..3.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<Vec<Complex64>> = (0..3)
                .map(|_| (0..20)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect())
                .collect();
            let m = matrix(&cols, 0.01);
            let k = Complex64::new(re, im);
            let scaled = RangeBinMatrix {
                data: m.data.iter().map(|z| z * k).collect(),
                ..m.clone()
            };
            prop_assert_eq!(locate_target(&m).unwrap(), locate_target(&scaled).unwrap());
        }

        #[test]
        fn phase_roundtrip_smooth_random(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cfg = RadarConfig::default();
            let fs = 100.0;
            // random sum of low-frequency sines, amplitude up to 2 mm
            let terms: Vec<(f64, f64, f64)> = (0..4)
                .map(|_| (rng.gen_range(0.1..1.5), rng.gen_range(0.0..2.0e-3), rng.gen_range(0.0..PI)))
                .collect();
            let d: Vec<f64> = (0..500)
                .map(|i| {
                    let t = i as f64 / fs;
                    terms.iter().map(|(f, a, p)| a * (2.0 * PI * f * t + p).sin()).sum()
                })
                .collect();
            let s = ComplexSeries {
                samples: d.iter()
                    .map(|&di| Complex64::from_polar(1.0, 4.0 * PI * di / cfg.wavelength))
                    .collect(),
                t0: 1.0 / fs,
                start_time: 0.0,
            };
            let rec = phase_displacement(&s, &cfg).unwrap();
            let offset = rec.samples[0] - d[0];
            for (r, truth) in rec.samples.iter().zip(&d) {
                prop_assert!((r - offset - truth).abs() < 1e-9);
            }
        }
    }
}
