//! Smoothing and second-derivative enhancement of heartbeat harmonics.
//!
//! The second derivative is a 7-tap least-squares smoothed
//! differentiator, applied with reflect padding so output length always
//! equals input length.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::{ComplexSeries, RealSeries};

/// 7-tap second-derivative stencil numerators for offsets -3..=3.
/// Divide by 16·t0² for physical units.
pub const STENCIL: [f64; 7] = [1.0, 2.0, -1.0, -4.0, -1.0, 2.0, 1.0];

/// Reflect index into [0, n): mirror about the edge samples without
/// repeating them (x[-1] -> x[1], x[n] -> x[n-2]).
fn reflect(i: i64, n: i64) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - j;
    }
    j as usize
}

/// Convolves with a unit-area Gaussian kernel (σ = `width_s` seconds),
/// truncated at ±4σ, reflect-padded. Length-preserving.
pub fn gaussian_smooth(x: &RealSeries, width_s: f64) -> Result<RealSeries> {
    if width_s <= 0.0 {
        return Err(Error::InvalidParameter("gaussian width must be > 0".into()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let half = (4.0 * width_s / x.t0).ceil() as i64;
    let mut kernel = Vec::with_capacity((2 * half + 1) as usize);
    for k in -half..=half {
        let t = k as f64 * x.t0;
        kernel.push((-t * t / (2.0 * width_s * width_s)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for v in &mut kernel {
        *v /= sum;
    }

    let n = x.len() as i64;
    let out = (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, &w)| w * x.samples[reflect(i + j as i64 - half, n)])
                .sum()
        })
        .collect();
    Ok(RealSeries { samples: out, t0: x.t0, start_time: x.start_time })
}

fn stencil_apply(samples: &[f64], t0: f64) -> Vec<f64> {
    let n = samples.len() as i64;
    let scale = 1.0 / (16.0 * t0 * t0);
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, &c) in STENCIL.iter().enumerate() {
                acc += c * samples[reflect(i + j as i64 - 3, n)];
            }
            acc * scale
        })
        .collect()
}

/// Noise-robust second derivative via the 7-tap smoothed stencil.
///
/// Exact on quadratics at interior samples; the 3 samples at each edge
/// come from reflect padding.
pub fn second_derivative(x: &RealSeries) -> Result<RealSeries> {
    if x.len() < 7 {
        return Err(Error::SeriesTooShort);
    }
    Ok(RealSeries {
        samples: stencil_apply(&x.samples, x.t0),
        t0: x.t0,
        start_time: x.start_time,
    })
}

/// |d²/dt² s(t)| with the stencil applied per component, mean-removed
/// so the non-negative magnitude does not carry a DC pedestal.
pub fn complex_deriv_magnitude(s: &ComplexSeries) -> Result<RealSeries> {
    if s.len() < 7 {
        return Err(Error::SeriesTooShort);
    }
    let re: Vec<f64> = s.samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = s.samples.iter().map(|z| z.im).collect();
    let dre = stencil_apply(&re, s.t0);
    let dim = stencil_apply(&im, s.t0);
    let mut mag: Vec<f64> = dre
        .iter()
        .zip(&dim)
        .map(|(r, i)| Complex64::new(*r, *i).norm())
        .collect();
    let mean = mag.iter().sum::<f64>() / mag.len() as f64;
    for v in &mut mag {
        *v -= mean;
    }
    Ok(RealSeries { samples: mag, t0: s.t0, start_time: s.start_time })
}

/// Exact frequency response of the 7-tap stencil at frequency `f` Hz.
pub fn stencil_response(f: f64, t0: f64) -> f64 {
    let w = 2.0 * PI * f * t0;
    (2.0 * (3.0 * w).cos() + 4.0 * (2.0 * w).cos() - 2.0 * w.cos() - 4.0) / (16.0 * t0 * t0)
}
