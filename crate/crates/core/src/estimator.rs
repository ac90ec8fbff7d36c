//! Sliding-window interval estimation with harmonic-order selection,
//! two-order consistency gating, and Hampel outlier removal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess;
use crate::series::{ComplexSeries, RealSeries};
use crate::spectral::{self, NlhsParams};

/// One interval estimate; `None` marks a gated-out or removed entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackEntry {
    /// Window-center timestamp in seconds.
    pub time: f64,
    /// Estimated heartbeat interval in seconds, if accepted.
    pub interval: Option<f64>,
}

/// Timestamped heartbeat-interval estimates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalTrack {
    pub entries: Vec<TrackEntry>,
}

impl IntervalTrack {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_present(&self) -> usize {
        self.entries.iter().filter(|e| e.interval.is_some()).count()
    }
}

/// Sliding-window and post-processing parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorParams {
    /// Analysis window length in seconds.
    pub window_s: f64,
    /// Window hop in seconds.
    pub hop_s: f64,
    /// Smallest harmonic order tried by order selection.
    pub n_min: usize,
    /// Largest harmonic order tried by order selection.
    pub n_max: usize,
    /// Consistency gate threshold in seconds.
    pub t_theta: f64,
    /// Gaussian smoothing width (σ) in seconds.
    pub smooth_width_s: f64,
    /// Zero-padding factor for the window FFT.
    pub pad_factor: usize,
    pub hampel_half_window: usize,
    pub hampel_nsigma: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            window_s: 15.0,
            hop_s: 1.0,
            n_min: 6,
            n_max: 15,
            t_theta: 0.010,
            // 0.1 s of total kernel support (±3σ); a full σ of 0.1 s
            // would wipe out the harmonics above ~5 Hz that the NLHS
            // feeds on
            smooth_width_s: 0.1 / 6.0,
            pad_factor: 64,
            hampel_half_window: 5,
            hampel_nsigma: 3.0,
        }
    }
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_s > self.hop_s && self.hop_s > 0.0) {
            return Err(Error::InvalidParameter("need window_s > hop_s > 0".into()));
        }
        if self.n_min > self.n_max || self.n_min < 1 {
            return Err(Error::InvalidParameter("need 1 <= n_min <= n_max".into()));
        }
        if self.t_theta <= 0.0 {
            return Err(Error::InvalidParameter("t_theta must be > 0".into()));
        }
        Ok(())
    }
}

/// (start sample, window length, center time) for each analysis window.
fn windows(x: &RealSeries, p: &EstimatorParams) -> Result<Vec<(usize, usize, f64)>> {
    let n_win = (p.window_s * x.fs()).round() as usize;
    let hop = (p.hop_s * x.fs()).round() as usize;
    if n_win > x.len() || n_win < 2 || hop == 0 {
        return Err(Error::RecordTooShort);
    }
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + n_win <= x.len() {
        let center = x.start_time + (start as f64 + n_win as f64 / 2.0) * x.t0;
        out.push((start, n_win, center));
        start += hop;
    }
    Ok(out)
}

/// Sliding-window NLHS tracks for every order n_min..=n_max at once.
///
/// The NLHS is cumulative in harmonic order, so all tracks cost one
/// full-order pass per window.
pub fn tracks_for_orders(
    x: &RealSeries,
    p: &EstimatorParams,
    q: &NlhsParams,
) -> Result<Vec<IntervalTrack>> {
    p.validate()?;
    let wins = windows(x, p)?;
    let per_window: Vec<Vec<f64>> = wins
        .par_iter()
        .map(|&(start, len, _)| {
            let spec = spectral::windowed_spectrum(&x.slice(start, len), p.pad_factor)?;
            let all = spectral::nlhs_cumulative(&spec, q, p.n_max)?;
            // interval per order n_min..=n_max
            all[p.n_min - 1..]
                .iter()
                .map(|ps| spectral::peak_frequency(ps).map(|f| 1.0 / f))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n_orders = p.n_max - p.n_min + 1;
    Ok((0..n_orders)
        .map(|oi| IntervalTrack {
            entries: wins
                .iter()
                .zip(&per_window)
                .map(|(&(_, _, center), ivals)| TrackEntry {
                    time: center,
                    interval: Some(ivals[oi]),
                })
                .collect(),
        })
        .collect())
}

/// Sliding-window NLHS track at one harmonic order. Every entry is
/// present; gating happens later.
pub fn track_for_order(
    x: &RealSeries,
    n: usize,
    p: &EstimatorParams,
    q: &NlhsParams,
) -> Result<IntervalTrack> {
    p.validate()?;
    let wins = windows(x, p)?;
    let entries = wins
        .par_iter()
        .map(|&(start, len, center)| {
            let spec = spectral::windowed_spectrum(&x.slice(start, len), p.pad_factor)?;
            let mut q_n = *q;
            q_n.n = n;
            let ps = spectral::nlhs(&spec, &q_n)?;
            let f = spectral::peak_frequency(&ps)?;
            Ok(TrackEntry { time: center, interval: Some(1.0 / f) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalTrack { entries })
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Picks the two orders with the lowest interval variance from injected
/// per-order variances; ties break toward smaller order.
pub fn select_orders_from_variances(variances: &[f64], n_min: usize) -> Result<(usize, usize)> {
    if variances.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 candidate orders".into()));
    }
    let argmin = |skip: Option<usize>| {
        let mut best = None;
        for (i, &v) in variances.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            match best {
                None => best = Some((i, v)),
                Some((_, bv)) if v < bv => best = Some((i, v)),
                _ => {}
            }
        }
        best.unwrap().0
    };
    let i1 = argmin(None);
    let i2 = argmin(Some(i1));
    Ok((n_min + i1, n_min + i2))
}

/// Variance-minimizing harmonic orders (N1, N2) for a record.
pub fn select_orders(
    x: &RealSeries,
    p: &EstimatorParams,
    q: &NlhsParams,
) -> Result<(usize, usize)> {
    let tracks = tracks_for_orders(x, p, q)?;
    if tracks[0].len() < 2 {
        return Err(Error::VarianceUndefined);
    }
    let variances: Vec<f64> = tracks
        .iter()
        .map(|t| {
            let vals: Vec<f64> = t.entries.iter().filter_map(|e| e.interval).collect();
            population_variance(&vals)
        })
        .collect();
    select_orders_from_variances(&variances, p.n_min)
}

/// Keeps track1's interval where the two orders agree within `t_theta`
/// (inclusive), drops it to MISSING otherwise.
pub fn gate(track1: &IntervalTrack, track2: &IntervalTrack, t_theta: f64) -> Result<IntervalTrack> {
    if track1.len() != track2.len()
        || track1
            .entries
            .iter()
            .zip(&track2.entries)
            .any(|(a, b)| a.time != b.time)
    {
        return Err(Error::TimestampMismatch);
    }
    let entries = track1
        .entries
        .iter()
        .zip(&track2.entries)
        .map(|(a, b)| {
            let interval = match (a.interval, b.interval) {
                (Some(t1), Some(t2)) if (t1 - t2).abs() <= t_theta => Some(t1),
                _ => None,
            };
            TrackEntry { time: a.time, interval }
        })
        .collect();
    Ok(IntervalTrack { entries })
}

fn median(sorted: &mut Vec<f64>) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// MAD-to-σ scale for Gaussian data.
const MAD_SCALE: f64 = 1.4826;

/// Deletes entries deviating more than `nsigma`·1.4826·MAD from the
/// local median of present entries. MISSING entries stay MISSING; when
/// the local MAD is zero only exact-median entries survive.
pub fn hampel_filter(track: &IntervalTrack, half_window: usize, nsigma: f64) -> IntervalTrack {
    let n = track.len();
    let entries = (0..n)
        .map(|i| {
            let e = track.entries[i];
            let Some(v) = e.interval else {
                return e;
            };
            let lo = i.saturating_sub(half_window);
            let hi = (i + half_window + 1).min(n);
            let mut window: Vec<f64> = track.entries[lo..hi]
                .iter()
                .filter_map(|e| e.interval)
                .collect();
            let med = median(&mut window);
            let mut devs: Vec<f64> = window.iter().map(|w| (w - med).abs()).collect();
            let mad = median(&mut devs);
            let keep = (v - med).abs() <= nsigma * MAD_SCALE * mad;
            TrackEntry { time: e.time, interval: keep.then_some(v) }
        })
        .collect();
    IntervalTrack { entries }
}

/// Pipeline tail shared by both input variants: order selection,
/// gating, Hampel.
fn estimate_tail(pre: &RealSeries, p: &EstimatorParams, q: &NlhsParams) -> Result<IntervalTrack> {
    let tracks = tracks_for_orders(pre, p, q)?;
    if tracks[0].len() < 2 {
        return Err(Error::VarianceUndefined);
    }
    let variances: Vec<f64> = tracks
        .iter()
        .map(|t| {
            let vals: Vec<f64> = t.entries.iter().filter_map(|e| e.interval).collect();
            population_variance(&vals)
        })
        .collect();
    let (n1, n2) = select_orders_from_variances(&variances, p.n_min)?;
    let gated = gate(&tracks[n1 - p.n_min], &tracks[n2 - p.n_min], p.t_theta)?;
    Ok(hampel_filter(&gated, p.hampel_half_window, p.hampel_nsigma))
}

/// Full pipeline on a displacement record: Gaussian smoothing, 7-tap
/// second derivative, NLHS order selection, gating, Hampel.
pub fn estimate(x: &RealSeries, p: &EstimatorParams, q: &NlhsParams) -> Result<IntervalTrack> {
    let smoothed = preprocess::gaussian_smooth(x, p.smooth_width_s)?;
    let dd = preprocess::second_derivative(&smoothed)?;
    estimate_tail(&dd, p, q)
}

/// Pipeline variant driven by |d²/dt² s(t)| of the complex radar
/// signal; smoothing is applied to the magnitude series.
pub fn estimate_complex(
    s: &ComplexSeries,
    p: &EstimatorParams,
    q: &NlhsParams,
) -> Result<IntervalTrack> {
    let mag = preprocess::complex_deriv_magnitude(s)?;
    let smoothed = preprocess::gaussian_smooth(&mag, p.smooth_width_s)?;
    estimate_tail(&smoothed, p, q)
}
