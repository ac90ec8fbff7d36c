//! Core time-series containers shared by every processing stage.
//!
//! All series are uniformly sampled; `t0` is the sampling interval in
//! seconds and `start_time` the absolute time of the first sample.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniformly sampled complex slow-time signal (dimensionless I/Q).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub samples: Vec<Complex64>,
    /// Sampling interval in seconds, > 0.
    pub t0: f64,
    pub start_time: f64,
}

impl ComplexSeries {
    pub fn new(samples: Vec<Complex64>, t0: f64, start_time: f64) -> Result<Self> {
        if t0 <= 0.0 {
            return Err(Error::InvalidParameter("t0 must be > 0".into()));
        }
        Ok(Self { samples, t0, start_time })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn fs(&self) -> f64 {
        1.0 / self.t0
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.t0
    }
}

/// Uniformly sampled real signal: displacement in meters, derivatives in m/s².
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    pub samples: Vec<f64>,
    /// Sampling interval in seconds, > 0.
    pub t0: f64,
    pub start_time: f64,
}

impl RealSeries {
    pub fn new(samples: Vec<f64>, t0: f64, start_time: f64) -> Result<Self> {
        if t0 <= 0.0 {
            return Err(Error::InvalidParameter("t0 must be > 0".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(Self { samples, t0, start_time })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn fs(&self) -> f64 {
        1.0 / self.t0
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.t0
    }

    /// Sub-series covering samples `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> RealSeries {
        RealSeries {
            samples: self.samples[start..start + len].to_vec(),
            t0: self.t0,
            start_time: self.start_time + start as f64 * self.t0,
        }
    }
}

/// Complex slow-time data per range bin, shape [slow-time × bin].
#[derive(Debug, Clone, PartialEq)]
pub struct RangeBinMatrix {
    /// Row-major: `data[t * n_bins + b]`.
    pub data: Vec<Complex64>,
    pub n_bins: usize,
    /// Sampling interval in seconds.
    pub t0: f64,
    /// Range spacing between adjacent bins in meters.
    pub bin_spacing: f64,
}

impl RangeBinMatrix {
    pub fn new(data: Vec<Complex64>, n_bins: usize, t0: f64, bin_spacing: f64) -> Result<Self> {
        if n_bins == 0 || data.is_empty() {
            return Err(Error::EmptyInput);
        }
        if data.len() % n_bins != 0 {
            return Err(Error::Malformed("matrix is not rectangular".into()));
        }
        if t0 <= 0.0 {
            return Err(Error::InvalidParameter("t0 must be > 0".into()));
        }
        Ok(Self { data, n_bins, t0, bin_spacing })
    }

    pub fn n_samples(&self) -> usize {
        self.data.len() / self.n_bins
    }

    pub fn at(&self, t: usize, bin: usize) -> Complex64 {
        self.data[t * self.n_bins + bin]
    }

    /// Extracts one bin column as a complex slow-time series.
    pub fn bin_series(&self, bin: usize) -> ComplexSeries {
        let samples = (0..self.n_samples()).map(|t| self.at(t, bin)).collect();
        ComplexSeries { samples, t0: self.t0, start_time: 0.0 }
    }
}

/// Radar front-end parameters needed for phase-to-displacement scaling.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadarConfig {
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Slow-time sampling rate in Hz.
    pub fs: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        // 60-64 GHz band center, 10 ms slow-time sampling.
        Self { wavelength: 299_792_458.0 / 62.0e9, fs: 100.0 }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.wavelength <= 0.0 {
            return Err(Error::InvalidConfig("wavelength must be > 0".into()));
        }
        if self.fs <= 0.0 {
            return Err(Error::InvalidConfig("fs must be > 0".into()));
        }
        Ok(())
    }
}
