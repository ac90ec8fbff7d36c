//! Heartbeat interval estimation from radar slow-time signals.
//!
//! The pipeline recovers chest displacement from the unwrapped echo
//! phase, sharpens heartbeat harmonics with smoothing and a 7-tap
//! second-derivative stencil, and builds a nonlinear harmonic spectrum
//! (NLHS) by incoherently summing localized spectral autocorrelations
//! around every harmonic of each candidate heart rate. Harmonic-order
//! selection, a two-order consistency gate, and a Hampel filter turn
//! per-window peaks into a cleaned interval track. STFT baselines,
//! RMSE/CC/TCR scoring, and a synthetic vital-sign generator round out
//! the toolkit.

pub mod baselines;
pub mod error;
pub mod estimator;
pub mod io;
pub mod metrics;
pub mod preprocess;
pub mod signal_model;
pub mod spectral;
pub mod synth;

mod series;

pub use error::{Error, Result};
pub use series::{ComplexSeries, RadarConfig, RangeBinMatrix, RealSeries};
