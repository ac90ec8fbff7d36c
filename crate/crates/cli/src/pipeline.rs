//! Mode dispatch: turns a record (range-bin matrix or displacement
//! series) into an interval track for each estimation method.

use anyhow::{anyhow, bail, Context};
use std::path::Path;

use nlhs_core::estimator::{estimate, estimate_complex, IntervalTrack};
use nlhs_core::{baselines, io, preprocess, signal_model};
use nlhs_core::{ComplexSeries, RangeBinMatrix, RealSeries};

use crate::params::ParamsFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// NLHS on d''(t)
    Prop1,
    /// NLHS on |d²/dt² s(t)|
    Prop2,
    /// STFT peak on d''(t)
    Conv1a,
    /// STFT peak on |d²/dt² s(t)|
    Conv2a,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Prop1 => "prop1",
            Mode::Prop2 => "prop2",
            Mode::Conv1a => "conv1a",
            Mode::Conv2a => "conv2a",
        }
    }

    pub fn parse_list(s: &str) -> anyhow::Result<Vec<Mode>> {
        s.split(',')
            .map(|m| match m.trim() {
                "prop1" => Ok(Mode::Prop1),
                "prop2" => Ok(Mode::Prop2),
                "conv1a" => Ok(Mode::Conv1a),
                "conv2a" => Ok(Mode::Conv2a),
                other => Err(anyhow!("unknown mode {other:?}")),
            })
            .collect()
    }
}

pub enum RecordInput {
    Matrix(RangeBinMatrix),
    Displacement(RealSeries),
}

/// Sniffs the CSV header: `t,bin0_re,...` is a range-bin matrix,
/// `t,value` a displacement series.
pub fn load_input(path: &Path) -> anyhow::Result<RecordInput> {
    let mut header = String::new();
    {
        use std::io::BufRead;
        let f = std::fs::File::open(path)
            .with_context(|| format!("opening input {}", path.display()))?;
        std::io::BufReader::new(f).read_line(&mut header)?;
    }
    if header.trim_end().starts_with("t,bin0_re") {
        Ok(RecordInput::Matrix(io::read_matrix_csv(path)?))
    } else if header.trim_end() == "t,value" {
        Ok(RecordInput::Displacement(io::read_real_csv(path)?))
    } else {
        bail!("unrecognized input header {:?} in {}", header.trim_end(), path.display());
    }
}

/// Target-bin complex signal: clutter-suppressed power picks the bin,
/// the raw column supplies the phase.
pub fn target_signal(m: &RangeBinMatrix) -> anyhow::Result<ComplexSeries> {
    let suppressed = signal_model::clutter_suppress(m)?;
    let bin = signal_model::locate_target(&suppressed)?;
    Ok(m.bin_series(bin))
}

fn displacement_of(input: &RecordInput, p: &ParamsFile) -> anyhow::Result<RealSeries> {
    match input {
        RecordInput::Displacement(d) => Ok(d.clone()),
        RecordInput::Matrix(m) => {
            let s = target_signal(m)?;
            Ok(signal_model::phase_displacement(&s, &p.radar)?)
        }
    }
}

fn complex_of(input: &RecordInput, _p: &ParamsFile) -> anyhow::Result<ComplexSeries> {
    match input {
        RecordInput::Matrix(m) => target_signal(m),
        RecordInput::Displacement(_) => {
            bail!("this mode needs complex radar data (matrix CSV), got a displacement series")
        }
    }
}

pub fn run_mode(mode: Mode, input: &RecordInput, p: &ParamsFile) -> anyhow::Result<IntervalTrack> {
    let band = (p.nlhs.f_min, p.nlhs.f_max_search);
    let track = match mode {
        Mode::Prop1 => estimate(&displacement_of(input, p)?, &p.estimator, &p.nlhs)?,
        Mode::Prop2 => estimate_complex(&complex_of(input, p)?, &p.estimator, &p.nlhs)?,
        Mode::Conv1a => {
            let d = displacement_of(input, p)?;
            let sm = preprocess::gaussian_smooth(&d, p.estimator.smooth_width_s)?;
            let dd = preprocess::second_derivative(&sm)?;
            baselines::stft_estimate(&dd, &p.estimator, band)?
        }
        Mode::Conv2a => {
            let s = complex_of(input, p)?;
            let mag = preprocess::complex_deriv_magnitude(&s)?;
            let sm = preprocess::gaussian_smooth(&mag, p.estimator.smooth_width_s)?;
            baselines::stft_estimate(&sm, &p.estimator, band)?
        }
    };
    Ok(track)
}

/// Preprocessed series feeding the spectrum for `mode`, for dump/debug.
pub fn preprocessed_of(
    mode: Mode,
    input: &RecordInput,
    p: &ParamsFile,
) -> anyhow::Result<RealSeries> {
    match mode {
        Mode::Prop1 | Mode::Conv1a => {
            let d = displacement_of(input, p)?;
            let sm = preprocess::gaussian_smooth(&d, p.estimator.smooth_width_s)?;
            Ok(preprocess::second_derivative(&sm)?)
        }
        Mode::Prop2 | Mode::Conv2a => {
            let s = complex_of(input, p)?;
            let mag = preprocess::complex_deriv_magnitude(&s)?;
            Ok(preprocess::gaussian_smooth(&mag, p.estimator.smooth_width_s)?)
        }
    }
}
