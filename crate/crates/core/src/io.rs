//! CSV file formats for range-bin matrices, real series, interval
//! tracks, and ground truth.
//!
//! Sampling intervals are inferred from the `t` column and validated
//! uniform to 1e-9 s. Floats are written with Rust's shortest
//! round-trip formatting, so write → read is lossless and re-writing
//! identical data is byte-identical.

use num_complex::Complex64;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::{IntervalTrack, TrackEntry};
use crate::metrics::GroundTruth;
use crate::series::{RangeBinMatrix, RealSeries};

const T_UNIFORM_TOL: f64 = 1e-9;

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("bad number {s:?} on line {line}")))
}

fn infer_t0(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Malformed("need at least 2 rows to infer sampling interval".into()));
    }
    let t0 = times[1] - times[0];
    if t0 <= 0.0 {
        return Err(Error::Malformed("time column must be increasing".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - t0).abs() > T_UNIFORM_TOL {
            return Err(Error::Malformed(format!(
                "non-uniform sampling at row {}: step {} vs {}",
                i + 1,
                w[1] - w[0],
                t0
            )));
        }
    }
    Ok(t0)
}

/// Header `t,bin0_re,bin0_im,bin1_re,...`, one slow-time sample per row.
pub fn write_matrix_csv(path: &Path, m: &RangeBinMatrix) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write!(w, "t")?;
    for b in 0..m.n_bins {
        write!(w, ",bin{b}_re,bin{b}_im")?;
    }
    writeln!(w)?;
    for t in 0..m.n_samples() {
        write!(w, "{}", t as f64 * m.t0)?;
        for b in 0..m.n_bins {
            let z = m.at(t, b);
            write!(w, ",{},{}", z.re, z.im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<RangeBinMatrix> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 3 || (cols.len() - 1) % 2 != 0 {
        return Err(Error::Malformed(format!("unexpected matrix header {header:?}")));
    }
    let n_bins = (cols.len() - 1) / 2;
    let mut times = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Malformed(format!("row {} has {} fields", i + 2, fields.len())));
        }
        times.push(parse_f64(fields[0], i + 2)?);
        for b in 0..n_bins {
            data.push(Complex64::new(
                parse_f64(fields[1 + 2 * b], i + 2)?,
                parse_f64(fields[2 + 2 * b], i + 2)?,
            ));
        }
    }
    let t0 = infer_t0(&times)?;
    RangeBinMatrix::new(data, n_bins, t0, 0.0)
}

/// Header `t,value`.
pub fn write_real_csv(path: &Path, x: &RealSeries) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,value")?;
    for (i, v) in x.samples.iter().enumerate() {
        writeln!(w, "{},{}", x.start_time + i as f64 * x.t0, v)?;
    }
    Ok(())
}

pub fn read_real_csv(path: &Path) -> Result<RealSeries> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty file".into()))??;
    if header.trim() != "t,value" {
        return Err(Error::Malformed(format!("unexpected header {header:?}")));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (t, v) = line
            .trim()
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("row {} lacks a comma", i + 2)))?;
        times.push(parse_f64(t, i + 2)?);
        values.push(parse_f64(v, i + 2)?);
    }
    let t0 = infer_t0(&times)?;
    RealSeries::new(values, t0, times[0])
}

/// Header `t_sec,interval_sec`; an empty interval field marks MISSING.
pub fn write_track_csv(path: &Path, track: &IntervalTrack) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t_sec,interval_sec")?;
    for e in &track.entries {
        match e.interval {
            Some(v) => writeln!(w, "{},{}", e.time, v)?,
            None => writeln!(w, "{},", e.time)?,
        }
    }
    Ok(())
}

pub fn read_track_csv(path: &Path) -> Result<IntervalTrack> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty file".into()))??;
    if header.trim() != "t_sec,interval_sec" {
        return Err(Error::Malformed(format!("unexpected header {header:?}")));
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (t, v) = line
            .trim()
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("row {} lacks a comma", i + 2)))?;
        let interval = if v.trim().is_empty() {
            None
        } else {
            Some(parse_f64(v, i + 2)?)
        };
        entries.push(TrackEntry { time: parse_f64(t, i + 2)?, interval });
    }
    Ok(IntervalTrack { entries })
}

/// Beat times (`beat_time_sec`, one per line) or sampled intervals
/// (`t_sec,interval_sec`), distinguished by header.
pub fn write_truth_csv(path: &Path, gt: &GroundTruth) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    match gt {
        GroundTruth::BeatTimes(beats) => {
            writeln!(w, "beat_time_sec")?;
            for b in beats {
                writeln!(w, "{b}")?;
            }
        }
        GroundTruth::Intervals(samples) => {
            writeln!(w, "t_sec,interval_sec")?;
            for (t, v) in samples {
                writeln!(w, "{t},{v}")?;
            }
        }
    }
    Ok(())
}

pub fn read_truth_csv(path: &Path) -> Result<GroundTruth> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty file".into()))??;
    match header.trim() {
        "beat_time_sec" => {
            let mut beats = Vec::new();
            for (i, line) in lines.enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                beats.push(parse_f64(&line, i + 2)?);
            }
            let gt = GroundTruth::BeatTimes(beats);
            gt.validate()?;
            Ok(gt)
        }
        "t_sec,interval_sec" => {
            let mut samples = Vec::new();
            for (i, line) in lines.enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let (t, v) = line
                    .trim()
                    .split_once(',')
                    .ok_or_else(|| Error::Malformed(format!("row {} lacks a comma", i + 2)))?;
                samples.push((parse_f64(t, i + 2)?, parse_f64(v, i + 2)?));
            }
            let gt = GroundTruth::Intervals(samples);
            gt.validate()?;
            Ok(gt)
        }
        other => Err(Error::Malformed(format!("unexpected truth header {other:?}"))),
    }
}

/// Pseudo-spectrum dump, header `f_hz,value`.
pub fn write_pseudo_spectrum_csv(path: &Path, ps: &crate::spectral::PseudoSpectrum) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "f_hz,value")?;
    for (f, v) in ps.freqs.iter().zip(&ps.values) {
        writeln!(w, "{f},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn matrix_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let data: Vec<Complex64> = (0..12)
            .map(|i| Complex64::new(i as f64 * 0.3, -(i as f64)))
            .collect();
        let m = RangeBinMatrix::new(data, 3, 0.01, 0.0).unwrap();
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back.n_bins, 3);
        assert_eq!(back.data, m.data);
        assert!((back.t0 - 0.01).abs() < 1e-12);
    }

    #[test]
    fn real_series_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let x = RealSeries::new(vec![0.1, -0.2, 0.35], 0.01, 0.0).unwrap();
        write_real_csv(&path, &x).unwrap();
        let back = read_real_csv(&path).unwrap();
        assert_eq!(back.samples, x.samples);
    }

    #[test]
    fn nonuniform_time_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t,value\n0.0,1.0\n0.01,2.0\n0.03,3.0\n").unwrap();
        assert!(matches!(read_real_csv(&path), Err(Error::Malformed(_))));
    }

    #[test]
    fn track_roundtrip_with_missing() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let track = IntervalTrack {
            entries: vec![
                TrackEntry { time: 7.5, interval: Some(1.01) },
                TrackEntry { time: 8.5, interval: None },
                TrackEntry { time: 9.5, interval: Some(0.99) },
            ],
        };
        write_track_csv(&path, &track).unwrap();
        assert_eq!(read_track_csv(&path).unwrap(), track);
    }

    #[test]
    fn truth_both_formats() {
        let dir = tempdir().unwrap();
        let beats = GroundTruth::BeatTimes(vec![0.0, 1.0, 2.1]);
        let p1 = dir.path().join("b.csv");
        write_truth_csv(&p1, &beats).unwrap();
        assert_eq!(read_truth_csv(&p1).unwrap(), beats);

        let ivals = GroundTruth::Intervals(vec![(0.5, 1.0), (1.5, 1.05)]);
        let p2 = dir.path().join("i.csv");
        write_truth_csv(&p2, &ivals).unwrap();
        assert_eq!(read_truth_csv(&p2).unwrap(), ivals);
    }
}
