//! Corpus runner: every requested mode on every record, scored and
//! aggregated into one comparison table.

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nlhs_core::estimator::IntervalTrack;
use nlhs_core::metrics::{self, GroundTruth, MetricsReport};
use nlhs_core::io;

use crate::params::ParamsFile;
use crate::pipeline::{self, Mode};

/// TCR success threshold in seconds.
pub const TCR_THRESHOLD_S: f64 = 0.030;
/// Scoring segment length in seconds.
pub const SEGMENT_LEN_S: f64 = 1.0;

/// Marker for "estimation failed on every record" (exit code 2).
#[derive(Debug)]
pub struct AllRecordsFailed;

impl std::fmt::Display for AllRecordsFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "estimation failed on all records")
    }
}

impl std::error::Error for AllRecordsFailed {}

/// Segments covered by the ground truth: one per second of its span.
pub fn truth_segments(gt: &GroundTruth) -> usize {
    let end = match gt {
        GroundTruth::BeatTimes(b) => *b.last().unwrap_or(&0.0),
        GroundTruth::Intervals(s) => s.last().map(|x| x.0).unwrap_or(0.0),
    };
    (end / SEGMENT_LEN_S).ceil() as usize
}

/// Aligns a track to 1 s segments and scores it against ground truth.
pub fn score_track(
    track: &IntervalTrack,
    gt: &GroundTruth,
    n_segments: Option<usize>,
) -> anyhow::Result<MetricsReport> {
    let m = n_segments.unwrap_or_else(|| truth_segments(gt));
    if m == 0 {
        bail!("ground truth spans zero segments");
    }
    let est = metrics::align_to_segments(track, m, SEGMENT_LEN_S);
    let truth = metrics::resample_truth(gt, &metrics::segment_centers(m, SEGMENT_LEN_S))?;
    Ok(metrics::score(&est, &truth, TCR_THRESHOLD_S)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordResult {
    pub record: String,
    pub mode: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: String,
    pub n_records: usize,
    pub mean_rmse_ms: Option<f64>,
    pub mean_cc: Option<f64>,
    pub mean_tcr_pct: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusReport {
    pub modes: Vec<ModeSummary>,
    pub records: Vec<RecordResult>,
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

struct CorpusRecord {
    name: String,
    input: PathBuf,
    truth: PathBuf,
}

fn discover_records(dir: &Path) -> anyhow::Result<Vec<CorpusRecord>> {
    let mut records = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus dir {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();
    for sub in entries {
        let name = sub.file_name().unwrap().to_string_lossy().into_owned();
        let input = ["matrix.csv", "displacement.csv"]
            .iter()
            .map(|f| sub.join(f))
            .find(|p| p.exists());
        let truth = sub.join("truth.csv");
        match input {
            Some(input) if truth.exists() => records.push(CorpusRecord { name, input, truth }),
            Some(_) => eprintln!("warning: {name}: no truth.csv, record skipped"),
            None => {}
        }
    }
    if records.is_empty() {
        bail!("corpus {} contains no records with ground truth", dir.display());
    }
    Ok(records)
}

pub fn run_corpus(
    corpus_dir: &Path,
    modes: &[Mode],
    params: &ParamsFile,
) -> anyhow::Result<CorpusReport> {
    let records = discover_records(corpus_dir)?;
    let results: Vec<Vec<Option<RecordResult>>> = records
        .par_iter()
        .map(|rec| {
            let run = || -> anyhow::Result<Vec<Option<RecordResult>>> {
                let input = pipeline::load_input(&rec.input)?;
                let gt = io::read_truth_csv(&rec.truth)?;
                Ok(modes
                    .iter()
                    .map(|&mode| {
                        match pipeline::run_mode(mode, &input, params)
                            .and_then(|t| score_track(&t, &gt, None))
                        {
                            Ok(metrics) => Some(RecordResult {
                                record: rec.name.clone(),
                                mode: mode.name().into(),
                                metrics,
                            }),
                            Err(e) => {
                                eprintln!(
                                    "warning: {} / {}: estimation failed: {e}",
                                    rec.name,
                                    mode.name()
                                );
                                None
                            }
                        }
                    })
                    .collect())
            };
            run().unwrap_or_else(|e| {
                eprintln!("warning: {}: record failed: {e}", rec.name);
                vec![None; modes.len()]
            })
        })
        .collect();

    let flat: Vec<RecordResult> = results.into_iter().flatten().flatten().collect();
    if flat.is_empty() {
        return Err(AllRecordsFailed.into());
    }

    let modes_summary = modes
        .iter()
        .map(|&mode| {
            let per_mode: Vec<&RecordResult> =
                flat.iter().filter(|r| r.mode == mode.name()).collect();
            ModeSummary {
                mode: mode.name().into(),
                n_records: per_mode.len(),
                mean_rmse_ms: mean_opt(per_mode.iter().map(|r| r.metrics.rmse_ms)),
                mean_cc: mean_opt(per_mode.iter().map(|r| r.metrics.cc)),
                mean_tcr_pct: if per_mode.is_empty() {
                    0.0
                } else {
                    per_mode.iter().map(|r| r.metrics.tcr_pct).sum::<f64>()
                        / per_mode.len() as f64
                },
            }
        })
        .collect();

    Ok(CorpusReport { modes: modes_summary, records: flat })
}

pub fn format_table(report: &CorpusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>10} {:>7} {:>8}", "Method", "RMSE (ms)", "CC", "TCR (%)");
    for m in &report.modes {
        let rmse = m
            .mean_rmse_ms
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "n/a".into());
        let cc = m
            .mean_cc
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "n/a".into());
        let _ = writeln!(out, "{:<8} {:>10} {:>7} {:>8.2}", m.mode, rmse, cc, m.mean_tcr_pct);
    }
    out
}

/// Write-then-rename so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
