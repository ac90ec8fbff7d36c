//! Batch CLI for radar heartbeat interval estimation.
//!
//! Exit codes: 0 success, 1 bad input, 2 estimation failed on all
//! records.

mod corpus;
mod params;
mod pipeline;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use nlhs_core::io;
use nlhs_core::spectral::{self, PseudoSpectrum};
use nlhs_core::synth;

use corpus::AllRecordsFailed;
use params::ParamsFile;
use pipeline::Mode;

#[derive(Parser)]
#[command(name = "nlhs", about = "Heartbeat interval estimation from radar slow-time signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic radar vital-sign record (or corpus)
    Simulate {
        /// JSON params file; its `synth` section drives the generator
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (matrix.csv, displacement.csv, truth.csv)
        #[arg(long)]
        out: PathBuf,
        /// Override the generator seed
        #[arg(long)]
        seed: Option<u64>,
        /// Generate the default 20-record corpus into out/record_NN/
        #[arg(long)]
        default_corpus: bool,
    },
    /// Estimate an interval track from a record
    Estimate {
        /// Input CSV: range-bin matrix or displacement series
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output track CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score an interval track against ground truth
    Evaluate {
        /// Track CSV (t_sec,interval_sec)
        #[arg(long)]
        input: PathBuf,
        /// Ground-truth CSV (beat times or interval samples)
        #[arg(long)]
        truth: PathBuf,
        /// Total number of 1 s segments (inferred from truth if omitted)
        #[arg(long)]
        segments: Option<usize>,
        /// Write the JSON report here as well as printing it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the pseudo-spectrum of a record for plotting
    SpectrumDump {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "prop1")]
        mode: Mode,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output CSV (f_hz,value)
        #[arg(long)]
        out: PathBuf,
        /// Analyze the window starting here instead of the full record
        #[arg(long)]
        window_start: Option<f64>,
    },
    /// Run every requested mode over a corpus and tabulate the metrics
    Corpus {
        /// Directory of record subdirectories
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated modes
        #[arg(long, default_value = "prop1,prop2,conv1a,conv2a")]
        modes: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output directory for report.json and table.txt
        #[arg(long)]
        out: PathBuf,
    },
}

fn simulate_record(cfg: &synth::SynthConfig, dir: &PathBuf) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let rec = synth::generate(cfg)?;
    io::write_matrix_csv(&dir.join("matrix.csv"), &rec.matrix)?;
    io::write_real_csv(&dir.join("displacement.csv"), &rec.displacement)?;
    io::write_truth_csv(&dir.join("truth.csv"), &rec.truth)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out, seed, default_corpus } => {
            if default_corpus {
                for (i, cfg) in synth::default_corpus_configs().iter().enumerate() {
                    simulate_record(cfg, &out.join(format!("record_{i:02}")))?;
                }
                eprintln!("wrote 20 records to {}", out.display());
            } else {
                let mut cfg = ParamsFile::load(config.as_deref())?.synth;
                if let Some(seed) = seed {
                    cfg.seed = seed;
                }
                simulate_record(&cfg, &out)?;
                eprintln!("wrote record to {}", out.display());
            }
        }
        Command::Estimate { input, mode, params, out } => {
            let p = ParamsFile::load(params.as_deref())?;
            let record = pipeline::load_input(&input)?;
            let track = pipeline::run_mode(mode, &record, &p)?;
            match out {
                Some(path) => io::write_track_csv(&path, &track)?,
                None => {
                    println!("t_sec,interval_sec");
                    for e in &track.entries {
                        match e.interval {
                            Some(v) => println!("{},{}", e.time, v),
                            None => println!("{},", e.time),
                        }
                    }
                }
            }
        }
        Command::Evaluate { input, truth, segments, out } => {
            let track = io::read_track_csv(&input)?;
            let gt = io::read_truth_csv(&truth)?;
            let report = corpus::score_track(&track, &gt, segments)?;
            let json = serde_json::to_string_pretty(&report)?;
            println!("{json}");
            if let Some(path) = out {
                corpus::write_atomic(&path, &json)?;
            }
        }
        Command::SpectrumDump { input, mode, params, out, window_start } => {
            let p = ParamsFile::load(params.as_deref())?;
            let record = pipeline::load_input(&input)?;
            let pre = pipeline::preprocessed_of(mode, &record, &p)?;
            let pre = match window_start {
                None => pre,
                Some(t) => {
                    let start = ((t - pre.start_time) / pre.t0).round();
                    let len = (p.estimator.window_s / pre.t0).round() as usize;
                    if start < 0.0 || start as usize + len > pre.len() {
                        bail!("window at {t} s is outside the record");
                    }
                    pre.slice(start as usize, len)
                }
            };
            let spec = spectral::windowed_spectrum(&pre, p.estimator.pad_factor)?;
            let ps: PseudoSpectrum = match mode {
                Mode::Prop1 | Mode::Prop2 => spectral::nlhs(&spec, &p.nlhs)?,
                Mode::Conv1a | Mode::Conv2a => {
                    // band-limited power spectrum on the candidate grid
                    let freqs = p.nlhs.grid();
                    let values = freqs
                        .iter()
                        .map(|&f| spec.coeffs[(f / spec.df).round() as usize].norm_sqr())
                        .collect();
                    PseudoSpectrum { values, freqs }
                }
            };
            io::write_pseudo_spectrum_csv(&out, &ps)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Corpus { input, modes, params, out } => {
            let modes = Mode::parse_list(&modes)?;
            let p = ParamsFile::load(params.as_deref())?;
            let report = corpus::run_corpus(&input, &modes, &p)?;
            std::fs::create_dir_all(&out).context("creating output dir")?;
            let json = serde_json::to_string_pretty(&report)?;
            corpus::write_atomic(&out.join("report.json"), &json)?;
            let table = corpus::format_table(&report);
            corpus::write_atomic(&out.join("table.txt"), &table)?;
            print!("{table}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<AllRecordsFailed>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
