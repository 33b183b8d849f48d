//! `fra` — synthetic FRA dataset generation, model training, and two-stage
//! winding fault diagnosis from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure (single-line `error: ...` on
//! stderr), 2 usage error.

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "fra", version, about = "FRA winding fault diagnosis workbench")]
pub struct Cli {
    /// Worker threads for parallel generation and fold training
    /// (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// `key = value` file supplying defaults for omitted flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the synthetic dataset of one measurement group.
    Gen {
        /// Group index: 1 (EE disc10), 2 (CIW disc10), or 3 (EE disc12).
        #[arg(long)]
        group: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Output dataset path (.frds).
        #[arg(long)]
        out: PathBuf,
        /// Relative manufacturing jitter (default 0.005).
        #[arg(long)]
        jitter_sigma: Option<f64>,
        /// Measurement noise in dB (default 0.1).
        #[arg(long)]
        noise_db: Option<f64>,
        /// Also export the dataset as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Dump the nominal network as a plain-text netlist.
        #[arg(long)]
        netlist: Option<PathBuf>,
    },
    /// Train one model on a dataset and save it.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Architecture name (case-insensitive), e.g. fra-diagnoser.
        #[arg(long)]
        arch: String,
        /// Label task: `type`, `joint`, or `degree:<TYPE>` (e.g. degree:FB).
        #[arg(long)]
        task: String,
        #[arg(long)]
        out: PathBuf,
        /// Hidden-width scale in (0, 1].
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        patience: Option<usize>,
    },
    /// Stratified k-fold cross-validation of one architecture on a dataset.
    Cv {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        arch: String,
        #[arg(long)]
        task: String,
        /// Report directory (report.txt plus per-fold confusion CSVs).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        patience: Option<usize>,
    },
    /// Evaluate a saved model on a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output directory (metrics.txt, confusion.csv); prints to stdout
        /// when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tune the fusion weight of two same-scheme models on a dataset.
    Fuse {
        #[arg(long)]
        model_a: PathBuf,
        #[arg(long)]
        model_b: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output report path.
        #[arg(long)]
        out: PathBuf,
        /// Evaluate a fixed weight instead of grid-searching.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run the two-stage pipeline over paired EE/CIW datasets.
    Diagnose {
        /// Stage-1 model (EE, fault-type scheme).
        #[arg(long, required_unless_present = "manifest")]
        stage1: Option<PathBuf>,
        /// Stage-2 model (CIW, joint scheme).
        #[arg(long, required_unless_present = "manifest")]
        stage2: Option<PathBuf>,
        /// Pipeline manifest naming both models (alternative to
        /// --stage1/--stage2).
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// EE dataset (ignored with --stage2-only).
        #[arg(long, required_unless_present = "stage2_only")]
        ee: Option<PathBuf>,
        /// CIW dataset, paired with the EE dataset by sample index.
        #[arg(long)]
        ciw: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Diagnose only the first N pairs.
        #[arg(long)]
        limit: Option<usize>,
        /// Consult only the stage-2 model (known-faulty shortcut).
        #[arg(long)]
        stage2_only: bool,
        /// Also write a pipeline manifest here.
        #[arg(long)]
        save_manifest: Option<PathBuf>,
    },
    /// Emit an SVG plot (with a CSV twin) from computed data.
    Plot {
        /// bode, confusion, or cced.
        #[arg(long)]
        kind: String,
        /// Dataset (.frds) for bode/cced, confusion CSV for confusion.
        #[arg(long)]
        data: PathBuf,
        /// Output SVG path; the CSV twin lands next to it.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated sample indices for bode (default 0).
        #[arg(long)]
        samples: Option<String>,
        /// Fault type filter for cced (e.g. FB).
        #[arg(long)]
        fault_type: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Single machine-parsable line: the chain joined by ": ".
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
