//! Command-line front end: load a scenario, run it, write the report.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use fbva_core::ledger::write_ledgers;
use fbva_core::scenario::{
    emit_report, load_scenario, path_ledgers, report_from_paths, ReportFormat, RunOptions,
    SimulatedPaths,
};
use fbva_core::Error;

#[derive(Debug, Parser)]
#[command(name = "fbva", version, about = "Bilateral and funded valuation adjustments by Monte Carlo")]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,

    /// Override the number of Monte Carlo paths.
    #[arg(long)]
    paths: Option<usize>,

    /// Override the random seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Report format: json, csv or text.
    #[arg(long, default_value = "text")]
    format: String,

    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write both margin-loan ledgers of every path as `time,amount,tag,path_id` rows.
    #[arg(long, value_name = "PATH")]
    dump_ledgers: Option<PathBuf>,

    /// Compare estimates with quadrature values and print the deviations.
    #[arg(long)]
    oracle_check: bool,

    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,

    /// Record wall-clock time in the report (makes reports differ between runs).
    #[arg(long)]
    timing: bool,
}

fn execute(args: &Args) -> Result<bool, Error> {
    let format: ReportFormat = args.format.parse()?;
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(n) = args.paths {
        if n == 0 {
            return Err(Error::Config {
                field: "paths".into(),
                message: "must be at least 1".into(),
            });
        }
        scenario.n_paths = n;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let options = RunOptions {
        oracle_check: args.oracle_check,
        record_timing: args.timing,
    };

    let started = Instant::now();
    let paths = SimulatedPaths::generate(&scenario)?;
    let report = report_from_paths(&scenario, &paths, options, started)?;

    if let Some(entries) = &report.oracle {
        for e in entries {
            eprintln!(
                "oracle {:<6} estimate {:>14.8}  quadrature {:>14.8}  deviation {:>+7.3} se",
                e.kind.label(),
                e.estimate,
                e.oracle,
                e.deviation_in_se
            );
        }
    }

    if let Some(path) = &args.dump_ledgers {
        let ledgers: Vec<_> = (0..paths.exposure.n_paths())
            .flat_map(|i| path_ledgers(&scenario, &paths, i))
            .collect();
        write_ledgers(BufWriter::new(File::create(path)?), &ledgers)?;
    }

    emit_report(&report, format, args.out.as_deref())?;
    let failed = report.identity_failed();
    if failed {
        eprintln!(
            "margin ledger identity FAILED on {} ledgers (first path {:?})",
            report.identity.failures, report.identity.first_failure_path
        );
    }
    Ok(!failed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&args)),
            Err(e) => {
                eprintln!("error: cannot start {n} workers: {e}");
                return ExitCode::from(3);
            }
        },
        None => execute(&args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
