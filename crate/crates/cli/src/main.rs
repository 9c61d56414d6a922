mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use tat_core::TatError;

use args::{Cli, Command};

fn exit_code(e: &TatError) -> u8 {
    match e {
        TatError::DimensionMismatch(_) | TatError::UnsupportedGeometry(_) | TatError::UnsupportedConversion(_) => 3,
        TatError::Numeric(_) => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<(), TatError> {
    match &cli.command {
        Command::Phantom(a) => commands::phantom(a),
        Command::Forward(a) => commands::forward(a),
        Command::WaveForward(a) => commands::wave_forward(a),
        Command::Recon(a) => commands::recon(a),
        Command::RangeCheck(a) => commands::range_check(a),
        Command::Visibility(a) => commands::visibility(a),
        Command::Metrics(a) => commands::metrics_cmd(a),
        Command::ExportPgm(a) => commands::export_pgm(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
