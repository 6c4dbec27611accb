mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Join(a) => commands::join(a),
        Command::Summarize(a) => commands::summarize(a),
        Command::RankKeywords(a) => commands::rank(a),
        Command::Correlate(a) => commands::correlate(a),
        Command::Series(a) => commands::series(a),
        Command::Nowcast(a) => commands::nowcast(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::DegenerateOnly) => {
            eprintln!("warning: every statistic in the output is degenerate");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
