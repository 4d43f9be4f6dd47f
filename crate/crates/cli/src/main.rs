mod args;
mod commands;
mod config;
mod emit;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn run(argv: Vec<String>) -> ExitCode {
    let argv = match config::merge_argv(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = cli.command.common().clone();
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_RESOURCE);
        }
    }
    let outcome = match &cli.command {
        Command::Census(a) => commands::census_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Green(a) => commands::green_cmd(a),
        Command::ZeroOne(a) => commands::zero_one_cmd(a),
        Command::Invariance(a) => commands::invariance_cmd(a),
        Command::Jeulin(a) => commands::jeulin_cmd(a),
    };
    match outcome {
        Ok(report) => {
            let name = cli.command.name();
            match emit::emit(name, &cli.command.resolved(), common.format, common.out.as_deref(), &report) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(EXIT_RESOURCE)
                }
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_RESOURCE)
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args().collect())
}
