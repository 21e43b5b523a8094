use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

mod args;
mod commands;
mod output;

use args::Cli;
use output::{CliResult, Outputs};

const USAGE_EXIT: u8 = 64;

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    model: String,
    argv: &'a [String],
    params: serde_json::Value,
    seed: Option<u64>,
    version: &'static str,
    outputs: &'a [String],
    exit_code: u8,
    wall_time_s: f64,
    defaults: reldiff_core::defaults::DefaultsTable,
}

fn run(cli: &Cli, argv: &[String]) -> CliResult<u8> {
    let start = Instant::now();
    let mut out = Outputs::new(&cli.command.common().out)?;
    let done = commands::run(&cli.command, &mut out)?;
    let code = done.status.exit_code();
    let manifest = RunManifest {
        command: cli.command.name(),
        model: done.model,
        argv,
        params: done.params,
        seed: done.seed,
        version: env!("CARGO_PKG_VERSION"),
        outputs: out.written(),
        exit_code: code,
        wall_time_s: start.elapsed().as_secs_f64(),
        defaults: reldiff_core::defaults::table(),
    };
    out.write_json("run.json", &manifest)?;
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT),
            };
        }
    };
    match run(&cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
