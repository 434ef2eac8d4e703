//! `boxalg`: limit arithmetic from the command line.

mod commands;
mod input;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use commands::{Command, Failure, Mode, Settings, EXIT_INPUT};
use input::{InputError, Problem};

/// Exact limit determinants, solvers, hyperplanes and eigenvalues.
///
/// The problem is a JSON object (or an array of objects for batch mode) read
/// from --json, --file or standard input. Exit codes: 0 success, 2 no
/// solution, 3 input error, 4 enumeration capacity exceeded. BOXALG_CAP
/// overrides the permutation-enumeration cap.
#[derive(Debug, Parser)]
#[command(name = "boxalg", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Inline JSON problem.
    #[arg(long, conflicts_with = "file")]
    json: Option<String>,

    /// Path to a JSON problem file.
    #[arg(long)]
    file: Option<PathBuf>,

    /// Finite index p, evaluated alongside the limit.
    #[arg(long)]
    p: Option<u32>,

    /// Largest p in oracle sweeps.
    #[arg(long)]
    pmax: Option<u32>,

    /// Convergence tolerance for oracle sweeps.
    #[arg(long)]
    tol: Option<f64>,

    /// Which determinant `det` reports.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

fn read_source(cli: &Cli) -> Result<String, InputError> {
    if let Some(text) = &cli.json {
        return Ok(text.clone());
    }
    if let Some(path) = &cli.file {
        return std::fs::read_to_string(path)
            .map_err(|e| InputError::new(path.display().to_string(), format!("cannot read file ({e})")));
    }
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| InputError::new("stdin", format!("cannot read ({e})")))?;
    Ok(text)
}

fn cap_from_env() -> Result<Option<usize>, InputError> {
    match std::env::var("BOXALG_CAP") {
        Ok(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| InputError::new("BOXALG_CAP", format!("{text:?} is not a nonnegative integer"))),
        Err(_) => Ok(None),
    }
}

fn solve_one(cli: &Cli, value: &Value, path: String, settings: Settings) -> (u8, Value) {
    let result = Problem::new(value, path).map_err(Failure::from).and_then(|problem| {
        if let Some(kind) = problem.string("kind")? {
            let expected = format!("{:?}", cli.command).to_lowercase();
            if kind != expected {
                return Err(InputError::new("kind", format!("problem is {kind:?} but the command is {expected}")).into());
            }
        }
        commands::run(cli.command, &problem, settings)
    });
    match result {
        Ok(outcome) => (outcome.code, output::with_floats(outcome.body)),
        Err(failure) => (failure.exit_code(), failure.to_json()),
    }
}

fn execute(cli: &Cli) -> (u8, Value) {
    let prepared = cap_from_env().and_then(|cap| {
        let text = read_source(cli)?;
        Ok((cap, input::parse_document(&text)?))
    });
    let (cap, document) = match prepared {
        Ok(x) => x,
        Err(e) => return (EXIT_INPUT, Failure::Input(e).to_json()),
    };
    let settings = Settings {
        p: cli.p,
        p_max: cli.pmax,
        tol: cli.tol,
        mode: cli.mode,
        cap,
    };
    match &document {
        Value::Array(items) => {
            let results: Vec<(u8, Value)> = items
                .iter()
                .enumerate()
                .map(|(i, item)| solve_one(cli, item, format!("[{i}]"), settings))
                .collect();
            let code = results.iter().map(|(c, _)| *c).max().unwrap_or(0);
            (code, Value::Array(results.into_iter().map(|(_, v)| v).collect()))
        }
        single => solve_one(cli, single, String::new(), settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let (code, body) = execute(&cli);
    if let Some(err) = body.get("error") {
        eprintln!("boxalg: {}", err["message"].as_str().unwrap_or("error"));
    }
    println!("{}", serde_json::to_string(&body).expect("JSON values serialize"));
    ExitCode::from(code)
}
