use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::Parser;
use qnil_core::report::{run, Command, RunOptions};
use qnil_core::Error;
use serde_json::json;

const TOLERANCE_ENV: &str = "QNIL_TOLERANCE";

/// Entanglement measures for η-qubits, superqubits and squbits.
///
/// Reads one state expression (or JSON state document) from FILE and prints
/// a JSON report on stdout. Exit status: 0 success, 1 unreadable input,
/// 2 the measure is undefined for the state.
#[derive(Debug, Parser)]
#[command(name = "qnil", version)]
struct Cli {
    #[arg(value_parser = PossibleValuesParser::new(Command::ALL.map(Command::name))
        .map(|s| s.parse::<Command>().expect("listed command")))]
    command: Command,

    file: PathBuf,

    /// Zero tolerance for coefficient pruning and factorability; overrides
    /// the QNIL_TOLERANCE environment variable.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Print the body of the result as a bare number.
    #[arg(long)]
    raw: bool,

    /// Emit JSON (the default).
    #[arg(long)]
    json: bool,

    /// Qubit pair for `wronskian`, e.g. `1,3`.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,

    /// Left block for `factor`, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<usize>>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two indices like 1,2")?;
    let idx = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((idx(a)?, idx(b)?))
}

fn fail(code: u8, error: &str, message: String) -> ExitCode {
    println!("{}", json!({ "error": error, "message": message }));
    ExitCode::from(code)
}

fn fail_with(e: &Error) -> ExitCode {
    let mut out = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Parse {
        line, column, expected, ..
    } = e
    {
        out["line"] = json!(line);
        out["column"] = json!(column);
        out["expected"] = json!(expected);
    }
    println!("{out}");
    ExitCode::from(if e.is_syntax() { 1 } else { 2 })
}

fn tolerance(flag: Option<f64>) -> Result<f64, String> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| format!("{TOLERANCE_ENV}={v:?}: {e}")),
        Err(_) => Ok(qnil_core::algebra::DEFAULT_TOLERANCE),
    }
}

fn format_raw(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else {
        format!("{re}{im:+}i")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.render());
            return fail(1, "UsageError", e.kind().to_string());
        }
    };
    let tolerance = match tolerance(cli.tolerance) {
        Ok(t) => t,
        Err(msg) => return fail(1, "UsageError", msg),
    };
    let text = match std::fs::read_to_string(&cli.file) {
        Ok(t) => t,
        Err(e) => return fail(1, "IoError", format!("{}: {e}", cli.file.display())),
    };
    let opts = RunOptions {
        tolerance,
        pair: cli.pair.unwrap_or((1, 2)),
        split: cli.split,
    };
    match run(cli.command, &text, &opts) {
        Ok(report) if cli.raw => {
            println!("{}", format_raw(report.body.re, report.body.im));
            ExitCode::SUCCESS
        }
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail_with(&e),
    }
}
