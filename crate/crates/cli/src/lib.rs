//! `toptrap` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation, 3 integrity (oracle
//! mismatch), 4 IO.

pub mod args;
mod commands;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Format};
use output::{Dataset, Report};

/// Difference between methods in `evolve` that counts as an integrity failure.
pub const CROSS_METHOD_TOLERANCE: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Integrity(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Integrity(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Integrity(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<toptrap_core::Error> for CliError {
    fn from(e: toptrap_core::Error) -> Self {
        use toptrap_core::Error as E;
        match e {
            E::Domain(_) | E::SweepTooLarge { .. } => CliError::Usage(flag_message(&e.to_string())),
            E::Integration { .. } | E::OracleMismatch { .. } => CliError::Integrity(e.to_string()),
        }
    }
}

/// Core validation messages start with the parameter name; prefix it with the
/// matching flag.
fn flag_message(msg: &str) -> String {
    let name: String = msg
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    match name.as_str() {
        "omega0" | "omega" | "theta" | "a0" | "b0" | "gamma" | "mu" | "mass" | "margin" | "escape_time" => {
            format!("--{}: {msg}", name.replace('_', "-"))
        }
        _ => msg.to_string(),
    }
}

/// What a command produced, before serialization.
pub(crate) enum Output {
    Table { data: Dataset, chart: Option<svg::Chart> },
    Report(Report),
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let start = Instant::now();
    let (output, deferred) = commands::dispatch(&cli.command)?;
    let bytes = render(output, cli.format)?;
    write_output(cli, &bytes)?;
    if cli.verbose > 0 {
        eprintln!("done in {:.3} s", start.elapsed().as_secs_f64());
    }
    // Integrity failures are reported after the data is written so it can be
    // inspected.
    deferred.map_or(Ok(()), Err)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TOPTRAP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("TOPTRAP_THREADS must be a positive integer, got '{raw}'")))?;
    // A second call in the same process (tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn render(output: Output, format: Option<Format>) -> Result<Vec<u8>, CliError> {
    let text = match output {
        Output::Table { data, chart } => match format.unwrap_or(Format::Csv) {
            Format::Csv => output::to_csv(&data),
            Format::Json => json_text(&output::to_json(&data)),
            Format::Svg => chart
                .ok_or_else(|| CliError::Usage("--format svg is not available for this command".into()))?
                .render(),
        },
        Output::Report(report) => match format {
            None => report.to_text(),
            Some(Format::Csv) => report.to_csv(),
            Some(Format::Json) => json_text(&report.to_json()),
            Some(Format::Svg) => return Err(CliError::Usage("--format svg is only available for tables".into())),
        },
    };
    Ok(text.into_bytes())
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn write_output(cli: &Cli, bytes: &[u8]) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_names_are_prefixed() {
        assert_eq!(
            flag_message("theta out of [0, pi]: 4"),
            "--theta: theta out of [0, pi]: 4"
        );
        assert_eq!(
            flag_message("escape_time must be finite and > 0, got 0"),
            "--escape-time: escape_time must be finite and > 0, got 0"
        );
        assert_eq!(flag_message("something else"), "something else");
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let usage: CliError = toptrap_core::Error::Domain("x".into()).into();
        assert_eq!(usage.exit_code(), 2);
        let integrity: CliError = toptrap_core::Error::OracleMismatch {
            quantity: "survival".into(),
            delta: 1.0,
            tolerance: 1e-8,
            location: "t=0".into(),
        }
        .into();
        assert_eq!(integrity.exit_code(), 3);
        assert_eq!(CliError::Io("x".into()).exit_code(), 4);
    }
}
