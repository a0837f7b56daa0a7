//! Command-line front end: one subcommand per analysis, JSON envelopes on
//! stdout, diagnostics on stderr. Exit 0 is ok, 2 a violated inequality, 1 an error.

mod args;
mod commands;
mod envelope;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::value::RawValue;

use args::Cli;
use commands::{Body, Output};
use envelope::{ReportEnvelope, Status, SCHEMA_VERSION};

fn envelope_line(command: &[String], input: Option<&envelope::Fingerprint>, status: Status, payload: &RawValue) -> String {
    let env = ReportEnvelope {
        schema_version: SCHEMA_VERSION,
        tool: "hypercube-spectra",
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        status,
        payload,
    };
    serde_json::to_string(&env).expect("envelope serializes")
}

fn emit(command: &[String], output: &Output) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    match &output.body {
        Body::Text(text) => out.write_all(text.as_bytes())?,
        Body::Envelope { input, payload, lines } => {
            for line in lines {
                writeln!(out, "{line}")?;
            }
            writeln!(out, "{}", envelope_line(command, input.as_ref(), output.status, payload))?;
        }
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let command: Vec<String> = std::env::args().skip(1).collect();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global() {
            eprintln!("error: cannot start {workers} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command) {
        Ok(output) => {
            if let Err(e) = emit(&command, &output) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if output.status == Status::Violation {
                eprintln!("violation found; see the report payload");
            }
            ExitCode::from(output.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            let payload = serde_json::value::to_raw_value(&serde_json::json!({ "message": e.to_string() }))
                .expect("message serializes");
            println!("{}", envelope_line(&command, None, Status::Error, &payload));
            ExitCode::from(1)
        }
    }
}
