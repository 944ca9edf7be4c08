//! `critline`: command-line front end for critline-core.

mod args;
mod commands;
mod config;
mod output;
mod store;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use critline_core::Error;
use serde_json::json;

use args::Cli;
use output::{render, Manifest};
use store::ZeroStore;

const EXIT_PARAMETER: u8 = 2;
const EXIT_COVERAGE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_FAILED: u8 = 5;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::Parameter(_)
        | Error::Precision(_)
        | Error::Pole
        | Error::Format { .. }
        | Error::Size(_)
        | Error::Resolution(_) => EXIT_PARAMETER,
        Error::Coverage(_) | Error::Data(_) | Error::Io(_) => EXIT_COVERAGE,
        Error::Numeric(_)
        | Error::Consistency(_)
        | Error::MissedZero { .. }
        | Error::Proximity(_)
        | Error::Quadrature(_)
        | Error::Fit(_) => EXIT_NUMERIC,
    }
}

fn fail(kind: &str, code: u8, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "exit": code, "message": message }));
    ExitCode::from(code)
}

fn fail_with(e: &Error) -> ExitCode {
    fail(e.kind(), exit_code(e), &e.to_string())
}

/// Every argument with a value, in definition order, global ones first.
fn manifest(cmd: &clap::Command, matches: &clap::ArgMatches) -> Manifest {
    let Some((name, sub)) = matches.subcommand() else {
        return Manifest::default();
    };
    let sub_cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
    let mut params = Vec::new();
    for arg in cmd.get_arguments().chain(sub_cmd.get_arguments()) {
        let id = arg.get_id().as_str();
        let key = arg.get_long().unwrap_or(id);
        if params.iter().any(|(k, _): &(String, String)| k == key) || matches!(id, "help" | "version") {
            continue;
        }
        if let Ok(Some(raw)) = sub.try_get_raw(id) {
            let values: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            params.push((key.to_string(), values.join(",")));
        }
    }
    Manifest {
        command: name.to_string(),
        params,
    }
}

fn main() -> ExitCode {
    let mut argv: Vec<OsString> = std::env::args_os().collect();
    let mut cmd = Cli::command();
    cmd.build();
    if let Some(path) = config::config_path(&argv) {
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => config::parse(&text),
            Err(e) => Err(Error::Io(format!("{}: {e}", path.display()))),
        };
        match entries.and_then(|e| config::merge(argv, &e, &cmd)) {
            Ok(merged) => argv = merged,
            Err(e) => return fail_with(&e),
        }
    }
    let matches = match cmd.clone().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail("usage", EXIT_PARAMETER, first);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");
    let mut manifest = manifest(&cmd, &matches);
    let store = ZeroStore::new(&cli.cache_dir, !cli.no_scan);
    manifest.params.push(("zero_cache".into(), store.path.display().to_string()));

    let report = match commands::run(&cli.command, &store) {
        Ok(r) => r,
        Err(e) => return fail_with(&e),
    };
    let text = render(&report, &manifest, cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        return fail_with(&Error::from(e));
    }
    match report.verdict {
        Some(false) => ExitCode::from(EXIT_FAILED),
        _ => ExitCode::SUCCESS,
    }
}
