//! Command-line driver: configuration, dispatch and result emission for the
//! `nilrig` experiments.

pub mod args;
pub mod config;
pub mod expr;
pub mod output;
pub mod run;

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::args::Cli;
use crate::config::{parse_toml, validate, Command, Diagnostic, DiagnosticKind, RunConfig};
use crate::run::RunError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: i32,
    kind: &'a str,
    message: String,
    diagnostics: &'a [Diagnostic],
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    command: &'a str,
    valid: bool,
    diagnostics: &'a [Diagnostic],
}

fn exit_code(diags: &[Diagnostic]) -> i32 {
    if diags.iter().any(|d| d.kind == DiagnosticKind::Budget) {
        EXIT_BUDGET
    } else {
        EXIT_CONFIG
    }
}

fn report_error(err: &mut dyn Write, code: i32, message: String, diags: &[Diagnostic]) -> i32 {
    let kind = match code {
        EXIT_BUDGET => "budget",
        EXIT_CONFIG => "config",
        _ => "io",
    };
    let obj = ErrorObject {
        error: ErrorBody {
            code,
            kind,
            message,
            diagnostics: diags,
        },
    };
    let _ = writeln!(err, "{}", serde_json::to_string(&obj).expect("error object serializes"));
    code
}

/// Loads the config file named in the flags (if any) and applies the flags.
pub fn load_config(cli: &Cli) -> Result<(RunConfig, Vec<Diagnostic>), Diagnostic> {
    let (cmd, ov, _) = cli.action.parts();
    let (mut cfg, diags) = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Diagnostic {
                kind: DiagnosticKind::Syntax,
                field: "config".into(),
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_toml(&text)?
        }
        None => (RunConfig::default(), Vec::new()),
    };
    ov.apply(&mut cfg);
    cfg.command = Some(cmd);
    Ok((cfg, diags))
}

/// Runs a parsed command line; returns the process exit code.
pub fn execute(cli: &Cli, env_out_dir: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (cmd, _, validate_only) = cli.action.parts();
    let (cfg, mut diags) = match load_config(cli) {
        Ok(v) => v,
        Err(d) => return report_error(err, EXIT_CONFIG, d.message.clone(), &[d]),
    };
    diags.extend(validate(&cfg, cmd));

    if validate_only {
        let rep = ValidateReport {
            command: cmd.name(),
            valid: diags.is_empty(),
            diagnostics: &diags,
        };
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
        return if diags.is_empty() { EXIT_OK } else { exit_code(&diags) };
    }
    if !diags.is_empty() {
        let code = exit_code(&diags);
        return report_error(err, code, format!("invalid configuration for {}", cmd.name()), &diags);
    }
    run_and_emit(&cfg, cmd, env_out_dir, out, err)
}

fn run_and_emit(cfg: &RunConfig, cmd: Command, env_out_dir: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (envelope, charts) = match run::run(cfg, cmd) {
        Ok(v) => v,
        Err(RunError::Config(d)) => return report_error(err, exit_code(&d), "invalid configuration".into(), &d),
        Err(RunError::Core(e)) => {
            let code = if matches!(e, nilrig::Error::Budget(_)) { EXIT_BUDGET } else { EXIT_CONFIG };
            return report_error(err, code, e.to_string(), &[]);
        }
    };
    if writeln!(out, "{}", envelope.to_json()).is_err() {
        return EXIT_IO;
    }
    if let Some(dir) = cfg.output.dir.clone().or(env_out_dir) {
        let stem = cfg.output.name.clone().unwrap_or_else(|| cmd.name().to_string());
        if let Err(e) = output::write_files(&dir, &stem, &cfg.output.formats, &envelope, &charts) {
            return report_error(err, EXIT_IO, format!("writing to {}: {e}", dir.display()), &[]);
        }
    }
    EXIT_OK
}
