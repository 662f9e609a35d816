//! `pohozaev`: command-line front end of the ground-state solver.

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use pohozaev::sweep::{parallel_available, with_threads};
use pohozaev::Error;

use args::{Cli, Command};
use commands::{Context, EXIT_INFEASIBLE, EXIT_NONCONVERGENCE};
use output::{read_manifest, Manifest, OutputDir};

/// Exit code for an error that ended a run early.
fn error_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::InfeasibleFamily(_)
            | Error::InfeasibleGuess { .. }
            | Error::ProjectionInfeasible { .. }
            | Error::Domain(_)
            | Error::Grid(_)
            | Error::Config(_),
        ) => EXIT_INFEASIBLE,
        Some(Error::SorNonConvergence { .. } | Error::FlatLandscape { .. } | Error::NonFinite { .. }) => {
            EXIT_NONCONVERGENCE
        }
        _ => 1,
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Solve { .. } => "solve",
        Command::Sweep { .. } => "sweep",
        Command::Study { .. } => "study",
        Command::Demo { .. } => "demo",
        Command::Reproduce { .. } => "reproduce",
        Command::Replay { .. } => "replay",
    }
}

fn dispatch(cli: &Cli, ctx: &mut Context<'_>) -> Result<i32> {
    match &cli.command {
        Command::Solve { model, solver } => commands::solve(ctx, model, solver),
        Command::Sweep {
            lambdas,
            s_values,
            solver,
        } => commands::sweep(ctx, lambdas, s_values, solver),
        Command::Study {
            kind,
            model,
            solver,
            panels_list,
            spacings,
            radii,
        } => commands::study(ctx, *kind, model, solver, panels_list, spacings, radii),
        Command::Demo { kind, solver } => commands::demo(ctx, *kind, solver),
        Command::Reproduce { table, solver } => commands::reproduce(ctx, *table, solver),
        Command::Replay { .. } => unreachable!("replay is resolved before dispatch"),
    }
}

/// Run one parsed command, writing `manifest.json` next to its outputs.
fn run(cli: Cli, argv: Vec<String>) -> i32 {
    let mut out = match OutputDir::create(&cli.global.out) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let mut manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        argv,
        command: command_name(&cli.command).to_string(),
        seed: cli.global.seed,
        parallel: cli.global.parallel,
        parallel_feature: parallel_available(),
        model: None,
        config: None,
        outputs: Vec::new(),
        wall_seconds: 0.0,
        exit_code: 0,
    };
    let started = std::time::Instant::now();
    let threads = cli.global.parallel;
    let code = with_threads(threads, || {
        let mut ctx = Context {
            out: &mut out,
            manifest: &mut manifest,
            parallel: threads != 1,
        };
        match dispatch(&cli, &mut ctx) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                error_code(&e)
            }
        }
    });
    manifest.outputs = out.files().to_vec();
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.exit_code = code;
    if let Err(e) = out.json("manifest.json", &manifest) {
        eprintln!("error: {e:#}");
        return if code == 0 { 1 } else { code };
    }
    code
}

/// `argv` with any `--out DIR` / `--out=DIR` removed.
fn without_out(argv: &[String]) -> Vec<String> {
    let mut kept = Vec::with_capacity(argv.len());
    let mut skip_next = false;
    for a in argv {
        if skip_next {
            skip_next = false;
        } else if a == "--out" {
            skip_next = true;
        } else if !a.starts_with("--out=") {
            kept.push(a.clone());
        }
    }
    kept
}

/// Re-parse the arguments stored in a manifest; outputs go to `out` if given.
fn replay(manifest_path: &std::path::Path, out: Option<&std::path::Path>) -> Result<(Cli, Vec<String>)> {
    let manifest = read_manifest(manifest_path)?;
    let mut argv = manifest.argv.clone();
    if let Some(out) = out {
        argv = without_out(&argv);
        argv.push("--out".into());
        argv.push(out.display().to_string());
    }
    let cli = Cli::try_parse_from(std::iter::once("pohozaev".to_string()).chain(argv.iter().cloned()))?;
    if matches!(cli.command, Command::Replay { .. }) {
        anyhow::bail!("a manifest cannot replay another replay");
    }
    Ok((cli, manifest.argv))
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let argv: Vec<String> = raw.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = Cli::parse_from(&raw);
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let (cli, argv) = match &cli.command {
        Command::Replay { manifest } => {
            let explicit_out = argv.iter().any(|a| a == "--out" || a.starts_with("--out="));
            let out = explicit_out.then_some(cli.global.out.as_path());
            match replay(manifest, out) {
                Ok(parsed) => parsed,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            }
        }
        _ => (cli, argv),
    };
    ExitCode::from(run(cli, argv) as u8)
}
