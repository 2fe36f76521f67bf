mod cli;
mod commands;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use golflab::parallel::with_threads;
use golflab::Seed;

use cli::{Cli, Command};
use commands::{execute, Output};
use manifest::{digest, RunManifest};

fn manifest_path(emit: &Path) -> PathBuf {
    let mut s = emit.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn run_in_pool(threads: usize, command: &Command, seed: u64) -> Result<Output> {
    with_threads(threads, || execute(command, Seed(seed)))?
}

fn replay(threads: usize, path: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: RunManifest = serde_json::from_str(&text).context("parsing manifest")?;
    let out = run_in_pool(threads, &m.parameters, m.seed)?;
    let got = digest(&out.bytes);
    if got != m.digest {
        bail!("digest mismatch for {}: recorded {}, replayed {}", m.subcommand, m.digest, got);
    }
    let note = format!("replayed {} ({got})", m.subcommand);
    Ok(Output { bytes: out.bytes, success: out.success, note: Some(note) })
}

fn run(cli: &Cli) -> Result<bool> {
    let out = match &cli.command {
        Command::Replay { manifest } => replay(cli.threads, manifest)?,
        cmd => run_in_pool(cli.threads, cmd, cli.seed)?,
    };
    match &cli.emit {
        Some(path) => {
            std::fs::write(path, &out.bytes).with_context(|| format!("writing {}", path.display()))?;
            if !matches!(cli.command, Command::Replay { .. }) {
                let m = RunManifest::new(&cli.command, cli.seed, path.display().to_string(), &out.bytes);
                let mut text = serde_json::to_vec_pretty(&m)?;
                text.push(b'\n');
                std::fs::write(manifest_path(path), text)?;
            }
        }
        None => std::io::stdout().lock().write_all(&out.bytes)?,
    }
    if let Some(note) = &out.note {
        eprintln!("{note}");
    }
    Ok(out.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
