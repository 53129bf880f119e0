use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use gabor_spectra::config::{Command, RunConfig};

/// Gabor frame-bound and time-frequency experiments driven by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "gabor-spectra", version)]
struct Cli {
    /// Command to run; must match `command` in the config.
    command: Command,
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for generated signals and node sets; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "GABOR_SPECTRA_THREADS", default_value_t = 0)]
    threads: usize,
}

fn run(cli: Cli) -> Result<i32> {
    let mut cfg = RunConfig::load(&cli.config)?;
    if cfg.command != cli.command {
        bail!("command: the config is for `{}` but `{}` was requested", cfg.command, cli.command);
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_dir = match (cli.out, &cfg.out_dir) {
        (Some(dir), _) => dir,
        (None, Some(dir)) if dir.is_relative() => cli.config.parent().map(|p| p.join(dir)).unwrap_or_else(|| dir.clone()),
        (None, Some(dir)) => dir.clone(),
        (None, None) => bail!("out_dir: missing (give it in the config or pass --out)"),
    };
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().context("configuring worker threads")?;
    let threads = rayon::current_num_threads();
    let status = gabor_spectra::execute(&cfg, &out_dir, threads)?;
    eprintln!("{}: {:?}, outputs in {}", cfg.command, status, out_dir.display());
    Ok(status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
