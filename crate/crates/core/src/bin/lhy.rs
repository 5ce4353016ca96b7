use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lhy_core::pipeline::{self, Command, RunConfig};
use lhy_core::Error;

#[derive(Parser)]
#[command(name = "lhy", about = "Free-energy upper bound laboratory for the dilute Bose gas")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Box scattering lengths a_N over an N ladder.
    Scattering(Flags),
    /// Free-energy table over rho x temp-ratio.
    FreeEnergy(Flags),
    /// Full pass/fail check table.
    Verify(Flags),
    /// Exact Fock-space operator checks.
    FockDemo {
        #[command(flatten)]
        flags: Flags,
        /// Directory for triplet dumps of the default layout's operators.
        #[arg(long)]
        dump_ops: Option<PathBuf>,
    },
    /// Window and box-bookkeeping checks.
    Localize(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    temp_ratio: Option<String>,
    /// soft-sphere:V0=<f>,R=<f> or zero.
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    cap_factor: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_parser = ["full", "box"])]
    alpha_source: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    c_eps: Option<String>,
    #[arg(long)]
    n_ladder: Option<String>,
    #[arg(long)]
    renorm_ladder: Option<String>,
    #[arg(long)]
    renorm_cap_factor: Option<String>,
    #[arg(long)]
    c_window: Option<String>,
}

fn build(cli: Cli) -> Result<RunConfig, Error> {
    let (command, flags, dump) = match cli.command {
        Cmd::Scattering(f) => (Command::Scattering, f, None),
        Cmd::FreeEnergy(f) => (Command::FreeEnergy, f, None),
        Cmd::Verify(f) => (Command::Verify, f, None),
        Cmd::FockDemo { flags, dump_ops } => (Command::FockDemo, flags, dump_ops),
        Cmd::Localize(f) => (Command::Localize, f, None),
    };
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        cfg.apply_kv(&text)?;
    }
    cfg.command = command;
    let pairs = [
        ("rho", &flags.rho),
        ("gamma", &flags.gamma),
        ("epsilon", &flags.epsilon),
        ("temp-ratio", &flags.temp_ratio),
        ("potential", &flags.potential),
        ("cap-factor", &flags.cap_factor),
        ("tol", &flags.tol),
        ("seed", &flags.seed),
        ("alpha-source", &flags.alpha_source),
        ("c-eps", &flags.c_eps),
        ("n-ladder", &flags.n_ladder),
        ("renorm-ladder", &flags.renorm_ladder),
        ("renorm-cap-factor", &flags.renorm_cap_factor),
        ("c-window", &flags.c_window),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if flags.out.is_some() {
        cfg.out = flags.out;
    }
    if dump.is_some() {
        cfg.dump_ops = dump;
    }
    cfg.potential()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match build(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("lhy: {e}");
            return ExitCode::from(2);
        }
    };
    match pipeline::run(&cfg) {
        Ok(out) => {
            print!("{}", out.report);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("lhy: {} checks failed", cfg.command.name());
                ExitCode::from(1)
            }
        }
        Err(e @ (Error::InvalidParameter(_) | Error::Parse(_))) => {
            eprintln!("lhy: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("lhy: {} failed: {e}", cfg.command.name());
            ExitCode::from(1)
        }
    }
}
