use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pmech::commands;
use pmech::config::{Command, Format, RunConfig};

/// Exit status: 0 all checks passed, 1 a check failed or numerics broke down,
/// 2 the configuration or input was rejected.
#[derive(Parser)]
#[command(name = "pmech", version, about = "p-mechanics computations and verification suites")]
struct Cli {
    /// run configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// run a single verification suite
    #[arg(long, global = true)]
    suite: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory (else config output_dir, else $PMECH_OUT_DIR, else ./pmech-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv, json or both
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// run the verification suites
    Verify,
    /// forced oscillator trajectory
    Oscillator,
    /// kernel expectation values as h shrinks
    ClassicalLimit,
    /// canonical-transformation residual table
    Cantrans,
    /// Coulomb spectrum
    Kepler {
        #[arg(long)]
        nmax: Option<u32>,
    },
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            RunConfig::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.suite {
        if !pmech::verify::SUITES.contains(&s.as_str()) {
            return Err(format!("unknown suite '{s}' (expected one of {})", pmech::verify::SUITES.join(", ")));
        }
        cfg.suite = Some(s.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse::<Format>()?;
    }
    match &cli.command {
        Some(Cmd::Verify) => cfg.command = Command::Verify,
        Some(Cmd::Oscillator) => cfg.command = Command::Oscillator,
        Some(Cmd::ClassicalLimit) => cfg.command = Command::ClassicalLimit,
        Some(Cmd::Cantrans) => cfg.command = Command::Cantrans,
        Some(Cmd::Kepler { nmax }) => {
            cfg.command = Command::Kepler;
            if let Some(k) = nmax {
                if *k == 0 {
                    return Err("--nmax must be at least 1".into());
                }
                cfg.kepler.nmax = *k;
            }
        }
        None => {}
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("PMECH_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("pmech-out"));
    match commands::run(&cfg, &out) {
        Ok(o) => {
            print!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(commands::CommandError::Input(e)) => {
            eprintln!("error: invalid input: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
