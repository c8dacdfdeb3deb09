use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use unipred::cli::{exit_code, parse_backend, run, CheckStatus, Experiment, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "unipred", about = "Run a universal-prediction experiment and write CSV output")]
struct Args {
    /// dominance, converge-exact, converge-mc, gap, dense, diverge or solomonoff-invariants
    #[arg(long)]
    experiment: Option<Experiment>,
    /// key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// dense, gapped or custom
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// exact or float
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
    /// Print the default configuration and exit
    #[arg(long)]
    print_defaults: bool,
}

fn load(args: &Args) -> unipred::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                unipred::Error::Configuration(format!("cannot read {}: {e}", path.display()))
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(e) = args.experiment {
        config.experiment = e;
    }
    if let Some(c) = &args.class {
        config.set("class", c)?;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(s) = args.samples {
        config.samples = s;
    }
    if let Some(b) = &args.backend {
        config.backend = parse_backend(b)?;
    }
    if let Some(o) = &args.out {
        config.out = o.clone();
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.print_defaults {
        print!("{}", ExperimentConfig::default().serialize());
        return ExitCode::SUCCESS;
    }
    let result = load(&args).and_then(|c| run(&c));
    match &result {
        Ok(outcome) if !args.quiet => {
            println!("{}: {}", outcome.experiment, outcome.anchor);
            for c in &outcome.checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Info => "info",
                };
                println!("  {tag} {} = {:.6e} (bound {:.6e})", c.name, c.value, c.bound);
            }
            for n in &outcome.notes {
                println!("  note: {n}");
            }
        }
        Ok(_) => {}
        Err(e) => eprintln!("unipred: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
