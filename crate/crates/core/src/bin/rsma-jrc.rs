use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rsma_jrc::experiments::{self, ExperimentSpec, Modes, QUANTIZER_SAMPLES};
use rsma_jrc::{Error, SystemConfig};

#[derive(Parser)]
#[command(
    name = "rsma-jrc",
    version,
    about = "RSMA joint radar-communication precoder design with low-resolution DACs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// `key = value` config file applied on top of the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bit values, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    bits: Vec<u32>,
    /// Radar weights, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// rsma, sdma or both.
    #[arg(long, global = true)]
    mode: Option<Modes>,
    /// Channel seeds, comma separated. More than one gives replicates.
    #[arg(long, global = true, value_delimiter = ',')]
    seed: Vec<u64>,
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Extra config overrides, `key=value`.
    #[arg(long = "set", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// ADMM residual traces, one file per bit value (λ = 1).
    Convergence,
    /// Sum-rate and NMSE against b at λ = 10.
    Bitsweep,
    /// NMSE against sum-rate over a logarithmic λ grid.
    Tradeoff,
    /// Uniform quantizer against the linear model.
    ValidateQuantizer {
        #[arg(long, default_value_t = QUANTIZER_SAMPLES)]
        samples: usize,
    },
    /// One design at the configured (b, λ).
    SingleRun,
}

fn base_config(c: &Common) -> Result<SystemConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => SystemConfig::from_file(path)?,
        None => SystemConfig::default(),
    };
    for kv in &c.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("--set expects key=value, got `{kv}`"))
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(&s) = c.seed.first() {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn apply(spec: &mut ExperimentSpec, c: &Common) {
    if !c.bits.is_empty() {
        spec.bits = c.bits.clone();
    }
    if !c.lambda.is_empty() {
        spec.lambdas = c.lambda.clone();
    }
    if let Some(m) = c.mode {
        spec.modes = m;
    }
    if !c.seed.is_empty() {
        spec.seeds = c.seed.clone();
    }
    spec.workers = c.workers;
}

fn print_rows(rows: &[experiments::SweepRow]) {
    println!(
        "{:<5} {:>3} {:>10} {:>6} {:>10} {:>10} {:>9} {:>6}",
        "mode", "b", "lambda", "seed", "sum_rate", "nmse", "nmse_dB", "iters"
    );
    for r in rows {
        println!(
            "{:<5} {:>3} {:>10.3e} {:>6} {:>10.4} {:>10.4} {:>9.3} {:>6}{}",
            r.mode,
            r.bits,
            r.lambda,
            r.seed,
            r.sum_rate,
            r.nmse,
            r.nmse_db,
            r.iterations,
            if r.converged { "" } else { " (cap)" }
        );
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    let c = &cli.common;
    let mut base = base_config(c)?;
    match cli.command {
        Command::Convergence => {
            let mut spec = ExperimentSpec::convergence(base, &c.out);
            apply(&mut spec, c);
            for path in experiments::run_convergence(&spec)? {
                println!("{}", path.display());
            }
        }
        Command::Bitsweep => {
            let mut spec = ExperimentSpec::bit_sweep(base, &c.out);
            apply(&mut spec, c);
            print_rows(&experiments::run_bit_sweep(&spec)?);
        }
        Command::Tradeoff => {
            let mut spec = ExperimentSpec::tradeoff(base, &c.out);
            apply(&mut spec, c);
            print_rows(&experiments::run_tradeoff_sweep(&spec)?);
        }
        Command::ValidateQuantizer { samples } => {
            let mut spec = ExperimentSpec::quantizer(base, &c.out);
            apply(&mut spec, c);
            experiments::run_quantizer_validation(&spec, samples)?;
            print!(
                "{}",
                std::fs::read_to_string(c.out.join("quantizer_summary.txt"))?
            );
        }
        Command::SingleRun => {
            if c.bits.len() > 1 || c.lambda.len() > 1 || c.seed.len() > 1 {
                return Err(Error::InvalidArgument(
                    "single-run takes one --bits, --lambda and --seed".into(),
                ));
            }
            if let Some(&b) = c.bits.first() {
                base.bits = b;
            }
            if let Some(&l) = c.lambda.first() {
                base.lambda = l;
            }
            let modes = c.mode.unwrap_or(match base.mode {
                rsma_jrc::Mode::Rsma => Modes::Rsma,
                rsma_jrc::Mode::Sdma => Modes::Sdma,
            });
            let mut spec = ExperimentSpec::bit_sweep(base, &c.out);
            spec.modes = modes;
            let rows: Vec<_> = experiments::run_single(&spec)?
                .into_iter()
                .map(|(r, _)| r)
                .collect();
            print_rows(&rows);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
