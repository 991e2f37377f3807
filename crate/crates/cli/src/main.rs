mod json;

use anyhow::{bail, Context, Result};
use binomratio_core::divergence::{DivergenceError, DEFAULT_BINS};
use binomratio_core::model::{limit_law, ModelError, ModelParams, RegimeKind};
use binomratio_core::oracle::{exact_distribution, OracleError, Statistic};
use binomratio_core::runner::{
    preset, run_bound_diagnostics, run_single, run_sweep, DirectionChoice, RunConfig, RunError, SweepSpec,
    DEFAULT_MASTER_SEED, DEFAULT_SAMPLES, PRESET_NAMES,
};
use binomratio_core::sampling::SeedSpec;
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "binomratio",
    version,
    about = "Normal limits of X^s/(X+Y)^r for binomial X, Y"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limit law (center, scale, variance) as JSON.
    Limit {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        regime: RegimeArgs,
    },
    /// Simulate one batch and compare it with its Normal limit.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        regime: RegimeArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// auto, forward or reversed
        #[arg(long, default_value = "auto")]
        direction: DirectionChoice,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a parameter sweep and write one CSV row per run.
    Sweep {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        preset: Option<String>,
        /// TOML sweep description
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the samples per run
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact distribution by enumeration, as JSON.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        /// Standardize under this regime; omit for the raw ratio.
        #[arg(long)]
        regime: Option<RegimeKind>,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scaled remainder bound against empirical quantiles of |scale Q|.
    Bound {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        regime: RegimeArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 15.0)]
    s: f64,
    #[arg(long, default_value_t = 15.0)]
    r: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, ModelError> {
        ModelParams::new(self.n, self.m, self.p, self.s, self.r)
    }
}

#[derive(Args)]
struct RegimeArgs {
    /// case1, case2, case3 or collapse
    #[arg(long)]
    regime: RegimeKind,
    /// Limit of m/n for case2 (default: m/n)
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct OutArgs {
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(OracleError::BudgetExceeded { .. }) = cause.downcast_ref() {
            return 3;
        }
        if cause.is::<ModelError>()
            || cause.is::<DivergenceError>()
            || cause.is::<RunError>()
            || cause.is::<InvalidInput>()
        {
            return 2;
        }
    }
    1
}

/// Bad user input caught outside the core library.
#[derive(Debug)]
struct InvalidInput(String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Limit { model, regime } => {
            let params = model.params()?;
            let regime = regime.regime.resolve(&params, regime.alpha)?;
            json::write(io::stdout().lock(), &limit_law(&params, regime)?)?;
        }
        Command::Simulate {
            model,
            regime,
            samples,
            bins,
            direction,
            seed,
            stream,
            out,
        } => {
            let params = model.params()?;
            let regime = regime.regime.resolve(&params, regime.alpha)?;
            let config = RunConfig {
                samples,
                bins,
                direction,
                seed: SeedSpec::new(seed, stream),
            };
            let run = run_single(&params, regime, &config)?;
            if run.zero_denominator_count > 0 {
                log::warn!("{} draws had X + Y = 0", run.zero_denominator_count);
            }
            json::write(out.writer()?, &run)?;
        }
        Command::Sweep {
            preset: name,
            spec,
            seed,
            samples,
            out,
        } => {
            let mut spec = match (name, spec) {
                (Some(name), _) => {
                    let Some(p) = preset(&name) else {
                        return Err(InvalidInput(format!(
                            "unknown preset {name:?}; expected one of {}",
                            PRESET_NAMES.join(", ")
                        ))
                        .into());
                    };
                    if let Some(w) = p.warning {
                        log::warn!("{w}");
                    }
                    p.spec
                }
                (None, Some(path)) => read_spec(&path)?,
                (None, None) => bail!("either --preset or --spec is required"),
            };
            if let Some(seed) = seed {
                spec.master_seed = seed;
            }
            if let Some(samples) = samples {
                spec.samples = samples;
            }
            let result = run_sweep(&spec)?;
            let mut w = out.writer()?;
            result.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Oracle {
            model,
            regime,
            alpha,
            out,
        } => {
            let params = model.params()?;
            let statistic = match regime {
                Some(kind) => Statistic::Standardized(kind.resolve(&params, alpha)?),
                None => Statistic::Raw,
            };
            json::write(out.writer()?, &exact_distribution(&params, statistic)?)?;
        }
        Command::Bound {
            model,
            regime,
            samples,
            seed,
        } => {
            let params = model.params()?;
            let regime = regime.regime.resolve(&params, regime.alpha)?;
            let d = run_bound_diagnostics(&params, regime, samples, SeedSpec::new(seed, 0))?;
            let mut w = io::stdout().lock();
            writeln!(w, "regime    {}", d.regime)?;
            writeln!(w, "n         {}", params.n())?;
            writeln!(w, "m         {}", params.m())?;
            writeln!(w, "samples   {} ({} skipped)", d.samples, d.skipped)?;
            writeln!(w, "bound     {:.6e}", d.bound)?;
            writeln!(w, "q50       {:.6e}", d.q50)?;
            writeln!(w, "q99       {:.6e}", d.q99)?;
            writeln!(w, "q100      {:.6e}", d.q100)?;
        }
    }
    Ok(())
}

fn read_spec(path: &PathBuf) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text)
        .map_err(|e| InvalidInput(format!("{}: {e}", path.display())))
        .map_err(Into::into)
}
