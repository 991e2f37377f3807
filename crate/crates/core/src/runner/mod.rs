//! Experiment orchestration: single comparisons, parameter sweeps and
//! remainder diagnostics.

mod presets;

pub use presets::{preset, Preset, DEFAULT_MASTER_SEED, DEFAULT_SAMPLES, PRESET_NAMES};

use crate::calculus::{log_scaled_remainder_bound, scaled_remainder};
use crate::divergence::{
    compare_batches_with_histograms, Direction, DivergenceError, DivergenceReport, Histogram, DEFAULT_BINS,
};
use crate::model::{limit_law, LimitLaw, ModelError, ModelParams, Regime, RegimeKind};
use crate::numeric::quantile_sorted;
use crate::sampling::{reference_normal_batch, simulate_batch, Binomial, Lane, SeedSpec};
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Divergence(#[from] DivergenceError),
    #[error("invalid sweep: {0}")]
    Sweep(String),
}

/// KL direction as requested by the user.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    /// Reversed for the collapse regime, forward otherwise.
    #[default]
    Auto,
    Forward,
    Reversed,
}

impl DirectionChoice {
    pub fn resolve(self, regime: Regime) -> Direction {
        match self {
            DirectionChoice::Auto => Direction::default_for(Some(regime)),
            DirectionChoice::Forward => Direction::Forward,
            DirectionChoice::Reversed => Direction::Reversed,
        }
    }
}

impl FromStr for DirectionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(DirectionChoice::Auto),
            other => other.parse::<Direction>().map(|d| match d {
                Direction::Forward => DirectionChoice::Forward,
                Direction::Reversed => DirectionChoice::Reversed,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub samples: usize,
    pub bins: usize,
    pub direction: DirectionChoice,
    pub seed: SeedSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            samples: DEFAULT_SAMPLES,
            bins: DEFAULT_BINS,
            direction: DirectionChoice::Auto,
            seed: SeedSpec::new(DEFAULT_MASTER_SEED, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleRun {
    pub law: LimitLaw,
    pub report: DivergenceReport,
    pub simulated: Histogram,
    pub reference: Histogram,
    pub zero_numerator_count: u64,
    pub zero_denominator_count: u64,
    pub seed: SeedSpec,
    pub wall_time_ms: f64,
}

/// Simulates the standardized statistic, draws the matching Normal
/// reference and compares the two on common bins.
pub fn run_single(params: &ModelParams, regime: Regime, config: &RunConfig) -> Result<SingleRun, RunError> {
    let start = Instant::now();
    let law = limit_law(params, regime)?;
    let simulated = simulate_batch(params, regime, config.samples, config.seed)?;
    let reference = reference_normal_batch(law.variance, config.samples, config.seed);
    let direction = config.direction.resolve(regime);
    let (report, hs, hr) = compare_batches_with_histograms(&simulated, &reference, Some(direction), config.bins)?;
    Ok(SingleRun {
        law,
        report,
        simulated: hs,
        reference: hr,
        zero_numerator_count: simulated.zero_numerator_count,
        zero_denominator_count: simulated.zero_denominator_count,
        seed: config.seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    P,
    S,
    R,
    M,
    N,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::P => "p",
            Param::S => "s",
            Param::R => "r",
            Param::M => "m",
            Param::N => "n",
        })
    }
}

/// Values taken by the varied parameter: an explicit list, or `steps`
/// evenly spaced points from `lo` to `hi` inclusive (`hi < lo` is allowed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values { values: Vec<f64> },
    Range { lo: f64, hi: f64, steps: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values { values } => values.clone(),
            Grid::Range { lo, hi, steps } => match *steps {
                0 => Vec::new(),
                1 => vec![*lo],
                k => (0..k)
                    .map(|i| {
                        if i == k - 1 {
                            *hi
                        } else {
                            lo + (hi - lo) * (i as f64 / (k - 1) as f64)
                        }
                    })
                    .collect(),
            },
        }
    }
}

fn default_replicates() -> u32 {
    1
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_bins() -> usize {
    DEFAULT_BINS
}
fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

/// A one-parameter sweep around a base point.
///
/// As a TOML file:
///
/// ```toml
/// regime = "case2"        # case1 | case2 | case3 | collapse
/// # alpha = 1.0           # case2 only; defaults to m/n at every point
/// vary = "r"              # p | s | r | m | n
/// samples = 100000
/// bins = 100
/// direction = "auto"      # auto | forward | reversed
/// master_seed = 7
/// replicates_per_point = 1
///
/// [base]
/// n = 1000000
/// m = 1000000
/// p = 0.5
/// s = 15.0
/// r = 15.0
///
/// [grid]
/// lo = 1.0
/// hi = 30.0
/// steps = 30              # or: values = [1.0, 2.0, 5.0]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub regime: RegimeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub vary: Param,
    pub grid: Grid,
    #[serde(default = "default_replicates")]
    pub replicates_per_point: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub direction: DirectionChoice,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
}

/// One resolved grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub varied_value: f64,
    pub params: ModelParams,
    pub regime: Regime,
}

/// Clip range for `p` grids: the endpoints 0 and 1 are outside the model.
pub const P_CLIP: (f64, f64) = (0.01, 0.99);

fn to_count(v: f64, name: &str) -> Result<u64, RunError> {
    if (1.0..9.0e15).contains(&v) {
        Ok(v.round() as u64)
    } else {
        Err(RunError::Sweep(format!("{name} = {v} is not a positive trial count")))
    }
}

impl SweepSpec {
    /// Resolves and validates every grid point.
    pub fn points(&self) -> Result<Vec<SweepPoint>, RunError> {
        let values = self.grid.values();
        if values.is_empty() {
            return Err(RunError::Sweep("grid is empty".into()));
        }
        if self.replicates_per_point == 0 || self.samples == 0 {
            return Err(RunError::Sweep(
                "replicates_per_point and samples must be positive".into(),
            ));
        }
        if self.bins < 2 {
            return Err(DivergenceError::TooFewBins(self.bins).into());
        }
        values
            .into_iter()
            .map(|v| {
                let (varied_value, params) = match self.vary {
                    Param::P => {
                        let p = v.clamp(P_CLIP.0, P_CLIP.1);
                        (p, self.base.with_p(p)?)
                    }
                    Param::S => (v, self.base.with_s(v)?),
                    Param::R => (v, self.base.with_r(v)?),
                    Param::M => {
                        let m = to_count(v, "m")?;
                        (m as f64, self.base.with_m(m)?)
                    }
                    Param::N => {
                        let n = to_count(v, "n")?;
                        (n as f64, self.base.with_n(n)?)
                    }
                };
                let regime = self.regime.resolve(&params, self.alpha)?;
                Ok(SweepPoint {
                    varied_value,
                    params,
                    regime,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub varied_value: f64,
    pub kl: f64,
    pub direction: Direction,
    pub smoothed_bins: usize,
    pub zero_denominator_count: u64,
    /// Stream index under the sweep's master seed.
    pub seed: u64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub varied: Param,
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: &str =
    "varied_param,varied_value,kl,direction,smoothed_bins,zero_denominator_count,seed,wall_time_ms";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.varied,
                format_float(row.varied_value),
                format_float(row.kl),
                row.direction,
                row.smoothed_bins,
                row.zero_denominator_count,
                row.seed,
                format_float(row.wall_time_ms)
            )?;
        }
        Ok(())
    }

    pub fn kl_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.kl).collect()
    }
}

/// Runs every `(grid point, replicate)` pair, in parallel, returning rows in
/// grid order. Point `i`, replicate `j` uses stream
/// `i * replicates_per_point + j`, so the output is the same for any
/// number of threads. Invalid grid points fail before anything runs.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, RunError> {
    let points = spec.points()?;
    let reps = spec.replicates_per_point as usize;
    let rows = (0..points.len() * reps)
        .into_par_iter()
        .map(|task| {
            let point = &points[task / reps];
            let config = RunConfig {
                samples: spec.samples,
                bins: spec.bins,
                direction: spec.direction,
                seed: SeedSpec::new(spec.master_seed, task as u64),
            };
            let run = run_single(&point.params, point.regime, &config)?;
            Ok(SweepRow {
                varied_value: point.varied_value,
                kl: run.report.kl,
                direction: run.report.direction,
                smoothed_bins: run.report.smoothed_bins,
                zero_denominator_count: run.zero_denominator_count,
                seed: task as u64,
                wall_time_ms: run.wall_time_ms,
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(SweepResult {
        varied: spec.vary,
        master_seed: spec.master_seed,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    pub params: ModelParams,
    pub regime: Regime,
    /// Scaled analytic remainder bound with unit constant.
    pub bound: f64,
    pub log_bound: f64,
    pub samples: usize,
    /// Draws with `X + Y = 0`, where the remainder is undefined.
    pub skipped: usize,
    pub q50: f64,
    pub q99: f64,
    pub q100: f64,
}

/// Empirical quantiles of `|scale * Q(X, Y)|` next to the analytic bound.
pub fn run_bound_diagnostics(
    params: &ModelParams,
    regime: Regime,
    samples: usize,
    seed: SeedSpec,
) -> Result<BoundDiagnostics, RunError> {
    regime.validate()?;
    if samples == 0 {
        return Err(RunError::Sweep("samples must be positive".into()));
    }
    let x_dist = Binomial::new(params.n(), params.p()).expect("validated parameters");
    let y_dist = Binomial::new(params.m(), params.p()).expect("validated parameters");
    let (mut xr, mut yr) = (seed.rng(Lane::X), seed.rng(Lane::Y));
    let mut values = Vec::with_capacity(samples);
    let mut skipped = 0;
    for _ in 0..samples {
        let x = x_dist.sample(&mut xr) as f64;
        let y = y_dist.sample(&mut yr) as f64;
        match scaled_remainder(params, regime, x, y) {
            Ok(q) => values.push(q.abs()),
            Err(_) => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(RunError::Sweep("every draw had X + Y = 0".into()));
    }
    values.sort_by(f64::total_cmp);
    let log_bound = log_scaled_remainder_bound(params, regime);
    Ok(BoundDiagnostics {
        params: *params,
        regime,
        bound: log_bound.exp(),
        log_bound,
        samples,
        skipped,
        q50: quantile_sorted(&values, 0.5),
        q99: quantile_sorted(&values, 0.99),
        q100: quantile_sorted(&values, 1.0),
    })
}
