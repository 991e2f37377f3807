//! Limit laws and Monte Carlo verification for `R = X^s / (X + Y)^r` with
//! independent `X ~ Binomial(n, p)` and `Y ~ Binomial(m, p)`.
//!
//! * [`model`]: parameters, regimes and the closed-form Normal limit.
//! * [`calculus`]: gradient, Hessian, Gerschgorin bound and Taylor remainder.
//! * [`sampling`]: exact Binomial variates and standardized batches.
//! * [`divergence`]: common binning and discrete KL divergence.
//! * [`oracle`]: exact small-size distributions by enumeration.
//! * [`runner`]: single runs, parameter sweeps and remainder diagnostics.
//!
//! ```
//! use binomratio_core::{limit_law, run_single, ModelParams, Regime, RunConfig, SeedSpec};
//!
//! let params = ModelParams::new(1_000_000, 1_000_000, 0.5, 15.0, 15.0)?;
//! let regime = Regime::case_ii(1.0)?;
//! let law = limit_law(&params, regime)?;
//! assert!(law.variance > 0.0);
//!
//! let config = RunConfig { samples: 10_000, seed: SeedSpec::new(7, 0), ..Default::default() };
//! let run = run_single(&params, regime, &config)?;
//! assert!(run.report.kl < 0.05);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod calculus;
pub mod divergence;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod runner;
pub mod sampling;

pub use calculus::{CalculusError, Hessian2, Point2};
pub use divergence::{Direction, DivergenceError, DivergenceReport, Histogram};
pub use model::{limit_law, Exponents, LimitLaw, ModelError, ModelParams, Regime, RegimeKind};
pub use oracle::{ExactDistribution, OracleError, Statistic};
pub use runner::{run_single, run_sweep, RunConfig, RunError, SweepResult, SweepSpec};
pub use sampling::{SampleBatch, SeedSpec};
