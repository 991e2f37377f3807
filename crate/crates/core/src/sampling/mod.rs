//! Monte Carlo draws of the standardized statistic and of the matching
//! Normal reference.

mod binomial;
mod seed;

pub use binomial::{draw_binomial, Binomial};
pub use seed::{Lane, SeedSpec};

use crate::model::{limit_law, LimitLaw, ModelError, ModelParams, Regime};
use rand::distr::Distribution;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Where a batch came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BatchSource {
    Model { params: ModelParams, regime: Regime },
    Reference { variance: f64 },
}

/// Standardized draws plus degenerate-draw diagnostics.
///
/// `zero_denominator_count <= zero_numerator_count <= count()` always holds:
/// `X + Y = 0` implies `X = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    /// Draws with `X = 0`.
    pub zero_numerator_count: u64,
    /// Draws with `X + Y = 0`, where `R` is undefined.
    pub zero_denominator_count: u64,
    pub source: BatchSource,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn regime(&self) -> Option<Regime> {
        match self.source {
            BatchSource::Model { regime, .. } => Some(regime),
            BatchSource::Reference { .. } => None,
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - mean) * (v - mean)).sum();
        ss / (self.values.len() as f64 - 1.0)
    }
}

/// `T = scale * (R - center)` for one outcome `(x, y)`.
///
/// Evaluated as `exp(log_scale + log_center) * expm1(d)` with
/// `d = s ln(x/np) - r ln((x+y)/((n+m)p))`, so nothing of size `x^s` is ever
/// formed. `x = 0` gives `R = 0` and `T = -scale * center`; the undefined
/// `x + y = 0` follows the same convention.
pub fn standardized_statistic(x: u64, y: u64, law: &LimitLaw) -> f64 {
    let magnitude = (law.log_scale + law.log_center).exp();
    if x == 0 {
        return -magnitude;
    }
    let params = &law.params;
    let (np, mp) = params.mean_point();
    let total = np + mp;
    let u = (x as f64 - np) / np;
    let w = ((x + y) as f64 - total) / total;
    let d = params.s() * u.ln_1p() - params.r() * w.ln_1p();
    magnitude * d.exp_m1()
}

pub fn simulate_batch(
    params: &ModelParams,
    regime: Regime,
    count: usize,
    seed: SeedSpec,
) -> Result<SampleBatch, ModelError> {
    let law = limit_law(params, regime)?;
    let x_dist = Binomial::new(params.n(), params.p()).expect("validated parameters");
    let y_dist = Binomial::new(params.m(), params.p()).expect("validated parameters");
    let mut x_rng = seed.rng(Lane::X);
    let mut y_rng = seed.rng(Lane::Y);

    let mut values = Vec::with_capacity(count);
    let (mut zero_num, mut zero_den) = (0u64, 0u64);
    for _ in 0..count {
        let x = x_dist.sample(&mut x_rng);
        let y = y_dist.sample(&mut y_rng);
        if x == 0 {
            zero_num += 1;
            if y == 0 {
                zero_den += 1;
            }
        }
        values.push(standardized_statistic(x, y, &law));
    }
    if zero_den > 0 {
        log::warn!(
            "{zero_den} of {count} draws had X + Y = 0 (n={}, m={}, p={}); treated as X = 0",
            params.n(),
            params.m(),
            params.p()
        );
    }
    Ok(SampleBatch {
        values,
        zero_numerator_count: zero_num,
        zero_denominator_count: zero_den,
        source: BatchSource::Model {
            params: *params,
            regime,
        },
    })
}

/// `count` iid `N(0, variance)` draws. A zero variance gives all zeros.
pub fn reference_normal_batch(variance: f64, count: usize, seed: SeedSpec) -> SampleBatch {
    assert!(
        variance >= 0.0 && variance.is_finite(),
        "variance must be finite and nonnegative"
    );
    let values = if variance == 0.0 {
        vec![0.0; count]
    } else {
        let sd = variance.sqrt();
        let mut rng = seed.rng(Lane::Reference);
        (0..count)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect()
    };
    SampleBatch {
        values,
        zero_numerator_count: 0,
        zero_denominator_count: 0,
        source: BatchSource::Reference { variance },
    }
}
