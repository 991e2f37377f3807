//! Exact distribution of `R` (or of the standardized `T`) at small `n, m`
//! by enumerating every outcome of the joint Binomial pmf.

use crate::model::{limit_law, ModelError, ModelParams, Regime};
use crate::numeric::{binomial_ln_pmf, CompensatedSum};
use crate::sampling::standardized_statistic;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `(n + 1)(m + 1)` enumerated.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;
/// Above this many outcomes the support is not materialised.
pub const SUPPORT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("enumerating {outcomes} outcomes exceeds the budget of {ENUMERATION_BUDGET}; use Monte Carlo (`simulate`) at these sizes")]
    BudgetExceeded { outcomes: u128 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// What to evaluate at each outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Statistic {
    /// `R = x^s / (x+y)^r`, with `R = 0` when `x = 0`.
    Raw,
    /// `T = scale * (R - center)` under the regime's limit law.
    Standardized(Regime),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    pub params: ModelParams,
    pub statistic: Statistic,
    /// `(value, probability)` per outcome `(x, y)` in row-major order;
    /// `None` above [`SUPPORT_LIMIT`] outcomes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<(f64, f64)>>,
    pub outcomes: u64,
    pub total_probability: f64,
    pub mean: f64,
    pub variance: f64,
}

fn raw_value(x: u64, y: u64, params: &ModelParams) -> f64 {
    if x == 0 {
        return 0.0;
    }
    (params.s() * (x as f64).ln() - params.r() * ((x + y) as f64).ln()).exp()
}

fn pmf_table(n: u64, p: f64) -> Vec<f64> {
    (0..=n).map(|k| binomial_ln_pmf(k, n, p).exp()).collect()
}

/// Enumerates all `(x, y)` in `[0, n] x [0, m]`.
///
/// Strata (one per `x`) are reduced in parallel and combined in stratum
/// order, so results do not depend on the thread count.
pub fn exact_distribution(params: &ModelParams, statistic: Statistic) -> Result<ExactDistribution, OracleError> {
    let outcomes = (params.n() as u128 + 1) * (params.m() as u128 + 1);
    if outcomes > ENUMERATION_BUDGET as u128 {
        return Err(OracleError::BudgetExceeded { outcomes });
    }
    let law = match statistic {
        Statistic::Raw => None,
        Statistic::Standardized(regime) => Some(limit_law(params, regime)?),
    };
    let px = pmf_table(params.n(), params.p());
    let py = pmf_table(params.m(), params.p());
    let value = |x: u64, y: u64| match &law {
        Some(law) => standardized_statistic(x, y, law),
        None => raw_value(x, y, params),
    };

    let strata: Vec<(CompensatedSum, CompensatedSum)> = (0..=params.n())
        .into_par_iter()
        .map(|x| {
            let (mut mass, mut first) = (CompensatedSum::new(), CompensatedSum::new());
            for y in 0..=params.m() {
                let w = px[x as usize] * py[y as usize];
                if w > 0.0 {
                    mass.add(w);
                    first.add(w * value(x, y));
                }
            }
            (mass, first)
        })
        .collect();
    let (mut total, mut first) = (CompensatedSum::new(), CompensatedSum::new());
    for (m, f) in &strata {
        total.merge(m);
        first.merge(f);
    }
    let total = total.value();
    let mean = first.value() / total;

    let second: Vec<CompensatedSum> = (0..=params.n())
        .into_par_iter()
        .map(|x| {
            let mut acc = CompensatedSum::new();
            for y in 0..=params.m() {
                let w = px[x as usize] * py[y as usize];
                if w > 0.0 {
                    let d = value(x, y) - mean;
                    acc.add(w * d * d);
                }
            }
            acc
        })
        .collect();
    let mut central = CompensatedSum::new();
    for s in &second {
        central.merge(s);
    }
    let variance = central.value() / total;

    let support = (outcomes <= SUPPORT_LIMIT as u128).then(|| {
        let mut v = Vec::with_capacity(outcomes as usize);
        for x in 0..=params.n() {
            for y in 0..=params.m() {
                v.push((value(x, y), px[x as usize] * py[y as usize]));
            }
        }
        v
    });

    Ok(ExactDistribution {
        params: *params,
        statistic,
        support,
        outcomes: outcomes as u64,
        total_probability: total,
        mean,
        variance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub scale: u64,
    pub n: u64,
    pub m: u64,
    pub exact_mean: f64,
    pub exact_variance: f64,
    pub theory_variance: f64,
    /// `|exact - theory| / theory`; `None` when the limit variance is 0.
    pub relative_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Whether the error column shrinks along the rows, allowing each step
    /// to grow by at most `slack` (relative). With a degenerate limit the
    /// exact variance itself must shrink.
    pub fn is_converging(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            match (a.relative_error, b.relative_error) {
                (Some(ea), Some(eb)) => eb <= ea * (1.0 + slack),
                _ => b.exact_variance <= a.exact_variance * (1.0 + slack),
            }
        })
    }
}

/// Exact against limiting variance at `(k n, k m)` for each factor `k`.
pub fn exact_vs_theory_convergence(
    base: &ModelParams,
    regime: Regime,
    scale_factors: &[u64],
) -> Result<ConvergenceTable, OracleError> {
    let mut rows = Vec::with_capacity(scale_factors.len());
    for &k in scale_factors {
        let params = ModelParams::new(base.n() * k, base.m() * k, base.p(), base.s(), base.r())?;
        let exact = exact_distribution(&params, Statistic::Standardized(regime))?;
        let theory = limit_law(&params, regime)?.variance;
        let relative_error = (theory > 0.0).then(|| (exact.variance - theory).abs() / theory);
        rows.push(ConvergenceRow {
            scale: k,
            n: params.n(),
            m: params.m(),
            exact_mean: exact.mean,
            exact_variance: exact.variance,
            theory_variance: theory,
            relative_error,
        });
    }
    Ok(ConvergenceTable { rows })
}
