//! Common equal-width binning of two batches and the discrete
//! Kullback-Leibler divergence between the binned distributions.

use crate::model::Regime;
use crate::numeric::CompensatedSum;
use crate::sampling::SampleBatch;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_BINS: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DivergenceError {
    #[error("cannot bin an empty batch")]
    EmptyBatch,
    #[error("need at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("histograms were built on different bin edges")]
    MismatchedEdges,
    #[error("batch contains non-finite values")]
    NonFinite,
}

/// Which side of the comparison sits in the numerator of the log ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `D(A || B)`: simulated against reference.
    Forward,
    /// `D(B || A)`: reference against simulated.
    Reversed,
}

impl Direction {
    /// Reversed for the collapse regime, where the simulated sample can
    /// pile into a single bin; forward otherwise.
    pub fn default_for(regime: Option<Regime>) -> Direction {
        match regime {
            Some(Regime::Collapse) => Direction::Reversed,
            _ => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reversed => "reversed",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "reversed" | "reverse" => Ok(Direction::Reversed),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

/// `bins + 1` strictly increasing, equally spaced edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinEdges(Vec<f64>);

impl BinEdges {
    /// Equal-width edges over `[lo, hi]`; a degenerate range is widened to
    /// `[lo - 1/2, lo + 1/2]`.
    pub fn equal_width(lo: f64, hi: f64, bins: usize) -> Result<Self, DivergenceError> {
        if bins < 2 {
            return Err(DivergenceError::TooFewBins(bins));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(DivergenceError::NonFinite);
        }
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = hi - lo;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * (i as f64 / bins as f64)).collect();
        edges.push(hi);
        Ok(BinEdges(edges))
    }

    pub fn bins(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn lo(&self) -> f64 {
        self.0[0]
    }

    pub fn hi(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Bin holding `v`, `None` outside `[lo, hi]`. The top edge belongs to
    /// the last bin.
    ///
    /// The index is `floor((v - lo) / (hi - lo) * bins)`: scaling by a power
    /// of two commutes with rounding, so halving the bin width splits every
    /// bin exactly in two.
    pub fn bin_index(&self, v: f64) -> Option<usize> {
        let (lo, hi) = (self.lo(), self.hi());
        if !(v >= lo && v <= hi) {
            return None;
        }
        let bins = self.bins();
        let idx = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
        Some(idx.min(bins - 1))
    }
}

/// Equal-width bins spanning the pooled range of both batches.
pub fn common_bins(a: &SampleBatch, b: &SampleBatch, bin_count: usize) -> Result<BinEdges, DivergenceError> {
    if a.values.is_empty() || b.values.is_empty() {
        return Err(DivergenceError::EmptyBatch);
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in a.values.iter().chain(&b.values) {
        if !v.is_finite() {
            return Err(DivergenceError::NonFinite);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    BinEdges::equal_width(lo, hi, bin_count)
}

/// Empirical bin proportions of one sample on shared edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: BinEdges,
    /// Proportion of in-range values per bin.
    pub mass: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values that fell outside the edges; zero when the edges came from
    /// [`common_bins`] over the same batch.
    pub undercount: u64,
    pub overcount: u64,
    /// Size of the sample, used for the pseudo-mass of empty bins.
    pub sample_size: usize,
}

impl Histogram {
    pub fn build(values: &[f64], edges: &BinEdges) -> Self {
        let mut counts = vec![0u64; edges.bins()];
        let (mut under, mut over) = (0u64, 0u64);
        for &v in values {
            match edges.bin_index(v) {
                Some(i) => counts[i] += 1,
                None if v < edges.lo() => under += 1,
                None => over += 1,
            }
        }
        let inside: u64 = counts.iter().sum();
        let mass = counts
            .iter()
            .map(|&c| if inside == 0 { 0.0 } else { c as f64 / inside as f64 })
            .collect();
        Histogram {
            edges: edges.clone(),
            mass,
            counts,
            undercount: under,
            overcount: over,
            sample_size: values.len(),
        }
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub kl: f64,
    pub direction: Direction,
    /// Bins where the numerator side had mass but the denominator side had
    /// none, so a pseudo-mass was substituted.
    pub smoothed_bins: usize,
    pub bin_count: usize,
}

/// Discrete KL divergence in the given direction.
///
/// Bins with zero numerator mass contribute nothing. Where the numerator has
/// mass and the denominator has none, the denominator mass becomes
/// `1/(2N)` (`N` its sample size) and the denominator distribution is
/// renormalised, which keeps the result a true divergence and hence
/// nonnegative.
pub fn kl_divergence(
    a_hist: &Histogram,
    b_hist: &Histogram,
    direction: Direction,
) -> Result<DivergenceReport, DivergenceError> {
    if a_hist.edges != b_hist.edges {
        return Err(DivergenceError::MismatchedEdges);
    }
    let (num, den) = match direction {
        Direction::Forward => (a_hist, b_hist),
        Direction::Reversed => (b_hist, a_hist),
    };
    let pseudo = 1.0 / (2.0 * den.sample_size.max(1) as f64);
    let mut smoothed = 0usize;
    let den_mass: Vec<f64> = num
        .mass
        .iter()
        .zip(&den.mass)
        .map(|(&pn, &qd)| {
            if pn > 0.0 && qd == 0.0 {
                smoothed += 1;
                pseudo
            } else {
                qd
            }
        })
        .collect();
    let ln_norm = if smoothed > 0 {
        den_mass.iter().copied().collect::<CompensatedSum>().value().ln()
    } else {
        0.0
    };

    let mut kl = CompensatedSum::new();
    for (&pn, &qd) in num.mass.iter().zip(&den_mass) {
        if pn > 0.0 {
            kl.add(pn * (pn.ln() - qd.ln() + ln_norm));
        }
    }
    Ok(DivergenceReport {
        kl: kl.value(),
        direction,
        smoothed_bins: smoothed,
        bin_count: num.bins(),
    })
}

/// Bins both batches on their pooled range and compares them. `direction`
/// defaults from the simulated batch's regime.
pub fn compare_batches(
    a: &SampleBatch,
    b: &SampleBatch,
    direction: Option<Direction>,
    bin_count: usize,
) -> Result<DivergenceReport, DivergenceError> {
    compare_batches_with_histograms(a, b, direction, bin_count).map(|(report, _, _)| report)
}

/// As [`compare_batches`], also returning the two histograms.
pub fn compare_batches_with_histograms(
    a: &SampleBatch,
    b: &SampleBatch,
    direction: Option<Direction>,
    bin_count: usize,
) -> Result<(DivergenceReport, Histogram, Histogram), DivergenceError> {
    let edges = common_bins(a, b, bin_count)?;
    let ha = Histogram::build(&a.values, &edges);
    let hb = Histogram::build(&b.values, &edges);
    let direction = direction.unwrap_or_else(|| Direction::default_for(a.regime()));
    let report = kl_divergence(&ha, &hb, direction)?;
    Ok((report, ha, hb))
}
