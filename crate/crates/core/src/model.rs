//! Parameter space, regime taxonomy and the closed-form Normal limit of
//! `R = X^s / (X + Y)^r` for independent `X ~ Bin(n, p)`, `Y ~ Bin(m, p)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter {name}: {reason}")]
    Domain { name: &'static str, reason: String },
    #[error("invalid regime: {0}")]
    Regime(String),
}

fn domain(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::Domain {
        name,
        reason: reason.into(),
    }
}

/// Exponent pair of `f(x, y) = x^s / (x + y)^r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    /// Numerator exponent.
    pub s: f64,
    /// Denominator exponent.
    pub r: f64,
}

/// The quintuple `(n, m, p, s, r)`.
///
/// Fields are private so every value in circulation satisfies
/// `n, m >= 1`, `0 < p < 1` and `r, s > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    n: u64,
    m: u64,
    p: f64,
    s: f64,
    r: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct RawParams {
    n: u64,
    m: u64,
    p: f64,
    s: f64,
    r: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        ModelParams::new(raw.n, raw.m, raw.p, raw.s, raw.r)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            n: p.n,
            m: p.m,
            p: p.p,
            s: p.s,
            r: p.r,
        }
    }
}

impl ModelParams {
    pub fn new(n: u64, m: u64, p: f64, s: f64, r: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(domain("n", "must be at least 1"));
        }
        if m == 0 {
            return Err(domain("m", "must be at least 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", format!("{p} is outside the open interval (0, 1)")));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain("s", format!("{s} is not a positive finite number")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain("r", format!("{r} is not a positive finite number")));
        }
        Ok(ModelParams { n, m, p, s, r })
    }

    /// Diagnostic constructor that also admits `r = 0`, where `f` degenerates
    /// to `x^s` (linear for `s = 1`). Only sanity checks of the Taylor
    /// remainder and the enumeration oracle use it.
    #[doc(hidden)]
    pub fn diagnostic(n: u64, m: u64, p: f64, s: f64, r: f64) -> Result<Self, ModelError> {
        if r == 0.0 {
            let mut params = ModelParams::new(n, m, p, s, 1.0)?;
            params.r = 0.0;
            Ok(params)
        } else {
            ModelParams::new(n, m, p, s, r)
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn exponents(&self) -> Exponents {
        Exponents { s: self.s, r: self.r }
    }

    /// Expansion point `(np, mp)`.
    pub fn mean_point(&self) -> (f64, f64) {
        (self.n as f64 * self.p, self.m as f64 * self.p)
    }

    /// `m / n`, the natural choice of alpha for the proportional regime.
    pub fn ratio(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn with_n(self, n: u64) -> Result<Self, ModelError> {
        Self::new(n, self.m, self.p, self.s, self.r)
    }
    pub fn with_m(self, m: u64) -> Result<Self, ModelError> {
        Self::new(self.n, m, self.p, self.s, self.r)
    }
    pub fn with_p(self, p: f64) -> Result<Self, ModelError> {
        Self::new(self.n, self.m, p, self.s, self.r)
    }
    pub fn with_s(self, s: f64) -> Result<Self, ModelError> {
        Self::new(self.n, self.m, self.p, s, self.r)
    }
    pub fn with_r(self, r: f64) -> Result<Self, ModelError> {
        Self::new(self.n, self.m, self.p, self.s, r)
    }
}

/// Joint growth pattern of `(n, m)`.
///
/// * `CaseI`: `m/n -> inf` with `m log(m) n^{-3/2} -> 0`.
/// * `CaseII`: `m/n -> alpha` in `(0, inf)`.
/// * `CaseIII`: `m/n -> 0`.
/// * `Collapse`: `m/n -> inf` but `m log(m) n^{-3/2}` does not vanish. No
///   limit law is known there; the case I law is used as the comparison.
///
/// A regime is always chosen by the caller. Finite `(n, m)` cannot decide
/// an asymptotic regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Regime {
    #[serde(rename = "case1")]
    CaseI,
    #[serde(rename = "case2")]
    CaseII {
        alpha: f64,
    },
    #[serde(rename = "case3")]
    CaseIII,
    Collapse,
}

impl Regime {
    pub fn case_ii(alpha: f64) -> Result<Self, ModelError> {
        let regime = Regime::CaseII { alpha };
        regime.validate()?;
        Ok(regime)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Regime::CaseII { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(ModelError::Regime(format!(
                "alpha must be positive and finite, got {alpha}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> RegimeKind {
        match self {
            Regime::CaseI => RegimeKind::CaseI,
            Regime::CaseII { .. } => RegimeKind::CaseII,
            Regime::CaseIII => RegimeKind::CaseIII,
            Regime::Collapse => RegimeKind::Collapse,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::CaseII { alpha } => write!(f, "case2(alpha={alpha})"),
            other => write!(f, "{}", other.kind()),
        }
    }
}

/// A regime without its parameter, as named on the command line and in
/// sweep files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeKind {
    #[serde(rename = "case1")]
    CaseI,
    #[serde(rename = "case2")]
    CaseII,
    #[serde(rename = "case3")]
    CaseIII,
    #[serde(rename = "collapse")]
    Collapse,
}

impl RegimeKind {
    /// Attaches a parameter. For `CaseII`, `alpha` defaults to `m / n` of
    /// the given parameters.
    pub fn resolve(self, params: &ModelParams, alpha: Option<f64>) -> Result<Regime, ModelError> {
        match self {
            RegimeKind::CaseI => Ok(Regime::CaseI),
            RegimeKind::CaseII => Regime::case_ii(alpha.unwrap_or_else(|| params.ratio())),
            RegimeKind::CaseIII => Ok(Regime::CaseIII),
            RegimeKind::Collapse => Ok(Regime::Collapse),
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeKind::CaseI => "case1",
            RegimeKind::CaseII => "case2",
            RegimeKind::CaseIII => "case3",
            RegimeKind::Collapse => "collapse",
        })
    }
}

impl FromStr for RegimeKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "case1" | "i" | "1" => Ok(RegimeKind::CaseI),
            "case2" | "ii" | "2" => Ok(RegimeKind::CaseII),
            "case3" | "iii" | "3" => Ok(RegimeKind::CaseIII),
            "collapse" => Ok(RegimeKind::Collapse),
            other => Err(ModelError::Regime(format!("unknown regime {other:?}"))),
        }
    }
}

/// Centering, scaling and variance of the limiting Normal.
///
/// `scale * (R - center)` converges to `N(0, variance)`. Center and scale
/// are kept as logarithms; at `n ~ 1e9` with exponents near 30 neither fits
/// in an `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub params: ModelParams,
    pub regime: Regime,
    /// `n^s / (n + m)^r * p^(s - r)`; may underflow to 0 or overflow to inf,
    /// in which case only `log_center` is meaningful.
    pub center: f64,
    pub log_center: f64,
    pub log_scale: f64,
    pub variance: f64,
}

impl LimitLaw {
    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// `ln(p^(2(s - r) - 1) (1 - p))`, the factor shared by all three variances.
fn ln_common_factor(p: f64, e: Exponents) -> f64 {
    (2.0 * (e.s - e.r) - 1.0) * p.ln() + (-p).ln_1p()
}

fn case_i_variance(p: f64, e: Exponents) -> f64 {
    (ln_common_factor(p, e) + 2.0 * e.s.ln()).exp()
}

fn case_ii_variance(p: f64, e: Exponents, alpha: f64) -> f64 {
    let lead = e.s * (1.0 + alpha) - e.r;
    let numerator = lead * lead + alpha * e.r * e.r;
    if numerator == 0.0 {
        return 0.0;
    }
    (ln_common_factor(p, e) + numerator.ln() - 2.0 * (e.r + 1.0) * alpha.ln_1p()).exp()
}

fn case_iii_variance(p: f64, e: Exponents) -> f64 {
    let diff = e.s - e.r;
    if diff == 0.0 {
        return 0.0;
    }
    (ln_common_factor(p, e) + 2.0 * diff.abs().ln()).exp()
}

/// Natural log of the regime's multiplicative scaling factor:
/// `m^r / n^(s - 1/2)` for case I (and collapse), `n^(r - s + 1/2)` otherwise.
pub fn log_scale(params: &ModelParams, regime: Regime) -> f64 {
    let ln_n = (params.n as f64).ln();
    match regime {
        Regime::CaseI | Regime::Collapse => params.r * (params.m as f64).ln() - (params.s - 0.5) * ln_n,
        Regime::CaseII { .. } | Regime::CaseIII => (params.r - params.s + 0.5) * ln_n,
    }
}

/// `ln(n^s / (n + m)^r * p^(s - r))`, which is also `ln f(np, mp)`.
pub fn log_center(params: &ModelParams) -> f64 {
    let (np, nmp) = (params.n as f64 * params.p, (params.n + params.m) as f64 * params.p);
    params.s * np.ln() - params.r * nmp.ln()
}

pub fn limit_law(params: &ModelParams, regime: Regime) -> Result<LimitLaw, ModelError> {
    regime.validate()?;
    let e = params.exponents();
    let variance = match regime {
        Regime::CaseI | Regime::Collapse => case_i_variance(params.p, e),
        Regime::CaseII { alpha } => case_ii_variance(params.p, e, alpha),
        Regime::CaseIII => case_iii_variance(params.p, e),
    };
    let log_center = log_center(params);
    Ok(LimitLaw {
        params: *params,
        regime,
        center: log_center.exp(),
        log_center,
        log_scale: log_scale(params, regime),
        variance,
    })
}

/// Case II variance at `alpha` next to the case III variance, for probing
/// continuity of the two formulas as `alpha -> 0`.
pub fn variance_limit_consistency(params: &ModelParams, alpha: f64) -> Result<(f64, f64), ModelError> {
    let regime = Regime::case_ii(alpha)?;
    let case_ii = limit_law(params, regime)?.variance;
    let case_iii = limit_law(params, Regime::CaseIII)?.variance;
    Ok((case_ii, case_iii))
}
