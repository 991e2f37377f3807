//! First- and second-order structure of `f(x, y) = x^s / (x + y)^r`, the
//! Gerschgorin bound on its Hessian, and Taylor-remainder diagnostics.

use crate::model::{self, Exponents, ModelParams, Regime};
use crate::numeric::{expm1_minus_x, ln1p_minus_x};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalculusError {
    #[error("point ({x}, {y}) is outside the domain x > 0, y >= 0")]
    Domain { x: f64, y: f64 },
    #[error("f overflows at ({x}, {y}); use the log form")]
    Overflow { x: f64, y: f64 },
}

/// Evaluation point with `x > 0` and `y >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    x: f64,
    y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Result<Self, CalculusError> {
        if x > 0.0 && y >= 0.0 && x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(CalculusError::Domain { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    fn ln_x(&self) -> f64 {
        self.x.ln()
    }

    fn ln_sum(&self) -> f64 {
        (self.x + self.y).ln()
    }
}

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hessian2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Hessian2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Hessian2 { xx, xy, yy }
    }

    /// Closed-form eigenvalues, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = 0.5 * (self.xx + self.yy);
        let radius = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mid + radius, mid - radius)
    }

    /// Exact spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        let (hi, lo) = self.eigenvalues();
        hi.abs().max(lo.abs())
    }

    /// `v^T H v`.
    pub fn quadratic_form(&self, u: f64, v: f64) -> f64 {
        self.xx * u * u + 2.0 * self.xy * u * v + self.yy * v * v
    }
}

pub fn eval_log_f(pt: Point2, e: Exponents) -> f64 {
    e.s * pt.ln_x() - e.r * pt.ln_sum()
}

pub fn eval_f(pt: Point2, e: Exponents) -> Result<f64, CalculusError> {
    let v = eval_log_f(pt, e).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CalculusError::Overflow { x: pt.x, y: pt.y })
    }
}

/// `(df/dx, df/dy)`.
pub fn gradient(pt: Point2, e: Exponents) -> (f64, f64) {
    let (x, sum) = (pt.x, pt.x + pt.y);
    // x^(s-1) (x+y)^(-r-1)
    let pref = ((e.s - 1.0) * pt.ln_x() - (e.r + 1.0) * pt.ln_sum()).exp();
    let dx = pref * (e.s * sum - e.r * x);
    let dy = -e.r * pref * x;
    (dx, dy)
}

/// Hessian via the factored form `x^(s-2) / (x+y)^(r+2) * [...]`.
pub fn hessian(pt: Point2, e: Exponents) -> Hessian2 {
    let (x, sum) = (pt.x, pt.x + pt.y);
    let (s, r) = (e.s, e.r);
    let pref = ((s - 2.0) * pt.ln_x() - (r + 2.0) * pt.ln_sum()).exp();
    let rr1x2 = r * (r + 1.0) * x * x;
    let rsx = r * s * x * sum;
    Hessian2 {
        xx: pref * (s * (s - 1.0) * sum * sum - 2.0 * rsx + rr1x2),
        xy: pref * (rr1x2 - rsx),
        yy: pref * rr1x2,
    }
}

/// Sum of absolute entries, `|h_xx| + 2|h_xy| + |h_yy|`. Dominates the largest
/// Gerschgorin row sum and therefore the spectral norm.
pub fn gerschgorin_norm_bound(h: &Hessian2) -> f64 {
    h.xx.abs() + 2.0 * h.xy.abs() + h.yy.abs()
}

/// `Q / f(np, mp)` as a function of the relative displacements
/// `u = (x - np)/np` and `w = (x + y - (n+m)p)/((n+m)p)`.
///
/// The linear term of `f/f0 - 1` is `s u - r w`; the remainder is split as
/// `[s (ln(1+u) - u) - r (ln(1+w) - w)] + [exp(d) - 1 - d]` so that both
/// brackets are computed without cancelling the first-order parts.
pub(crate) fn relative_remainder(u: f64, w: f64, e: Exponents) -> f64 {
    let linear = e.s * u - e.r * w;
    if u <= -1.0 {
        // x = 0, f vanishes
        return -1.0 - linear;
    }
    let log_part = e.s * ln1p_minus_x(u) - e.r * ln1p_minus_x(w);
    let delta = log_part + linear;
    log_part + expm1_minus_x(delta)
}

fn displacements(params: &ModelParams, x_obs: f64, y_obs: f64) -> (f64, f64) {
    let (np, mp) = params.mean_point();
    let total = np + mp;
    ((x_obs - np) / np, (x_obs + y_obs - total) / total)
}

/// Exact second-order Taylor residual
/// `f(x, y) - f(np, mp) - grad f(np, mp) . (x - np, y - mp)`.
///
/// Requires `x_obs, y_obs >= 0` and `x_obs + y_obs > 0`.
pub fn remainder(params: &ModelParams, x_obs: f64, y_obs: f64) -> Result<f64, CalculusError> {
    if !(x_obs >= 0.0 && y_obs >= 0.0 && x_obs + y_obs > 0.0) {
        return Err(CalculusError::Domain { x: x_obs, y: y_obs });
    }
    let (u, w) = displacements(params, x_obs, y_obs);
    let rel = relative_remainder(u, w, params.exponents());
    Ok(model::log_center(params).exp() * rel)
}

/// `scale * Q` under the regime's scaling, evaluated as
/// `exp(log_scale + log f0) * Q/f0` so it stays finite at large sizes.
pub fn scaled_remainder(params: &ModelParams, regime: Regime, x_obs: f64, y_obs: f64) -> Result<f64, CalculusError> {
    if !(x_obs >= 0.0 && y_obs >= 0.0 && x_obs + y_obs > 0.0) {
        return Err(CalculusError::Domain { x: x_obs, y: y_obs });
    }
    let (u, w) = displacements(params, x_obs, y_obs);
    let rel = relative_remainder(u, w, params.exponents());
    let log_mag = model::log_scale(params, regime) + model::log_center(params);
    Ok(log_mag.exp() * rel)
}

/// Natural log of `n^(s-2) log(n+m) / (n+m)^(r-1)` times the regime's
/// scaling factor, with the unspecified constant taken as 1.
pub fn log_scaled_remainder_bound(params: &ModelParams, regime: Regime) -> f64 {
    let ln_n = (params.n() as f64).ln();
    let ln_total = ((params.n() + params.m()) as f64).ln();
    (params.s() - 2.0) * ln_n + ln_total.ln() - (params.r() - 1.0) * ln_total + model::log_scale(params, regime)
}

pub fn scaled_remainder_bound(params: &ModelParams, regime: Regime) -> f64 {
    log_scaled_remainder_bound(params, regime).exp()
}
