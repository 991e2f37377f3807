#![allow(dead_code)]

use binomratio_core::calculus::{eval_f, gradient, Hessian2, Point2};
use binomratio_core::model::{Exponents, LimitLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random evaluation points with `x, y` in [1, 1000] and `r, s` in [0.5, 30].
pub fn random_points(seed: u64, count: usize) -> Vec<(Point2, Exponents)> {
    let mut g = rng(seed);
    (0..count)
        .map(|_| {
            let pt = Point2::new(g.random_range(1.0..1000.0), g.random_range(1.0..1000.0)).unwrap();
            let e = Exponents {
                s: g.random_range(0.5..30.0),
                r: g.random_range(0.5..30.0),
            };
            (pt, e)
        })
        .collect()
}

fn step(coord: f64) -> f64 {
    (1e-6 * coord.abs()).max(1e-6)
}

pub fn fd_gradient(pt: Point2, e: Exponents) -> (f64, f64) {
    let f = |x: f64, y: f64| eval_f(Point2::new(x, y).unwrap(), e).unwrap();
    let (hx, hy) = (step(pt.x()), step(pt.y()));
    (
        (f(pt.x() + hx, pt.y()) - f(pt.x() - hx, pt.y())) / (2.0 * hx),
        (f(pt.x(), pt.y() + hy) - f(pt.x(), pt.y() - hy)) / (2.0 * hy),
    )
}

/// Central differences of the analytic gradient.
pub fn fd_hessian(pt: Point2, e: Exponents) -> Hessian2 {
    let g = |x: f64, y: f64| gradient(Point2::new(x, y).unwrap(), e);
    let (hx, hy) = (step(pt.x()), step(pt.y()));
    let (gxp, gxm) = (g(pt.x() + hx, pt.y()), g(pt.x() - hx, pt.y()));
    let (gyp, gym) = (g(pt.x(), pt.y() + hy), g(pt.x(), pt.y() - hy));
    let xx = (gxp.0 - gxm.0) / (2.0 * hx);
    let yy = (gyp.1 - gym.1) / (2.0 * hy);
    // symmetrised cross term
    let xy = 0.5 * ((gxp.1 - gxm.1) / (2.0 * hx) + (gyp.0 - gym.0) / (2.0 * hy));
    Hessian2 { xx, xy, yy }
}

/// `max |lambda|` from the closed-form eigenvalues of a symmetric 2x2 matrix.
pub fn exact_spectral_norm(h: &Hessian2) -> f64 {
    let mid = 0.5 * (h.xx + h.yy);
    let rad = (0.25 * (h.xx - h.yy).powi(2) + h.xy * h.xy).sqrt();
    (mid + rad).abs().max((mid - rad).abs())
}

pub fn gradient_error(pt: Point2, e: Exponents) -> f64 {
    let (a, b) = (gradient(pt, e), fd_gradient(pt, e));
    let norm = a.0.abs().max(a.1.abs());
    (a.0 - b.0).abs().max((a.1 - b.1).abs()) / norm
}

pub fn hessian_error(pt: Point2, e: Exponents) -> f64 {
    let a = binomratio_core::calculus::hessian(pt, e);
    let b = fd_hessian(pt, e);
    let norm = a.xx.abs().max(a.xy.abs()).max(a.yy.abs());
    (a.xx - b.xx).abs().max((a.xy - b.xy).abs()).max((a.yy - b.yy).abs()) / norm
}

/// Exact Binomial CDF by the pmf recurrence.
pub fn binomial_cdf(n: u64, p: f64) -> Vec<f64> {
    let mut pmf = (1.0 - p).powi(n as i32);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        acc += pmf;
        out.push(acc);
        pmf *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
    }
    out
}

/// Two-sided Kolmogorov-Smirnov distance between integer draws and an
/// exact CDF, checked on both sides of every jump.
pub fn ks_statistic(draws: &[u64], cdf: &[f64]) -> f64 {
    let mut counts = vec![0u64; cdf.len()];
    for &d in draws {
        counts[d as usize] += 1;
    }
    let total = draws.len() as f64;
    let (mut below, mut worst) = (0.0, 0.0f64);
    for k in 0..cdf.len() {
        let prev = if k == 0 { 0.0 } else { cdf[k - 1] };
        worst = worst.max((below / total - prev).abs());
        below += counts[k] as f64;
        worst = worst.max((below / total - cdf[k]).abs());
    }
    worst
}

/// Asymptotic two-sided KS critical value at significance 0.001.
pub fn ks_critical_001(samples: usize) -> f64 {
    1.9495 / (samples as f64).sqrt()
}

/// `scale * (x^s / (x+y)^r - center)` by plain powers, with the relative
/// error measured against the size of the terms being subtracted.
pub fn direct_statistic(x: u64, y: u64, law: &LimitLaw) -> (f64, f64) {
    let (s, r) = (law.params.s(), law.params.r());
    let raw = if x == 0 {
        0.0
    } else {
        (x as f64).powf(s) / ((x + y) as f64).powf(r)
    };
    let scale = law.log_scale.exp();
    let center = law.log_center.exp();
    let value = scale * (raw - center);
    let magnitude = scale * raw.max(center);
    (value, magnitude)
}

/// Whether plain evaluation of `x^s` or `(x+y)^r` leaves the f64 range.
pub fn direct_overflows(x: u64, y: u64, law: &LimitLaw) -> bool {
    let (s, r) = (law.params.s(), law.params.r());
    !(x as f64).powf(s).is_finite() || !((x + y) as f64).powf(r).is_finite()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
