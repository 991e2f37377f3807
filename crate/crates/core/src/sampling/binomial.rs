//! Exact Binomial(n, p) variates in bounded expected time.
//!
//! Inversion (BINV) when `n * min(p, 1-p) < 10`, otherwise the
//! triangle/parallelogram/exponential acceptance-rejection scheme BTPE of
//! Kachitvichyanukul and Schmeiser (1988).

use rand::distr::Distribution;
use rand::Rng;

const INVERSION_THRESHOLD: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Binomial {
    n: u64,
    p: f64,
    method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Method {
    Inversion { q_pow_n: f64, ratio: f64, a: f64 },
    Btpe(Btpe),
}

/// Constants of step 0, computed once per distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Btpe {
    n: f64,
    r: f64,
    q: f64,
    npq: f64,
    mode: i64,
    f_mode: f64,
    p1: f64,
    x_m: f64,
    x_l: f64,
    x_r: f64,
    c: f64,
    lambda_l: f64,
    lambda_r: f64,
    p2: f64,
    p3: f64,
    p4: f64,
}

impl Binomial {
    /// `n >= 1` and `0 < p < 1`; returns `None` otherwise.
    pub fn new(n: u64, p: f64) -> Option<Self> {
        if n == 0 || !(p > 0.0 && p < 1.0) || n > i64::MAX as u64 / 2 {
            return None;
        }
        let r = p.min(1.0 - p);
        let q = 1.0 - r;
        let nf = n as f64;
        let method = if nf * r < INVERSION_THRESHOLD {
            let ratio = r / q;
            Method::Inversion {
                q_pow_n: (nf * (-r).ln_1p()).exp(),
                ratio,
                a: (nf + 1.0) * ratio,
            }
        } else {
            Method::Btpe(Btpe::setup(nf, r, q))
        };
        Some(Binomial { n, p, method })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn sample_reduced<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.method {
            Method::Inversion { q_pow_n, ratio, a } => loop {
                // P(k+1) = P(k) * (a/(k+1) - ratio)
                let mut u: f64 = rng.random();
                let mut pk = q_pow_n;
                let mut k = 0u64;
                while u > pk {
                    u -= pk;
                    k += 1;
                    if k > self.n {
                        break;
                    }
                    pk *= a / k as f64 - ratio;
                }
                // rounding can walk past n when u is within an ulp of 1
                if k <= self.n {
                    return k;
                }
            },
            Method::Btpe(ref b) => b.sample(rng),
        }
    }
}

impl Btpe {
    fn setup(n: f64, r: f64, q: f64) -> Self {
        let npq = n * r * q;
        let f_mode = n * r + r;
        let mode = f_mode.floor();
        let p1 = (2.195 * npq.sqrt() - 4.6 * q).floor() + 0.5;
        let x_m = mode + 0.5;
        let x_l = x_m - p1;
        let x_r = x_m + p1;
        let c = 0.134 + 20.5 / (15.3 + mode);
        let a = (f_mode - x_l) / (f_mode - x_l * r);
        let lambda_l = a * (1.0 + 0.5 * a);
        let a = (x_r - f_mode) / (x_r * q);
        let lambda_r = a * (1.0 + 0.5 * a);
        let p2 = p1 * (1.0 + 2.0 * c);
        let p3 = p2 + c / lambda_l;
        let p4 = p3 + c / lambda_r;
        Btpe {
            n,
            r,
            q,
            npq,
            mode: mode as i64,
            f_mode,
            p1,
            x_m,
            x_l,
            x_r,
            c,
            lambda_l,
            lambda_r,
            p2,
            p3,
            p4,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let n_int = self.n as i64;
        loop {
            // step 1: triangular centre, accepted outright
            let u = rng.random::<f64>() * self.p4;
            let mut v: f64 = rng.random();
            if u <= self.p1 {
                return (self.x_m - self.p1 * v + u).floor() as u64;
            }

            let y: i64;
            if u <= self.p2 {
                // step 2: parallelograms
                let x = self.x_l + (u - self.p1) / self.c;
                v = v * self.c + 1.0 - (self.mode as f64 - x + 0.5).abs() / self.p1;
                if v > 1.0 {
                    continue;
                }
                y = x.floor() as i64;
            } else if u <= self.p3 {
                // step 3: left exponential tail
                let t = (self.x_l + v.ln() / self.lambda_l).floor();
                if t < 0.0 {
                    continue;
                }
                y = t as i64;
                v *= (u - self.p2) * self.lambda_l;
            } else {
                // step 4: right exponential tail
                let t = (self.x_r - v.ln() / self.lambda_r).floor();
                if t > self.n {
                    continue;
                }
                y = t as i64;
                v *= (u - self.p3) * self.lambda_r;
            }

            let k = (y - self.mode).abs();
            if k <= 20 || k as f64 >= 0.5 * self.npq - 1.0 {
                // step 5.1: evaluate f(y)/f(M) by the recurrence
                let s = self.r / self.q;
                let a = s * (self.n + 1.0);
                let mut f = 1.0;
                if self.mode < y {
                    for i in (self.mode + 1)..=y {
                        f *= a / i as f64 - s;
                    }
                } else if self.mode > y {
                    for i in (y + 1)..=self.mode {
                        f /= a / i as f64 - s;
                    }
                }
                if v <= f {
                    return y as u64;
                }
                continue;
            }

            // step 5.2: squeeze on ln f(y)/f(M)
            let kf = k as f64;
            let rho = (kf / self.npq) * ((kf * (kf / 3.0 + 0.625) + 1.0 / 6.0) / self.npq + 0.5);
            let t = -kf * kf / (2.0 * self.npq);
            let log_v = v.ln();
            if log_v < t - rho {
                return y as u64;
            }
            if log_v > t + rho {
                continue;
            }

            // step 5.3: final comparison with Stirling-corrected ln f(y)/f(M)
            let x1 = (y + 1) as f64;
            let f1 = (self.mode + 1) as f64;
            let z = (n_int + 1 - self.mode) as f64;
            let w = (n_int - y + 1) as f64;
            let bound = self.x_m * (f1 / x1).ln()
                + (self.n - self.mode as f64 + 0.5) * (z / w).ln()
                + (y - self.mode) as f64 * (w * self.r / (x1 * self.q)).ln()
                + stirling_tail(f1)
                + stirling_tail(z)
                - stirling_tail(x1)
                - stirling_tail(w);
            if log_v <= bound {
                return y as u64;
            }
        }
    }
}

/// Truncated Stirling series `1/(12x) - 1/(360x^3) + ...` in nested form.
fn stirling_tail(x: f64) -> f64 {
    let x2 = x * x;
    (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x / 166320.0
}

impl Distribution<u64> for Binomial {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let k = self.sample_reduced(rng);
        if self.p > 0.5 {
            self.n - k
        } else {
            k
        }
    }
}

/// One exact Binomial(n, p) draw. Panics if `n == 0` or `p` is outside
/// `(0, 1)`; construct a [`Binomial`] once to draw repeatedly.
pub fn draw_binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(n, p)
        .expect("draw_binomial needs n >= 1 and 0 < p < 1")
        .sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{Lane, SeedSpec};

    fn moments(n: u64, p: f64, draws: usize, seed: u64) -> (f64, f64) {
        let dist = Binomial::new(n, p).unwrap();
        let mut rng = SeedSpec::new(seed, 0).rng(Lane::X);
        let xs: Vec<f64> = (0..draws).map(|_| dist.sample(&mut rng) as f64).collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (draws - 1) as f64;
        (mean, var)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Binomial::new(0, 0.5).is_none());
        assert!(Binomial::new(10, 0.0).is_none());
        assert!(Binomial::new(10, 1.0).is_none());
        assert!(Binomial::new(10, f64::NAN).is_none());
    }

    #[test]
    fn bernoulli_support() {
        let mut rng = SeedSpec::new(1, 0).rng(Lane::X);
        for p in [0.01, 0.5, 0.99] {
            let dist = Binomial::new(1, p).unwrap();
            for _ in 0..1000 {
                assert!(dist.sample(&mut rng) <= 1);
            }
        }
    }

    #[test]
    fn moments_across_both_methods() {
        // inversion, BTPE, and the p > 1/2 reflection of each
        for &(n, p) in &[
            (20u64, 0.2),
            (15, 0.9),
            (150, 0.1),
            (70, 0.6),
            (1000, 0.5),
            (5000, 0.013),
        ] {
            let draws = 100_000;
            let (mean, var) = moments(n, p, draws, 11);
            let mu = n as f64 * p;
            let sigma2 = mu * (1.0 - p);
            let stderr = (sigma2 / draws as f64).sqrt();
            assert!((mean - mu).abs() < 5.0 * stderr, "n={n} p={p}: mean {mean} vs {mu}");
            assert!(
                (var - sigma2).abs() < 0.05 * sigma2,
                "n={n} p={p}: var {var} vs {sigma2}"
            );
        }
    }

    #[test]
    fn large_n_moments() {
        let (n, p, draws) = (1_000_000u64, 0.5, 100_000);
        let (mean, var) = moments(n, p, draws, 5);
        let sigma2 = 250_000.0;
        assert!((mean - 500_000.0).abs() < 5.0 * (sigma2 / draws as f64).sqrt());
        assert!((var - sigma2).abs() < 0.05 * sigma2);
    }

    #[test]
    fn huge_n_stays_in_range() {
        let dist = Binomial::new(2_000_000_000, 0.5).unwrap();
        let mut rng = SeedSpec::new(2, 0).rng(Lane::Y);
        for _ in 0..10_000 {
            let k = dist.sample(&mut rng);
            assert!((k as f64 - 1e9).abs() < 10.0 * 22_360.7);
        }
    }
}
