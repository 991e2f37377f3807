//! Small numerically careful building blocks shared by the other modules.

use std::f64::consts::PI;

/// `ln(1 + z) - z`, accurate for small `|z|` where the direct difference
/// cancels. Requires `z > -1`.
pub fn ln1p_minus_x(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // -z^2/2 + z^3/3 - z^4/4 + ...
        let mut term = -z * z;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let next = sum + term / k;
            if next == sum {
                return sum;
            }
            sum = next;
            term *= -z;
            k += 1.0;
        }
    } else {
        z.ln_1p() - z
    }
}

/// `exp(d) - 1 - d`, accurate for small `|d|`.
pub fn expm1_minus_x(d: f64) -> f64 {
    if d.abs() < 0.1 {
        // d^2/2! + d^3/3! + ...
        let mut term = d * d / 2.0;
        let mut sum = 0.0;
        let mut k = 3.0;
        loop {
            let next = sum + term;
            if next == sum {
                return sum;
            }
            sum = next;
            term *= d / k;
            k += 1.0;
        }
    } else {
        d.exp_m1() - d
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one, keeping both compensations.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Error of Stirling's series at an integer: `ln k! - [(k + 1/2) ln k - k + ln sqrt(2 pi)]`.
fn stirling_error(k: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if k <= 15 {
        // k! is exact in f64 up to 22!, so the subtraction below only loses
        // what the logarithms round away.
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let kf = k as f64;
        return fact.ln() - (kf + 0.5) * kf.ln() + kf - LN_SQRT_2PI;
    }
    let kf = k as f64;
    let kk = kf * kf;
    if k > 500 {
        (S0 - S1 / kk) / kf
    } else if k > 80 {
        (S0 - (S1 - S2 / kk) / kk) / kf
    } else if k > 35 {
        (S0 - (S1 - (S2 - S3 / kk) / kk) / kk) / kf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / kk) / kk) / kk) / kk) / kf
    }
}

/// Deviance term `x ln(x / np) + np - x`, evaluated without cancellation
/// when `x` is close to `np`.
fn deviance(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let next = s + ej / (2.0 * j + 1.0);
            if next == s {
                return next;
            }
            s = next;
            j += 1.0;
        }
    } else {
        x * (x / np).ln() + np - x
    }
}

/// Natural log of the Binomial(n, p) probability mass at `k`.
///
/// Uses the saddle-point form (Stirling error plus deviance terms) so the
/// result keeps full relative accuracy for large `n`, where subtracting
/// log-gamma values would lose digits.
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if k > n {
        return f64::NEG_INFINITY;
    }
    let q = 1.0 - p;
    if k == 0 {
        return n as f64 * (-p).ln_1p();
    }
    if k == n {
        return n as f64 * p.ln();
    }
    let nf = n as f64;
    let kf = k as f64;
    let rest = nf - kf;
    let lc =
        stirling_error(n) - stirling_error(k) - stirling_error(n - k) - deviance(kf, nf * p) - deviance(rest, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Quantile by linear interpolation between order statistics. `sorted` must
/// be ascending and nonempty; `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_helpers_match_direct_forms_away_from_zero() {
        for &z in &[0.09_f64, -0.09, 0.05, 1e-3, -1e-3] {
            let direct = z.ln_1p() - z;
            assert!((ln1p_minus_x(z) - direct).abs() <= 1e-12 * direct.abs());
            let direct = z.exp_m1() - z;
            assert!((expm1_minus_x(z) - direct).abs() <= 1e-12 * direct.abs());
        }
        assert_eq!(ln1p_minus_x(0.0), 0.0);
        assert_eq!(expm1_minus_x(0.0), 0.0);
        // leading terms dominate for tiny arguments
        let z = 1e-9;
        assert!((ln1p_minus_x(z) + z * z / 2.0).abs() < 1e-8 * z * z);
        assert!((expm1_minus_x(z) - z * z / 2.0).abs() < 1e-8 * z * z);
    }

    #[test]
    fn compensated_sum_recovers_lost_low_bits() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn binomial_pmf_matches_small_exact_values() {
        // C(10,3) 0.3^3 0.7^7
        let exact = 120.0 * 0.3f64.powi(3) * 0.7f64.powi(7);
        let got = binomial_ln_pmf(3, 10, 0.3).exp();
        assert!((got - exact).abs() < 1e-13 * exact);
        assert!((binomial_ln_pmf(0, 10, 0.3).exp() - 0.7f64.powi(10)).abs() < 1e-16);
        assert!((binomial_ln_pmf(10, 10, 0.3).exp() - 0.3f64.powi(10)).abs() < 1e-20);
        assert_eq!(binomial_ln_pmf(11, 10, 0.3), f64::NEG_INFINITY);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        for &(n, p) in &[(1u64, 0.5), (37, 0.2), (1000, 0.5), (5000, 0.013)] {
            let total: CompensatedSum = (0..=n).map(|k| binomial_ln_pmf(k, n, p).exp()).collect();
            assert!((total.value() - 1.0).abs() < 1e-13, "n={n} p={p}: {}", total.value());
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert_eq!(quantile_sorted(&v, 1.0), 5.0);
        assert!((quantile_sorted(&v, 0.99) - 4.96).abs() < 1e-12);
    }
}
