//! Complex log-gamma and the Stirling expansion of Γ.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::{Error, Result};

/// Number of Bernoulli numbers `B_0..=B_{BERNOULLI_MAX}` generated.
const BERNOULLI_MAX: usize = 30;
/// Terms of the log-gamma asymptotic series used after the upward shift.
const LOG_GAMMA_TERMS: usize = 10;
/// Shift target: the series is applied once `|z| ≥ 10` and `Re z ≥ 1/2`.
const SHIFT_RADIUS: f64 = 10.0;

/// Bernoulli numbers `B_0, …, B_30` (with `B_1 = −1/2`), from the recurrence
/// `Σ_{k<m+1} C(m+1,k) B_k = 0` in exact rational arithmetic.
pub fn bernoulli_numbers() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        let mut b: Vec<Ratio<i128>> = Vec::with_capacity(BERNOULLI_MAX + 1);
        b.push(Ratio::from_integer(1));
        for m in 1..=BERNOULLI_MAX {
            let mut acc = Ratio::from_integer(0i128);
            let mut binom: i128 = 1;
            for (k, bk) in b.iter().enumerate() {
                acc += *bk * binom;
                binom = binom * (m as i128 + 1 - k as i128) / (k as i128 + 1);
            }
            b.push(-acc / (m as i128 + 1));
        }
        b.iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    })
}

/// Principal branch of `log Γ(s)`: the analytic continuation from the
/// positive reals with its cut along the negative real axis.
pub fn complex_log_gamma(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("log Γ at non-finite s = {s}")));
    }
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::Pole { re: s.re, im: s.im });
    }
    Ok(log_gamma_unchecked(s))
}

pub(crate) fn log_gamma_unchecked(s: Complex64) -> Complex64 {
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 0.5 || z.norm_sqr() < SHIFT_RADIUS * SHIFT_RADIUS {
        shift += z.ln();
        z += 1.0;
    }
    log_gamma_series(z) - shift
}

fn log_gamma_series(z: Complex64) -> Complex64 {
    let b = bernoulli_numbers();
    let w = z.inv();
    let w2 = w * w;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut pw = w;
    for k in 1..=LOG_GAMMA_TERMS {
        let m = 2 * k;
        tail += pw * (b[m] / (m * (m - 1)) as f64);
        pw *= w2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * TAU.ln() + tail
}

/// Coefficients `a_1, a_2, …` of `Γ(s) ~ √(2π) s^{s−1/2} e^{−s} (1 + Σ a_k s^{−k})`.
///
/// Obtained by exponentiating `Σ_j c_j s^{−j}` with
/// `c_{2i−1} = B_{2i}/(2i(2i−1))`, through `k a_k = Σ_{j=1}^k j c_j a_{k−j}`.
pub fn stirling_coefficients(k_max: usize) -> Result<Vec<f64>> {
    if k_max + 1 > BERNOULLI_MAX {
        return Err(Error::Domain(format!(
            "Stirling order {k_max} exceeds {}",
            BERNOULLI_MAX - 1
        )));
    }
    let b = bernoulli_numbers();
    let c = |j: usize| -> f64 {
        if j % 2 == 0 {
            0.0
        } else {
            let m = j + 1;
            b[m] / (m * (m - 1)) as f64
        }
    };
    let mut a = vec![1.0];
    for k in 1..=k_max {
        let s: f64 = (1..=k).map(|j| j as f64 * c(j) * a[k - j]).sum();
        a.push(s / k as f64);
    }
    a.remove(0);
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StirlingExpansion {
    pub order: usize,
    pub coefficients: Vec<f64>,
}

/// Smallest `|π − |arg s||` accepted by the Stirling evaluators.
pub const STIRLING_SECTOR_MARGIN: f64 = 0.1;
/// Smallest `|s|` accepted by the Stirling evaluators.
pub const STIRLING_MIN_MODULUS: f64 = 5.0;

impl StirlingExpansion {
    pub fn new(order: usize) -> Result<Self> {
        Ok(StirlingExpansion {
            order,
            coefficients: stirling_coefficients(order)?,
        })
    }

    fn check(&self, s: Complex64) -> Result<()> {
        if s.norm() < STIRLING_MIN_MODULUS || s.arg().abs() > PI - STIRLING_SECTOR_MARGIN {
            return Err(Error::Domain(format!(
                "Stirling needs |s| ≥ {STIRLING_MIN_MODULUS} and |arg s| ≤ π − {STIRLING_SECTOR_MARGIN}, got s = {s}"
            )));
        }
        Ok(())
    }

    /// Logarithm of the truncated expansion.
    pub fn log_eval(&self, s: Complex64) -> Result<Complex64> {
        self.check(s)?;
        let w = s.inv();
        let mut corr = Complex64::new(1.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for a in &self.coefficients {
            pw *= w;
            corr += pw * a;
        }
        Ok(0.5 * TAU.ln() + (s - 0.5) * s.ln() - s + corr.ln())
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.log_eval(s)?.exp())
    }
}

/// `√(2π) exp((s−1/2) log s − s)(1 + Σ_{k≤K} a_k s^{−k})`.
pub fn stirling_eval(s: Complex64, order: usize) -> Result<Complex64> {
    StirlingExpansion::new(order)?.eval(s)
}

/// `1/Γ(x)` for real `x`, zero at the poles of Γ.
pub(crate) fn recip_gamma_real(x: f64) -> f64 {
    if x > 0.0 {
        (-log_gamma_unchecked(Complex64::new(x, 0.0)).re).exp()
    } else if x == x.round() {
        0.0
    } else {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let g1 = log_gamma_unchecked(Complex64::new(1.0 - x, 0.0)).re.exp();
        sin_pi(x) * g1 / PI
    }
}

fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    (PI * r).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers();
        assert_eq!(b[1], -0.5);
        assert_eq!(b[2], 1.0 / 6.0);
        assert_eq!(b[3], 0.0);
        assert_eq!(b[12], -691.0 / 2730.0);
        assert_eq!(b[20], -174611.0 / 330.0);
    }

    #[test]
    fn small_arguments() {
        assert!((complex_log_gamma(c(5.0, 0.0)).unwrap() - c(24f64.ln(), 0.0)).norm() < 1e-14);
        assert!(
            (complex_log_gamma(c(0.5, 0.0)).unwrap() - c(0.5 * PI.ln(), 0.0)).norm() < 1e-14
        );
        assert!(complex_log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(complex_log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn factorial_oracle() {
        // log((n−1)!) by exact summation of logs.
        for n in [3usize, 10, 57, 171, 900] {
            let exact: f64 = (1..n).map(|k| (k as f64).ln()).sum();
            let got = complex_log_gamma(c(n as f64, 0.0)).unwrap();
            assert!((got.re - exact).abs() <= 1e-13 * exact.abs().max(1.0), "n = {n}");
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn reflection_on_critical_line() {
        for t in [0.3, 3.0, 17.0, 150.0] {
            let lg = complex_log_gamma(c(0.5, t)).unwrap();
            let expected = 0.5 * (PI / (PI * t).cosh()).ln();
            assert!((lg.re - expected).abs() <= 1e-12 * expected.abs().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn recurrence_and_conjugation() {
        for s in [c(-3.7, 0.2), c(0.01, -40.0), c(12.0, 300.0), c(-250.5, 3.0), c(700.0, -700.0)] {
            let a = complex_log_gamma(s + 1.0).unwrap();
            let b = complex_log_gamma(s).unwrap() + s.ln();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "s = {s}");
            let conj = complex_log_gamma(s.conj()).unwrap();
            assert!((conj - complex_log_gamma(s).unwrap().conj()).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn branch_is_continuous_across_the_upper_half_plane() {
        let mut prev = complex_log_gamma(c(3.0, 1.0)).unwrap();
        for i in 1..=400 {
            let s = c(3.0 - i as f64 * 0.02, 1.0);
            let cur = complex_log_gamma(s).unwrap();
            assert!((cur - prev).norm() < 0.2, "jump at {s}");
            prev = cur;
        }
    }

    #[test]
    fn poles_are_rejected() {
        for re in [0.0, -1.0, -7.0] {
            assert!(matches!(complex_log_gamma(c(re, 0.0)), Err(Error::Pole { .. })));
        }
        assert!(complex_log_gamma(c(-7.0, 1e-9)).is_ok());
    }

    #[test]
    fn stirling_coefficients_match_known_fractions() {
        let a = stirling_coefficients(4).unwrap();
        assert!((a[0] - 1.0 / 12.0).abs() < 1e-17);
        assert!((a[1] - 1.0 / 288.0).abs() < 1e-17);
        assert!((a[2] + 139.0 / 51840.0).abs() < 1e-17);
        assert!((a[3] + 571.0 / 2488320.0).abs() < 1e-18);
    }

    #[test]
    fn stirling_at_one_hundred() {
        let g = stirling_eval(c(100.0, 0.0), 3).unwrap();
        let exact: f64 = (1..100).map(|k| (k as f64).ln()).sum();
        assert!((g.re.ln() - exact).abs() < 1e-10);
    }

    #[test]
    fn stirling_strip_estimate() {
        let s = c(0.5, 30.0);
        let g = stirling_eval(s, 3).unwrap().norm();
        let strip = TAU.sqrt() * (-15.0 * PI).exp();
        assert!((g / strip - 1.0).abs() < 1.0 / 30.0);
    }

    fn stirling_error(s: Complex64, k: usize) -> f64 {
        let st = StirlingExpansion::new(k).unwrap().log_eval(s).unwrap();
        (st - complex_log_gamma(s).unwrap()).exp().sub(1.0).norm()
    }

    use std::ops::Sub;

    #[test]
    fn stirling_error_decays_at_the_stated_power() {
        for k in 0..=3usize {
            let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
                .iter()
                .map(|&r| {
                    let s = Complex64::from_polar(r, 0.7);
                    (r.ln(), stirling_error(s, k).ln())
                })
                .collect();
            let slope = crate::analytic::fit_slope(&pts);
            assert!((slope + (k as f64 + 1.0)).abs() <= 0.3, "K = {k}: slope {slope}");
        }
        // The leading errors are a_1/s and a_4/s^4, so the ratio is
        // |s|^{−3} times |a_4/a_1|.
        let a = stirling_coefficients(4).unwrap();
        let ratio = stirling_error(c(50.0, 0.0), 3) / stirling_error(c(50.0, 0.0), 0);
        let scaled = ratio * 50f64.powi(3) / (a[3] / a[0]).abs();
        assert!(scaled > 0.5 && scaled < 2.0, "{scaled}");
    }

    #[test]
    fn stirling_domain() {
        assert!(stirling_eval(c(4.0, 0.0), 2).is_err());
        assert!(stirling_eval(c(-10.0, 0.5), 2).is_err());
        assert!(stirling_eval(c(-10.0, 2.0), 2).is_ok());
    }

    #[test]
    fn reciprocal_gamma() {
        assert!((recip_gamma_real(0.5) - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((recip_gamma_real(-0.5) + 0.5 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(recip_gamma_real(-3.0), 0.0);
        assert!((recip_gamma_real(-2.5) + 15.0 / (8.0 * PI.sqrt())).abs() < 1e-14);
    }
}
