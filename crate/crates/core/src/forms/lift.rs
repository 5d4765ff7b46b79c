use super::tau::Gl2EigenSeries;
use crate::{CompensatedSum, Error, Result};
use num_complex::Complex64;

/// Normalised coefficients `A(m,1,…,1)` of a GL(n) form for `m ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub n_rank: u32,
    pub self_dual: bool,
    // coeffs[0] is an unused zero so that coeffs[m] = A(m,1,…,1).
    coeffs: Vec<f64>,
}

impl CoefficientTable {
    /// Build from `A(1), …, A(n_max)`.
    pub fn from_values(n_rank: u32, values: &[f64], self_dual: bool) -> Self {
        let mut coeffs = Vec::with_capacity(values.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(values);
        CoefficientTable {
            n_rank,
            self_dual,
            coeffs,
        }
    }

    /// The constant table `A ≡ 1`, handy for sanity checks.
    pub fn unit(n_rank: u32, n_max: usize) -> Self {
        Self::from_values(n_rank, &vec![1.0; n_max], true)
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `A(m,1,…,1)`, 1-based. Panics when `m` is 0 or past the end.
    #[inline]
    pub fn get(&self, m: usize) -> f64 {
        assert!(m >= 1, "coefficients are indexed from 1");
        self.coeffs[m]
    }

    /// Padded slice with `slice[m] = A(m)` and `slice[0] = 0`.
    #[inline]
    pub fn padded(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn values(&self) -> &[f64] {
        &self.coeffs[1..]
    }

    /// Pointwise sum, truncated to the shorter table.
    pub fn pointwise_add(&self, other: &CoefficientTable) -> CoefficientTable {
        let vals: Vec<f64> = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a + b)
            .collect();
        Self::from_values(self.n_rank, &vals, self.self_dual && other.self_dual)
    }

    /// `x^{-1} Σ_{m≤x} |A(m,1,…,1)|²`.
    pub fn rankin_selberg_ratio(&self, x: usize) -> Result<f64> {
        rankin_selberg_ratio(self, x)
    }
}

/// `α` on the unit circle with `α + α^{-1} = a_p` and `Im α ≥ 0`.
pub fn satake_parameter(a_p: f64) -> Result<Complex64> {
    const SLACK: f64 = 1e-12;
    if !a_p.is_finite() || a_p.abs() > 2.0 + SLACK {
        return Err(Error::Domain(format!(
            "Satake parameter needs |a_p| <= 2, got {a_p}"
        )));
    }
    let half = (a_p / 2.0).clamp(-1.0, 1.0);
    Ok(Complex64::new(half, (1.0 - half * half).max(0.0).sqrt()))
}

/// `h_k(x_1, …, x_n)` for `k = 0..=k_max`, via Newton-type recursion on
/// the elementary symmetric polynomials.
pub fn complete_homogeneous(params: &[Complex64], k_max: usize) -> Vec<Complex64> {
    // e[j] = elementary symmetric polynomial of degree j
    let mut e = vec![Complex64::new(0.0, 0.0); params.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, &x) in params.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * x;
        }
    }
    let mut h = vec![Complex64::new(0.0, 0.0); k_max + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for k in 1..=k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k.min(params.len()) {
            let term = e[j] * h[k - j];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        h[k] = acc;
    }
    h
}

fn lift_parameters(alpha: Complex64, n_rank: u32) -> Vec<Complex64> {
    let n = n_rank as i32;
    (0..n).map(|i| alpha.powi(n - 1 - 2 * i)).collect()
}

/// `A(p^k)` of the symmetric `(n−1)`-th power lift from the GL(2)
/// eigenvalue `a_p`: `h_k` at the lifted Satake parameters.
pub fn sym_prime_power(a_p: f64, n_rank: u32, k: usize) -> Result<f64> {
    let alpha = satake_parameter(a_p)?;
    Ok(complete_homogeneous(&lift_parameters(alpha, n_rank), k)[k].re)
}

fn smallest_prime_factors(n_max: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            spf[i] = i as u32;
            if let Some(start) = i.checked_mul(i) {
                for j in (start..=n_max).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
    }
    spf
}

/// Coefficients of the symmetric `(n−1)`-th power lift of `g`.
pub fn sym_lift_table(g: &Gl2EigenSeries, n_rank: u32, n_max: usize) -> Result<CoefficientTable> {
    if !(2..=4).contains(&n_rank) {
        return Err(Error::Unsupported(format!(
            "symmetric-power lifts are built for n in 2..=4, got {n_rank}"
        )));
    }
    if n_max == 0 || n_max > g.n_max() {
        return Err(Error::Range(format!(
            "lift length {n_max} exceeds the GL(2) table ({})",
            g.n_max()
        )));
    }
    if n_rank == 2 {
        return Ok(CoefficientTable::from_values(2, &g.values()[..n_max], true));
    }

    let spf = smallest_prime_factors(n_max);
    let mut coeffs = vec![0.0f64; n_max + 1];
    coeffs[1] = 1.0;
    for m in 2..=n_max {
        let p = spf[m] as usize;
        let (mut rest, mut k, mut pk) = (m, 0usize, 1usize);
        while rest % p == 0 {
            rest /= p;
            k += 1;
            pk *= p;
        }
        coeffs[m] = if rest == 1 {
            sym_prime_power(g.get(p), n_rank, k)?
        } else {
            coeffs[pk] * coeffs[rest]
        };
    }
    Ok(CoefficientTable {
        n_rank,
        self_dual: true,
        coeffs,
    })
}

/// Coefficients `A(1,…,1,m)` of the dual form.
pub fn dual_table(t: &CoefficientTable) -> Result<CoefficientTable> {
    if !t.self_dual {
        return Err(Error::Unsupported(
            "dual coefficients are only available for self-dual tables".into(),
        ));
    }
    Ok(t.clone())
}

pub fn rankin_selberg_ratio(t: &CoefficientTable, x: usize) -> Result<f64> {
    if x == 0 || x > t.n_max() {
        return Err(Error::Range(format!(
            "x = {x} outside [1, {}]",
            t.n_max()
        )));
    }
    let mut acc = CompensatedSum::new();
    for &a in &t.padded()[1..=x] {
        acc.add_real(a * a);
    }
    Ok(acc.value().re / x as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{normalize_gl2, tau_table};
    use std::f64::consts::PI;

    /// h_k by summing every monomial of degree k (multisets of indices).
    fn brute_h(params: &[Complex64], k: usize) -> Complex64 {
        fn rec(params: &[Complex64], start: usize, left: usize, acc: Complex64) -> Complex64 {
            if left == 0 {
                return acc;
            }
            (start..params.len())
                .map(|i| rec(params, i, left - 1, acc * params[i]))
                .sum()
        }
        rec(params, 0, k, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn satake_examples() {
        assert!((satake_parameter(2.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((satake_parameter(0.0).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let a = satake_parameter(1.0).unwrap();
        assert!((a - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
        assert!((a + a.inv() - 1.0).norm() < 1e-15);
        assert!(satake_parameter(-2.0).unwrap().im >= 0.0);
        assert!(matches!(satake_parameter(2.1), Err(Error::Domain(_))));
    }

    #[test]
    fn complete_homogeneous_matches_monomial_enumeration() {
        let params = [
            Complex64::from_polar(1.0, 0.7),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -0.7),
            Complex64::new(0.3, -0.2),
        ];
        let h = complete_homogeneous(&params, 6);
        for (k, hk) in h.iter().enumerate() {
            assert!((hk - brute_h(&params, k)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn sym2_lift_small_cases() {
        let g = normalize_gl2(&tau_table(2000).unwrap(), 12).unwrap();
        let t = sym_lift_table(&g, 3, 2000).unwrap();
        assert_eq!(t.get(1), 1.0);
        for p in [2usize, 3, 5, 7, 11, 13] {
            let a = g.get(p);
            assert!((t.get(p) - (a * a - 1.0)).abs() < 1e-12);
            let alpha = satake_parameter(a).unwrap();
            let params = lift_parameters(alpha, 3);
            assert!((t.get(p * p) - brute_h(&params, 2).re).abs() < 1e-12);
        }
        assert!((t.get(6) - t.get(2) * t.get(3)).abs() < 1e-14);
        assert!((t.get(12) - t.get(4) * t.get(3)).abs() < 1e-14);
    }

    #[test]
    fn gl2_lift_is_identity_and_dual_copies() {
        let g = normalize_gl2(&tau_table(500).unwrap(), 12).unwrap();
        let t = sym_lift_table(&g, 2, 500).unwrap();
        assert_eq!(t.values(), g.values());
        let d = dual_table(&t).unwrap();
        assert_eq!(d, t);

        let t3 = sym_lift_table(&g, 3, 500).unwrap();
        assert_eq!(dual_table(&t3).unwrap().get(1), 1.0);

        let nsd = CoefficientTable::from_values(3, &[1.0, 2.0], false);
        assert!(matches!(dual_table(&nsd), Err(Error::Unsupported(_))));
        assert!(sym_lift_table(&g, 5, 100).is_err());
        assert!(matches!(sym_lift_table(&g, 3, 501), Err(Error::Range(_))));
    }

    #[test]
    fn rankin_selberg_small_x() {
        let t = CoefficientTable::from_values(2, &[1.0, -2.0, 3.0], true);
        assert_eq!(rankin_selberg_ratio(&t, 1).unwrap(), 1.0);
        assert!((rankin_selberg_ratio(&t, 3).unwrap() - 14.0 / 3.0).abs() < 1e-15);
        assert!(rankin_selberg_ratio(&t, 4).is_err());
    }

    #[test]
    fn spf_sieve() {
        let spf = smallest_prime_factors(30);
        assert_eq!(spf[2], 2);
        assert_eq!(spf[9], 3);
        assert_eq!(spf[25], 5);
        assert_eq!(spf[29], 29);
        assert_eq!(spf[30], 2);
    }
}
