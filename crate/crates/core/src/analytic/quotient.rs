//! Gamma-factor quotients `G̃(1−s)/G(s)` and their single-quotient reduction.

use num_complex::Complex64;

use super::gamma::log_gamma_unchecked;
use crate::{Error, Result};

/// Distance to a pole of Γ below which evaluation is refused.
pub const POLE_PROXIMITY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParams {
    pub n_rank: u32,
    pub lambda: Vec<Complex64>,
    pub lambda_dual: Vec<Complex64>,
}

impl SpectralParams {
    pub fn new(lambda: Vec<Complex64>, lambda_dual: Vec<Complex64>) -> Result<Self> {
        let n = lambda.len();
        if n < 2 || lambda_dual.len() != n {
            return Err(Error::Domain(format!(
                "need n ≥ 2 parameters on both sides, got {} and {}",
                n,
                lambda_dual.len()
            )));
        }
        for (name, set) in [("λ", &lambda), ("λ̃", &lambda_dual)] {
            let sum: Complex64 = set.iter().sum();
            if sum.norm() > 1e-12 {
                return Err(Error::Domain(format!("Σ{name} = {sum}, expected 0")));
            }
            if let Some(l) = set.iter().find(|l| l.re > 0.5) {
                return Err(Error::Domain(format!("Re {name} = {} exceeds 1/2", l.re)));
            }
        }
        Ok(SpectralParams {
            n_rank: n as u32,
            lambda,
            lambda_dual,
        })
    }

    /// All parameters zero.
    pub fn zero(n_rank: u32) -> Result<Self> {
        let z = vec![Complex64::new(0.0, 0.0); n_rank as usize];
        Self::new(z.clone(), z)
    }

    pub fn is_real(&self) -> bool {
        self.lambda.iter().chain(&self.lambda_dual).all(|l| l.im == 0.0)
    }
}

fn guarded_log_gamma(z: Complex64, s: Complex64) -> Result<Complex64> {
    if z.re < 0.5 {
        let k = z.re.round().min(0.0);
        if Complex64::new(z.re - k, z.im).norm() < POLE_PROXIMITY {
            return Err(Error::Pole { re: s.re, im: s.im });
        }
    }
    Ok(log_gamma_unchecked(z))
}

/// `log ∏ Γ((1−s−λ̃_ℓ)/2) − log ∏ Γ((s−λ_ℓ)/2)`, up to a multiple of `2πi`.
pub fn log_gamma_quotient(s: Complex64, p: &SpectralParams) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, ld) in p.lambda.iter().zip(&p.lambda_dual) {
        acc += guarded_log_gamma((1.0 - s - ld) * 0.5, s)?;
        acc -= guarded_log_gamma((s - l) * 0.5, s)?;
    }
    Ok(acc)
}

pub fn gamma_quotient(s: Complex64, p: &SpectralParams) -> Result<Complex64> {
    Ok(log_gamma_quotient(s, p)?.exp())
}

/// `log` of `n^{ns−n/2} Γ((1−ns)/2) / Γ((ns−n+1)/2)`.
pub fn log_reduced_quotient(s: Complex64, n: u32) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("rank 0".into()));
    }
    let nf = n as f64;
    let ns = s * nf;
    Ok((ns - nf / 2.0) * nf.ln() + guarded_log_gamma((1.0 - ns) * 0.5, s)?
        - guarded_log_gamma((ns - nf + 1.0) * 0.5, s)?)
}

pub fn reduced_quotient(s: Complex64, n: u32) -> Result<Complex64> {
    Ok(log_reduced_quotient(s, n)?.exp())
}

/// `H(s)` with `G̃(1−s)/G(s) = n^{ns−n/2} Γ((1−ns)/2)/Γ((ns−n+1)/2) · (1 + H(s))`.
pub fn h_correction(s: Complex64, p: &SpectralParams) -> Result<Complex64> {
    if s.norm() < 5.0 {
        return Err(Error::Domain(format!("H(s) needs |s| ≥ 5, got {s}")));
    }
    let d = log_gamma_quotient(s, p)? - log_reduced_quotient(s, p.n_rank)?;
    Ok(exp_m1(d))
}

/// `e^z − 1` without cancellation for small `z`.
fn exp_m1(z: Complex64) -> Complex64 {
    let (sin, cos) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    Complex64::new(em1 * cos - 2.0 * half * half, (em1 + 1.0) * sin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{complex_log_gamma, fit_slope};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_validation() {
        assert!(SpectralParams::zero(3).is_ok());
        assert!(SpectralParams::new(vec![c(0.1, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0); 2]).is_err());
        assert!(SpectralParams::new(vec![c(0.6, 0.0), c(-0.6, 0.0)], vec![c(0.0, 0.0); 2]).is_err());
        assert!(SpectralParams::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]).is_err());
        let p = SpectralParams::new(vec![c(0.0, 2.0), c(0.0, -2.0)], vec![c(0.0, 2.0), c(0.0, -2.0)])
            .unwrap();
        assert!(!p.is_real());
    }

    #[test]
    fn unit_modulus_on_critical_line() {
        let p = SpectralParams::zero(2).unwrap();
        let q = gamma_quotient(c(0.5, 10.0), &p).unwrap();
        assert!((q.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn matches_direct_log_gamma() {
        let p = SpectralParams::new(
            vec![c(0.2, 1.0), c(-0.1, -0.4), c(-0.1, -0.6)],
            vec![c(0.2, -1.0), c(-0.1, 0.4), c(-0.1, 0.6)],
        )
        .unwrap();
        let s = c(-1.0, 20.0);
        let mut direct = c(0.0, 0.0);
        for (l, ld) in p.lambda.iter().zip(&p.lambda_dual) {
            direct += complex_log_gamma((1.0 - s - ld) / 2.0).unwrap();
            direct -= complex_log_gamma((s - l) / 2.0).unwrap();
        }
        let q = gamma_quotient(s, &p).unwrap();
        assert!((q - direct.exp()).norm() < 1e-12 * q.norm());
        let z = gamma_quotient(s, &SpectralParams::zero(3).unwrap()).unwrap();
        assert!(z.norm().is_finite() && z.norm() > 0.0);
    }

    #[test]
    fn schwarz_reflection() {
        let p = SpectralParams::new(vec![c(0.25, 0.0), c(-0.25, 0.0)], vec![c(0.3, 0.0), c(-0.3, 0.0)])
            .unwrap();
        for s in [c(0.25, 7.0), c(-2.0, 33.0), c(1.5, -3.0)] {
            let a = gamma_quotient(s.conj(), &p).unwrap();
            let b = gamma_quotient(s, &p).unwrap().conj();
            assert!((a - b).norm() <= 1e-13 * a.norm());
            let ha = h_correction(c(0.5, 12.0).conj(), &p).unwrap();
            let hb = h_correction(c(0.5, 12.0), &p).unwrap().conj();
            assert!((ha - hb).norm() < 1e-13);
        }
    }

    #[test]
    fn poles_are_guarded() {
        let p = SpectralParams::zero(2).unwrap();
        assert!(matches!(gamma_quotient(c(-2.0, 0.0), &p), Err(Error::Pole { .. })));
        assert!(matches!(gamma_quotient(c(1.0, 5e-7), &p), Err(Error::Pole { .. })));
        assert!(matches!(reduced_quotient(c(0.5, 0.0), 2), Err(Error::Pole { .. })));
        assert!(gamma_quotient(c(1.0, 1e-3), &p).is_ok());
    }

    #[test]
    fn rank_one_collapse() {
        for s in [c(0.3, 4.0), c(2.2, -9.0)] {
            let direct =
                (complex_log_gamma((1.0 - s) / 2.0).unwrap() - complex_log_gamma(s / 2.0).unwrap()).exp();
            assert!((reduced_quotient(s, 1).unwrap() - direct).norm() < 1e-13 * direct.norm());
        }
    }

    #[test]
    fn reduced_quotient_growth() {
        for n in [2u32, 3] {
            for sigma in [-0.5, 0.25] {
                let pts: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0]
                    .iter()
                    .map(|&t: &f64| (t.ln(), reduced_quotient(c(sigma, t), n).unwrap().norm().ln()))
                    .collect();
                let slope = fit_slope(&pts);
                let expected = n as f64 * (0.5 - sigma);
                assert!((slope - expected).abs() < 0.01, "n={n} σ={sigma}: {slope}");
            }
        }
    }

    #[test]
    fn reduced_versus_full_quotient() {
        let p = SpectralParams::zero(2).unwrap();
        let s = c(0.5, 10.0);
        let full = gamma_quotient(s, &p).unwrap();
        let red = reduced_quotient(s, 2).unwrap();
        assert!((red / full - 1.0).norm() <= 0.12);
    }

    #[test]
    fn h_decays_like_one_over_s() {
        for n in [2u32, 3, 4] {
            let p = SpectralParams::zero(n).unwrap();
            let mut worst = 0.0f64;
            for i in 0..=98 {
                let t = 10.0 + 5.0 * i as f64;
                let s = c(0.5, t);
                worst = worst.max(h_correction(s, &p).unwrap().norm() * s.norm());
            }
            assert!(worst < 2.0, "n = {n}: |H|·|s| up to {worst}");
            let h20 = h_correction(c(0.5, 20.0), &p).unwrap().norm();
            let h200 = h_correction(c(0.5, 200.0), &p).unwrap().norm();
            assert!(h200 < h20);
        }
        assert!(h_correction(c(0.5, 3.0), &SpectralParams::zero(2).unwrap()).is_err());
    }
}
