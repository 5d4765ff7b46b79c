//! Bessel functions of the first kind for real order and positive argument.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::gamma::recip_gamma_real;
use crate::{Error, Result};

/// Lowest order accepted by [`bessel_j`].
pub const MIN_ORDER: f64 = -10.0;
const MIN_ASYMPTOTIC_TERMS: usize = 6;
const MAX_ASYMPTOTIC_TERMS: usize = 80;

/// Argument above which the large-argument expansion is used.
pub fn series_limit(nu: f64) -> f64 {
    20f64.max(nu * nu / 2.0)
}

/// `J_ν(x)`: power series for `x ≤ max(20, ν²/2)`, Hankel's large-argument
/// expansion beyond.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) || !(nu >= MIN_ORDER) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "J_ν(x) needs x > 0 and ν ≥ {MIN_ORDER}, got ν = {nu}, x = {x}"
        )));
    }
    if nu < 0.0 && nu == nu.round() {
        let j = bessel_j(-nu, x)?;
        return Ok(if (nu as i64) % 2 == 0 { j } else { -j });
    }
    Ok(if x <= series_limit(nu) {
        bessel_j_series(nu, x)
    } else {
        bessel_j_asymptotic(nu, x)
    })
}

/// `(x/2)^ν Σ_j (−x²/4)^j / (j! Γ(j+ν+1))`, summed in double-double so the
/// alternating terms cancel cleanly up to `x ≈ 40`.
pub fn bessel_j_series(nu: f64, x: f64) -> f64 {
    if nu < 0.0 && nu == nu.round() {
        let j = bessel_j_series(-nu, x);
        return if (nu as i64) % 2 == 0 { j } else { -j };
    }
    let q = Dd::prod(x, x).scale(0.25);
    let rg = recip_gamma_real(nu + 1.0);
    let mut sum = Dd::from(0.0);
    let mut term = Dd::from(1.0);
    let mut j = 0usize;
    loop {
        sum = sum.add(term);
        let jf = (j + 1) as f64;
        let denom = Dd::sum(jf, nu).mul_f64(jf);
        term = term.mul(q).div(denom).neg();
        j += 1;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && j as f64 > x {
            break;
        }
        if j > 2000 {
            break;
        }
    }
    (0.5 * x).powf(nu) * rg * sum.to_f64()
}

/// Hankel expansion `√(2/(πx)) (P cos ω − Q sin ω)`, `ω = x − νπ/2 − π/4`,
/// summed until the terms stop decreasing (at least six terms).
pub fn bessel_j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut b = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        let odd = (2 * k - 1) as f64;
        b *= (mu - odd * odd) / (8.0 * k as f64 * x);
        if k > MIN_ASYMPTOTIC_TERMS && b.abs() >= last {
            break;
        }
        last = b.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * b;
        } else {
            q += sign * b;
        }
        if b == 0.0 || (k >= MIN_ASYMPTOTIC_TERMS && b.abs() < 1e-18) {
            break;
        }
    }
    let phase = nu * FRAC_PI_2 + FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_w = cx * cp + sx * sp;
    let sin_w = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    fn sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn scale(self, k: f64) -> Dd {
        Dd {
            hi: self.hi * k,
            lo: self.lo * k,
        }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        quick_two_sum(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn mul_f64(self, k: f64) -> Dd {
        let p = Dd::prod(self.hi, k);
        quick_two_sum(p.hi, p.lo + self.lo * k)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul_f64(q1).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul_f64(q2).neg());
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
