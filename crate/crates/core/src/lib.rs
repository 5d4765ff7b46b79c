//! Numerics for short exponential sums of GL(n) cusp-form coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`forms`] builds exact Ramanujan tau values, their normalised Hecke
//!   eigenvalues and symmetric-power lifts to GL(3) and GL(4).
//! * [`analytic`] holds the complex gamma machinery, Bessel functions, the
//!   leading-order Voronoi kernel and a Mellin–Barnes oracle for it.
//! * [`weights`] provides smooth compactly supported window functions.
//! * [`sums`] evaluates twisted short sums with compensated, deterministic
//!   parallel accumulation.
//! * [`predict`] evaluates resonance main terms and the oscillatory
//!   integrals behind them.

pub mod analytic;
pub mod error;
pub mod forms;
pub mod predict;
pub mod quad;
pub mod sums;
pub mod weights;

mod accum;

pub use accum::CompensatedSum;
pub use error::{Error, Result};
pub use forms::{CoefficientTable, Gl2EigenSeries, TauTable, ThetaBound};
pub use num_complex::Complex64;

use std::f64::consts::TAU;

/// Low part of `2π`: `TAU + TAU_LO` carries about 106 bits.
const TAU_LO: f64 = 2.4492935982947064e-16;

/// `e(x) = exp(2πix)`. The argument is reduced to `[−1/2, 1/2]` and the
/// angle is formed in double-double, so the phase error stays near one ulp
/// instead of growing with the rounding of `2π`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    e_split(x - x.round(), 0.0)
}

/// `e(r + t)` for `|r| ≤ 1/2` and `|t| < 10⁻⁶`, with the angle `2π(r + t)`
/// carried as an unevaluated double-double sum and the low part applied to
/// second order.
#[inline]
fn e_split(r: f64, t: f64) -> Complex64 {
    let hi = TAU * r;
    let lo = TAU.mul_add(r, -hi) + TAU_LO.mul_add(r, TAU * t);
    let (s, c) = hi.sin_cos();
    let damp = 1.0 - 0.5 * lo * lo;
    Complex64::new(c.mul_add(damp, -s * lo), s.mul_add(damp, c * lo))
}

/// `e(ab)`, with the product split exactly as `p + err` (via FMA) and the
/// fractional part of `p` taken exactly. A small `err` goes straight into
/// the angle's low part. It varies from term to term, so the final rounding
/// of `cos` and `sin` stays unbiased along arithmetic progressions. A large
/// `err` (products beyond about 10¹⁰) is first folded into the fractional
/// part by a two-sum.
#[inline]
pub fn e_mul(a: f64, b: f64) -> Complex64 {
    let p = a * b;
    let err = a.mul_add(b, -p);
    let f = p - p.floor();
    if err.abs() < 1e-6 {
        return e_split(f - f.round(), err);
    }
    let x = f + err;
    let z = x - f;
    let t = (f - (x - z)) + (err - z);
    e_split(x - x.round(), t)
}
