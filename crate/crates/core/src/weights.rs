//! Smooth compactly supported windows on `[M, M+Δ]`.
//!
//! The bump is `exp(1 − 1/(1−u²))` with `u = 2(x−M)/Δ − 1`. The plateau
//! window is `1` on `[M₁, M₂]` and climbs/falls on the two ramps through the
//! smooth step `ψ(v) = φ(v)/(φ(v)+φ(1−v))`, `φ(v) = exp(−1/v)`, built from the
//! same `exp(−1/t)` germ, so every derivative is continuous at `M₁` and `M₂`.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Bump,
    Plateau { m1: f64, m2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub m: f64,
    pub delta: f64,
    pub shape: Shape,
}

/// Largest allowed ratio between the three plateau segments.
pub const PLATEAU_RATIO_BOUND: f64 = 8.0;

impl WeightSpec {
    pub fn bump(m: f64, delta: f64) -> Result<Self> {
        check_window(m, delta)?;
        Ok(WeightSpec {
            m,
            delta,
            shape: Shape::Bump,
        })
    }

    /// Plateau with ramps of `Δ/4` on either side.
    pub fn plateau(m: f64, delta: f64) -> Result<Self> {
        Self::plateau_with(m, delta, m + delta / 4.0, m + 3.0 * delta / 4.0)
    }

    pub fn plateau_with(m: f64, delta: f64, m1: f64, m2: f64) -> Result<Self> {
        check_window(m, delta)?;
        let end = m + delta;
        if !(m < m1 && m1 < m2 && m2 < end) {
            return Err(Error::Domain(format!(
                "plateau needs M < M1 < M2 < M+Δ, got {m} {m1} {m2} {end}"
            )));
        }
        let segs = [m1 - m, m2 - m1, end - m2];
        let ratio = segs.iter().cloned().fold(f64::MIN, f64::max)
            / segs.iter().cloned().fold(f64::MAX, f64::min);
        if ratio > PLATEAU_RATIO_BOUND {
            return Err(Error::Domain(format!(
                "plateau segments too uneven (ratio {ratio:.2} > {PLATEAU_RATIO_BOUND})"
            )));
        }
        Ok(WeightSpec {
            m,
            delta,
            shape: Shape::Plateau { m1, m2 },
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.m, self.m + self.delta)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_offset(x - self.m)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative_offset(x - self.m)
    }

    /// `w(M + r)`. Evaluating through the offset keeps finite differences
    /// free of the rounding in `M + r` when `M ≫ Δ`.
    pub fn eval_offset(&self, r: f64) -> f64 {
        if !(r > 0.0 && r < self.delta) {
            return 0.0;
        }
        match self.shape {
            Shape::Bump => bump_profile(2.0 * r / self.delta - 1.0),
            Shape::Plateau { m1, m2 } => {
                let (r1, r2) = (m1 - self.m, m2 - self.m);
                if r < r1 {
                    smooth_step(r / r1)
                } else if r <= r2 {
                    1.0
                } else {
                    smooth_step((self.delta - r) / (self.delta - r2))
                }
            }
        }
    }

    pub fn derivative_offset(&self, r: f64) -> f64 {
        if !(r > 0.0 && r < self.delta) {
            return 0.0;
        }
        match self.shape {
            Shape::Bump => {
                let u = 2.0 * r / self.delta - 1.0;
                let q = 1.0 - u * u;
                bump_profile(u) * (-2.0 * u / (q * q)) * (2.0 / self.delta)
            }
            Shape::Plateau { m1, m2 } => {
                let (r1, r2) = (m1 - self.m, m2 - self.m);
                if r < r1 {
                    smooth_step_derivative(r / r1) / r1
                } else if r <= r2 {
                    0.0
                } else {
                    let len = self.delta - r2;
                    -smooth_step_derivative((self.delta - r) / len) / len
                }
            }
        }
    }

    /// `∫ w`, by composite Gauss–Legendre refined to `10^{−12}`.
    pub fn mass(&self) -> f64 {
        let (a, b) = self.support();
        crate::quad::integrate_adaptive(a, b, 16, 1e-12, "window mass", |x| {
            num_complex::Complex64::new(self.eval(x), 0.0)
        })
        .map(|r| r.value.re)
        .unwrap_or(f64::NAN)
    }
}

fn check_window(m: f64, delta: f64) -> Result<()> {
    if !(m.is_finite() && delta.is_finite() && m > 0.0 && delta > 0.0) {
        return Err(Error::Domain(format!(
            "window needs M > 0 and Δ > 0, got M = {m}, Δ = {delta}"
        )));
    }
    Ok(())
}

#[inline]
fn bump_profile(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

#[inline]
fn germ(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        (-1.0 / v).exp()
    }
}

fn smooth_step(v: f64) -> f64 {
    let (a, b) = (germ(v), germ(1.0 - v));
    a / (a + b)
}

fn smooth_step_derivative(v: f64) -> f64 {
    let (a, b) = (germ(v), germ(1.0 - v));
    let da = if v > 0.0 { a / (v * v) } else { 0.0 };
    let db = if v < 1.0 { b / ((1.0 - v) * (1.0 - v)) } else { 0.0 };
    let s = a + b;
    (da * b + a * db) / (s * s)
}

/// A real window with compact support, as consumed by the integrators.
pub trait Window: Sync {
    fn support(&self) -> (f64, f64);
    fn value(&self, x: f64) -> f64;
}

impl Window for WeightSpec {
    fn support(&self) -> (f64, f64) {
        WeightSpec::support(self)
    }

    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// `c·w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<W> {
    pub factor: f64,
    pub window: W,
}

impl<W: Window> Window for Scaled<W> {
    fn support(&self) -> (f64, f64) {
        self.window.support()
    }

    fn value(&self, x: f64) -> f64 {
        self.factor * self.window.value(x)
    }
}

pub fn eval_weight(w: &WeightSpec, x: f64) -> f64 {
    w.eval(x)
}

pub fn eval_weight_derivative(w: &WeightSpec, x: f64) -> f64 {
    w.derivative(x)
}

// Central stencils of second order for the ν-th derivative, at offsets −k..=k.
const STENCILS: [&[f64]; 5] = [
    &[1.0],
    &[-0.5, 0.0, 0.5],
    &[1.0, -2.0, 1.0],
    &[-0.5, 1.0, 0.0, -1.0, 0.5],
    &[1.0, -4.0, 6.0, -4.0, 1.0],
];

fn fd_sup(w: &WeightSpec, nu: usize, grid: usize) -> f64 {
    let h = w.delta / grid as f64;
    let stencil = STENCILS[nu];
    let half = (stencil.len() / 2) as i64;
    let mut sup = 0.0f64;
    for i in 0..=grid as i64 {
        let d: f64 = stencil
            .iter()
            .enumerate()
            .map(|(j, c)| c * w.eval_offset((i + j as i64 - half) as f64 * h))
            .sum();
        sup = sup.max((d / h.powi(nu as i32)).abs());
    }
    sup * w.delta.powi(nu as i32)
}

/// Empirical `C_ν = Δ^ν sup|w^{(ν)}|` for `ν = 0..=nu_max` from finite
/// differences on grids of 1000 and 2000 cells; fails when the two grids
/// disagree by more than 5%.
pub fn check_derivative_bounds(w: &WeightSpec, nu_max: usize) -> Result<Vec<f64>> {
    if nu_max > 4 {
        return Err(Error::Domain(format!(
            "derivative bounds are checked up to order 4, got {nu_max}"
        )));
    }
    (0..=nu_max)
        .map(|nu| {
            let coarse = fd_sup(w, nu, 1000);
            let fine = fd_sup(w, nu, 2000);
            let change = (coarse - fine).abs() / fine.max(f64::MIN_POSITIVE);
            if change > 0.05 {
                Err(Error::accuracy(
                    format!("C_{nu} under grid refinement"),
                    change,
                    0.05,
                ))
            } else {
                Ok(fine)
            }
        })
        .collect()
}
