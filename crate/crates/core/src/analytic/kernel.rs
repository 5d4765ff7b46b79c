//! Leading-order asymptotics of the GL(n) Voronoi kernel.
//!
//! For parameters whose shifts are even integers (in particular `λ = 0`, and
//! the archimedean data of `Δ` and `sym²Δ`), the kernel behaves like
//! `c₀⁺ e(n(xy)^{1/n}/π) + c₀⁻ e(−n(xy)^{1/n}/π)` with
//! `c₀^± = π^{−(n+1)/2} n^{−1/2} e(±(n−1)/8)`, i.e.
//! `2π^{−(n+1)/2} n^{−1/2} cos(2n(xy)^{1/n} + (n−1)π/4)`. This is the
//! large-argument form of `2π^{−n/2} (xy)^{…} J_{−n/2}(2n(xy)^{1/n})`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quad::integrate_adaptive;
use crate::weights::Window;
use crate::{e, Error, Result};

/// `C` in `error_bound = C (xy)^{−1/n}` of [`KernelValue`].
pub const KERNEL_ERROR_CONSTANT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub x: f64,
    pub y: f64,
    pub value: Complex64,
    pub truncation_order: u32,
    pub error_bound: f64,
}

/// `c₀⁺` for rank `n`; `c₀⁻` is its conjugate.
pub fn kernel_coefficient(n: u32) -> Complex64 {
    let nf = n as f64;
    e((nf - 1.0) / 8.0) * (PI.powf(-(nf + 1.0) / 2.0) / nf.sqrt())
}

/// Phase `e(−(n−1)/8) = conj(c₀⁺)/|c₀⁺|` carried by a resonant main term.
pub fn resonance_phase(n: u32) -> Complex64 {
    e(-(n as f64 - 1.0) / 8.0)
}

fn check_rank(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("kernel rank must be ≥ 2, got {n}")));
    }
    Ok(())
}

pub fn kernel_leading(x: f64, y: f64, n: u32) -> Result<KernelValue> {
    check_rank(n)?;
    let xy = x * y;
    if !(x > 0.0 && y > 0.0 && xy >= 1.0 && xy.is_finite()) {
        return Err(Error::Domain(format!("kernel needs x, y > 0 and xy ≥ 1, got {x}, {y}")));
    }
    let c = kernel_coefficient(n);
    let freq = n as f64 * xy.powf(1.0 / n as f64) / PI;
    let value = c * e(freq) + c.conj() * e(-freq);
    Ok(KernelValue {
        x,
        y,
        value,
        truncation_order: 0,
        error_bound: KERNEL_ERROR_CONSTANT * xy.powf(-1.0 / n as f64),
    })
}

/// `y^{1/2+1/(2n)} ∫ f(x) x^{1/(2n)−1/2} 𝒦₀(x,y) dx` with the leading-order
/// kernel: the approximation to `Ω(y)` that the kernel asymptotics predict.
pub fn kernel_form<W: Window>(f: &W, y: f64, n: u32) -> Result<Complex64> {
    check_rank(n)?;
    let (a, b) = f.support();
    if a * y < 1.0 {
        return Err(Error::Domain(format!("kernel form needs a·y ≥ 1, got {}", a * y)));
    }
    let nf = n as f64;
    let cycles = 2.0 * nf * y.powf(1.0 / nf) * (b.powf(1.0 / nf) - a.powf(1.0 / nf)) / (2.0 * PI);
    let expo = 1.0 / (2.0 * nf) - 0.5;
    let c = kernel_coefficient(n);
    let r = integrate_adaptive(
        a,
        b,
        (2.0 * cycles).ceil().max(8.0) as usize,
        1e-10,
        "kernel form quadrature",
        |x| {
            let fx = f.value(x);
            if fx == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let freq = nf * (x * y).powf(1.0 / nf) / PI;
            (c * e(freq) + c.conj() * e(-freq)) * (fx * x.powf(expo))
        },
    )?;
    Ok(r.value * y.powf(0.5 + 1.0 / (2.0 * nf)))
}
