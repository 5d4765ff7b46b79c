//! Numerical evaluation of `Ω(y) = (1/2πi) ∫ f̃(s) π^{−n/2} G̃(1−s)/G(s) y^s ds`
//! along a vertical line, and of its Bessel-integral form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::bessel::bessel_j;
use super::quotient::{log_gamma_quotient, SpectralParams};
use crate::accum::{tree_reduce, CompensatedSum};
use crate::quad::{integrate_adaptive, integrate_fixed};
use crate::weights::Window;
use crate::{Error, Result};

/// Contour nodes handled per parallel task; the phasors are re-seeded
/// exactly at the start of each task.
const CONTOUR_CHUNK: usize = 256;

/// Line `Re s = −sigma0`, truncated at `|Im s| ≤ height`, sampled with
/// `density` points per unit height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinContourSpec {
    pub sigma0: f64,
    pub height: f64,
    pub density: f64,
    /// Largest accepted tail estimate relative to `|Ω|`.
    pub tolerance: f64,
}

impl Default for MellinContourSpec {
    fn default() -> Self {
        MellinContourSpec {
            sigma0: -0.25,
            height: 60.0,
            density: 40.0,
            tolerance: 1e-8,
        }
    }
}

impl MellinContourSpec {
    /// Height sized to the problem: past the stationary point
    /// `t₀ = 2(by)^{1/n}` by the distance over which the Mellin transform of a
    /// window on `[a, b]` falls by about `e^{−49}`. Near `b` the bump decays
    /// like `e^{−1/v}`, which makes `|f̃(c+it)|` fall like `exp(−√(t(b−a)/b))`.
    pub fn auto<W: Window>(f: &W, y: f64, n: u32) -> Self {
        let (a, b) = f.support();
        let t0 = 2.0 * (b * y).powf(1.0 / n as f64);
        let decay = 2400.0 * b / (b - a);
        MellinContourSpec {
            height: (t0 + decay).max(60.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height >= 10.0 && self.density >= 20.0 && self.tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "contour needs T ≥ 10, density ≥ 20 and tolerance > 0, got {self:?}"
            )));
        }
        if !self.sigma0.is_finite() || -self.sigma0 >= 1.0 {
            return Err(Error::Domain(format!(
                "contour line Re s = {} must lie left of the first pole at s = 1",
                -self.sigma0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
    pub value: Complex64,
    /// Bound for the part of the line beyond `|Im s| = T`.
    pub tail_estimate: f64,
    pub nodes: usize,
}

/// `f̃(s) = ∫ f(x) x^{s−1} dx`.
pub fn mellin_transform<W: Window>(f: &W, s: Complex64) -> Result<Complex64> {
    let (a, b) = f.support();
    let cycles = s.im.abs() * (b / a).ln() / (2.0 * PI);
    let r = integrate_adaptive(
        a,
        b,
        (2.0 * cycles).ceil().max(8.0) as usize,
        1e-12,
        "Mellin transform",
        |x| (s - 1.0).exp_ln(x) * f.value(x),
    )?;
    Ok(r.value)
}

trait ExpLn {
    fn exp_ln(self, x: f64) -> Complex64;
}

impl ExpLn for Complex64 {
    /// `x^self` for positive real `x`.
    fn exp_ln(self, x: f64) -> Complex64 {
        (self * x.ln()).exp()
    }
}

/// Quadrature data for `f̃` on the line `Re s = c`: weights
/// `w_i f(x_i) x_i^{c−1}` and log-nodes `log x_i`.
struct MellinNodes {
    amp: Vec<f64>,
    logx: Vec<f64>,
}

impl MellinNodes {
    fn new<W: Window>(f: &W, c: f64, height: f64) -> Self {
        let (a, b) = f.support();
        let cycles = height * (b / a).ln() / (2.0 * PI);
        let panels = (0.5 * cycles).ceil().max(16.0) as usize;
        let rule = crate::quad::panel_rule();
        let width = (b - a) / panels as f64;
        let mut amp = Vec::with_capacity(panels * rule.len());
        let mut logx = Vec::with_capacity(panels * rule.len());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for &(u, w) in rule {
                let x = mid + 0.5 * width * u;
                let fx = f.value(x);
                if fx != 0.0 {
                    amp.push(w * 0.5 * width * fx * x.powf(c - 1.0));
                    logx.push(x.ln());
                }
            }
        }
        MellinNodes { amp, logx }
    }

    /// `f̃(c + i t_k)` for `t_k = t_start + k h`, `k < count`.
    fn transform_run(&self, t_start: f64, h: f64, count: usize) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = self
            .logx
            .iter()
            .zip(&self.amp)
            .map(|(l, a)| Complex64::from_polar(*a, t_start * l))
            .collect();
        let r: Vec<Complex64> = self.logx.iter().map(|l| Complex64::from_polar(1.0, h * l)).collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut acc = Complex64::new(0.0, 0.0);
            for (zi, ri) in z.iter_mut().zip(&r) {
                acc += *zi;
                *zi *= ri;
            }
            out.push(acc);
        }
        out
    }
}

/// Trapezoid rule on the truncated line. The integrand is analytic in a strip
/// around the line, so the rule converges geometrically in the density.
pub fn omega_contour<W: Window>(
    f: &W,
    y: f64,
    p: &SpectralParams,
    spec: &MellinContourSpec,
) -> Result<ContourValue> {
    spec.validate()?;
    if !(y >= 1.0 && y.is_finite()) {
        return Err(Error::Domain(format!("Ω(y) needs y ≥ 1, got {y}")));
    }
    let c = -spec.sigma0;
    let n = p.n_rank as f64;
    let steps = (spec.height * spec.density).ceil() as usize;
    let h = spec.height / steps as f64;
    let symmetric = p.is_real();
    let first = if symmetric { 0i64 } else { -(steps as i64) };
    let total = (steps as i64 - first + 1) as usize;
    let nodes = MellinNodes::new(f, c, spec.height);
    let log_y = y.ln();
    let log_pi = 0.5 * n * PI.ln();
    // Envelope windows over [T/2, T] for the decay fit of the tail.
    let window_of = |k: i64| {
        let u = (k.abs() as f64 * h / spec.height - 0.5) * 2.0;
        (u >= 0.0).then(|| ((u * ENVELOPE_WINDOWS as f64) as usize).min(ENVELOPE_WINDOWS - 1))
    };

    let chunks = total.div_ceil(CONTOUR_CHUNK);
    let parts: Vec<Result<(CompensatedSum, Envelope)>> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let k0 = first + (ci * CONTOUR_CHUNK) as i64;
            let count = CONTOUR_CHUNK.min(total - ci * CONTOUR_CHUNK);
            let ft = nodes.transform_run(k0 as f64 * h, h, count);
            let mut acc = CompensatedSum::new();
            let mut env = [0.0f64; ENVELOPE_WINDOWS];
            for (j, fv) in ft.into_iter().enumerate() {
                let k = k0 + j as i64;
                let s = Complex64::new(c, k as f64 * h);
                let g = fv * (log_gamma_quotient(s, p)? + s * log_y - log_pi).exp();
                let edge = k == first || k == steps as i64;
                let weight = if edge || (symmetric && k == 0) { 0.5 } else { 1.0 };
                acc.add(g * weight);
                if let Some(w) = window_of(k) {
                    env[w] = env[w].max(g.norm());
                }
            }
            Ok((acc, env))
        })
        .collect();
    let mut sums = Vec::with_capacity(parts.len());
    let mut env = [0.0f64; ENVELOPE_WINDOWS];
    for part in parts {
        let (acc, e) = part?;
        sums.push(acc);
        for (a, b) in env.iter_mut().zip(e) {
            *a = a.max(b);
        }
    }
    let integral = tree_reduce(sums).value() * h;
    let value = if symmetric {
        Complex64::new(integral.re / PI, 0.0)
    } else {
        integral / (2.0 * PI)
    };
    let tail_estimate = tail_bound(&env, spec.height) / PI;
    if tail_estimate > spec.tolerance * value.norm() {
        return Err(Error::accuracy(
            format!("contour truncated at T = {}", spec.height),
            tail_estimate / value.norm().max(f64::MIN_POSITIVE),
            spec.tolerance,
        ));
    }
    Ok(ContourValue {
        value,
        tail_estimate,
        nodes: total,
    })
}

const ENVELOPE_WINDOWS: usize = 16;
type Envelope = [f64; ENVELOPE_WINDOWS];

/// `∫_T^∞` of an envelope `E e^{−β(√t−√t₁)}`, where `E` is the smallest
/// window maximum over `[T/2, T]`, `t₁` the end of its window, and `β` the
/// decay rate from the first window to it. Past that window the computed
/// integrand sits on the rounding floor of the Mellin transform, so the
/// decay is extrapolated instead of read off the noise. Without visible
/// decay the bound falls back to `E·T`.
fn tail_bound(env: &Envelope, height: f64) -> f64 {
    let (low, floor) = env
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    if floor == 0.0 {
        return 0.0;
    }
    let edge = |i: usize| height * (0.5 + 0.5 * (i + 1) as f64 / ENVELOPE_WINDOWS as f64);
    let t1 = edge(low);
    let beta = (env[0] / floor).ln() / (t1.sqrt() - edge(0).sqrt());
    if low == 0 || !(beta.is_finite() && beta > 0.0) {
        return floor * height;
    }
    let at_t = floor * (-beta * (height.sqrt() - t1.sqrt())).exp();
    let run = 2.0 * height.sqrt() / beta + 2.0 / (beta * beta);
    at_t * run.min(height)
}

/// `2π^{−n/2} y^{1/2+(1−ν)/n} n^{−ν} ∫ f(x) x^{(1−ν)/n−1/2} J_{ν−n/2}(2n(xy)^{1/n}) dx`,
/// the residue term behind the reduced gamma quotient.
pub fn omega_bessel<W: Window>(f: &W, y: f64, n: u32, nu: u32) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::Domain(format!("rank must be ≥ 2, got {n}")));
    }
    let (a, b) = f.support();
    if !(a > 0.0 && b > a && y > 0.0) {
        return Err(Error::Domain(format!("support [{a}, {b}] and y = {y}")));
    }
    let nf = n as f64;
    let nuf = nu as f64;
    let order = nuf - nf / 2.0;
    let expo = (1.0 - nuf) / nf - 0.5;
    let scale = 2.0 * nf;
    let cycles = scale * y.powf(1.0 / nf) * (b.powf(1.0 / nf) - a.powf(1.0 / nf)) / (2.0 * PI);
    let min_panels = (2.0 * cycles).ceil().max(8.0) as usize;
    // Rejecting a bad order up front keeps the integrand infallible.
    bessel_j(order, 1.0)?;
    let integrand = |x: f64| {
        let fx = f.value(x);
        if fx == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let z = scale * (x * y).powf(1.0 / nf);
        Complex64::new(fx * x.powf(expo) * bessel_j(order, z).unwrap_or(f64::NAN), 0.0)
    };
    let probe = integrate_fixed(a, b, min_panels, integrand).1;
    if probe == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = integrate_adaptive(a, b, min_panels, 1e-10, "Bessel form of Ω", integrand)?;
    let pref = 2.0 * PI.powf(-nf / 2.0) * y.powf(0.5 + (1.0 - nuf) / nf) * nf.powf(-nuf);
    Ok(r.value * pref)
}
