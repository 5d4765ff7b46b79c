//! Resonance main terms, the magnitude law and the oscillatory integrals
//! behind them.

use num_complex::Complex64;

use crate::analytic::resonance_phase;
use crate::quad::integrate_adaptive;
use crate::weights::WeightSpec;
use crate::{e, CoefficientTable, Error, Result};

/// Convergence target of [`oscillatory_integral`] under panel doubling.
pub const INTEGRAL_REL_TOL: f64 = 1e-8;
const VARIATION_SAMPLES: usize = 1024;

/// Which unit phase multiplies a resonant main term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e(−(n−1)/8)`, carried by `c₀⁻ = conj(c₀⁺)` of the leading kernel.
    #[default]
    Derived,
    /// `e((n+3)/8)`, the printed form. Equal to the derived phase for
    /// `n ≡ 3 (mod 4)`.
    Stated,
}

impl PhaseConvention {
    pub fn phase(self, n: u32) -> Complex64 {
        match self {
            PhaseConvention::Derived => resonance_phase(n),
            PhaseConvention::Stated => e((n as f64 + 3.0) / 8.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralPhase {
    None,
    /// `d^{1/n} x / M^{1−1/n} − n (m x)^{1/n}`, resonant when `m = d`.
    Linear { d: f64, m_dual: f64, big_m: f64, n: u32 },
}

impl IntegralPhase {
    pub fn resonant(d: u64, big_m: f64, n: u32) -> Self {
        IntegralPhase::Linear {
            d: d as f64,
            m_dual: d as f64,
            big_m,
            n,
        }
    }

    /// Phase in turns.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            IntegralPhase::None => 0.0,
            IntegralPhase::Linear { d, m_dual, big_m, n } => {
                let nf = n as f64;
                d.powf(1.0 / nf) * x / big_m.powf(1.0 - 1.0 / nf) - nf * (m_dual * x).powf(1.0 / nf)
            }
        }
    }

    /// Derivative in turns per unit `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            IntegralPhase::None => 0.0,
            IntegralPhase::Linear { d, m_dual, big_m, n } => {
                let nf = n as f64;
                d.powf(1.0 / nf) / big_m.powf(1.0 - 1.0 / nf)
                    - m_dual.powf(1.0 / nf) * x.powf(1.0 / nf - 1.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSpec {
    pub amplitude_exponent: f64,
    pub phase: IntegralPhase,
    pub weight: WeightSpec,
}

impl IntegralSpec {
    fn validate(&self) -> Result<()> {
        if !(self.amplitude_exponent > -0.5 && self.amplitude_exponent <= 0.0) {
            return Err(Error::Domain(format!(
                "amplitude exponent {} outside (−1/2, 0]",
                self.amplitude_exponent
            )));
        }
        Ok(())
    }

    /// `∫|dφ|` over the support, in turns, from a fixed sampling grid.
    pub fn phase_variation(&self) -> f64 {
        let (a, b) = self.weight.support();
        let h = (b - a) / VARIATION_SAMPLES as f64;
        let mut prev = self.phase.eval(a);
        let mut total = 0.0;
        for i in 1..=VARIATION_SAMPLES {
            let cur = self.phase.eval(a + i as f64 * h);
            total += (cur - prev).abs();
            prev = cur;
        }
        total
    }
}

/// `∫ w(x) x^α e(φ(x)) dx` by composite Gauss–Legendre, starting from at
/// least `20(1 + total phase variation)` nodes and doubling until two
/// successive values agree to [`INTEGRAL_REL_TOL`].
pub fn oscillatory_integral(spec: &IntegralSpec) -> Result<Complex64> {
    spec.validate()?;
    let (a, b) = spec.weight.support();
    let nodes = 20.0 * (1.0 + spec.phase_variation());
    let panels = (nodes / crate::quad::PANEL_ORDER as f64).ceil() as usize;
    let alpha = spec.amplitude_exponent;
    let r = integrate_adaptive(a, b, panels, INTEGRAL_REL_TOL, "oscillatory integral", |x| {
        let w = spec.weight.eval(x);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        e(spec.phase.eval(x)) * (w * x.powf(alpha))
    })?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTermResult {
    pub value: Complex64,
    pub integral: Complex64,
    pub constant: Complex64,
    /// `C Δ M^{−1/2−1/(2n)}`, `C` from [`error_constant`].
    pub error_budget: f64,
}

/// Calibrated `C` of the error budget per rank: the largest
/// `|sum − main| / (Δ M^{−1/2−1/(2n)})` over M ∈ {10⁵, 3·10⁵, 10⁶},
/// γ ∈ {0.70, 0.75, 0.80}, d ∈ {1, 2, 3} with a bump weight, rounded up
/// (observed 5.36 for Δ, 48.0 for its symmetric square). Ranks above 3 have
/// no calibration grid and reuse the rank-3 value.
pub fn error_constant(n: u32) -> f64 {
    match n {
        2 => 6.0,
        _ => 50.0,
    }
}

fn dual_coefficient(table_dual: &CoefficientTable, d: u64) -> Result<f64> {
    if d == 0 || d as usize > table_dual.n_max() {
        return Err(Error::Range(format!(
            "dual coefficient A(1,…,1,{d}) outside the table (n_max = {})",
            table_dual.n_max()
        )));
    }
    Ok(table_dual.get(d as usize))
}

/// `A(1,…,1,d) d^{1/(2n)−1/2} n^{−1/2}` times the unit phase.
pub fn main_term_constant(a1d: f64, d: u64, n: u32, convention: PhaseConvention) -> Complex64 {
    let nf = n as f64;
    convention.phase(n) * (a1d * (d as f64).powf(1.0 / (2.0 * nf) - 0.5) / nf.sqrt())
}

fn main_term(
    table_dual: &CoefficientTable,
    w: &WeightSpec,
    d: u64,
    n: u32,
    phase: IntegralPhase,
    convention: PhaseConvention,
) -> Result<MainTermResult> {
    if n < 2 {
        return Err(Error::Domain(format!("rank must be ≥ 2, got {n}")));
    }
    let a1d = dual_coefficient(table_dual, d)?;
    let nf = n as f64;
    let constant = main_term_constant(a1d, d, n, convention);
    let integral = oscillatory_integral(&IntegralSpec {
        amplitude_exponent: 1.0 / (2.0 * nf) - 0.5,
        phase,
        weight: *w,
    })?;
    Ok(MainTermResult {
        value: constant * integral,
        integral,
        constant,
        error_budget: error_constant(n) * w.delta * w.m.powf(-0.5 - 1.0 / (2.0 * nf)),
    })
}

/// Main term of the linearly twisted sum over the window of `w`.
pub fn main_term_linear(
    table_dual: &CoefficientTable,
    w: &WeightSpec,
    d: u64,
    n: u32,
    convention: PhaseConvention,
) -> Result<MainTermResult> {
    main_term(table_dual, w, d, n, IntegralPhase::resonant(d, w.m, n), convention)
}

/// Main term of the sum twisted by `e(n(dm)^{1/n})`: the phase cancels and
/// the integral is `∫ w(x) x^{1/(2n)−1/2} dx`.
pub fn main_term_nonlinear(
    table_dual: &CoefficientTable,
    w: &WeightSpec,
    d: u64,
    n: u32,
    convention: PhaseConvention,
) -> Result<MainTermResult> {
    main_term(table_dual, w, d, n, IntegralPhase::None, convention)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `Δ ≤ M^{1−1/(2n)}`: the resonant integrand does not oscillate.
    NonOscillating,
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudePrediction {
    pub value: f64,
    pub regime: Regime,
}

/// `|A(1,…,1,d)| d^{1/(2n)−1/2} n^{−1/2} Δ M^{1/(2n)−1/2}` below the regime
/// boundary `Δ = M^{1−1/(2n)}`, and the `M^{1/2}` scale above it.
pub fn magnitude_prediction(
    big_m: f64,
    delta: f64,
    d: u64,
    n: u32,
    a1d: f64,
) -> Result<MagnitudePrediction> {
    if !(delta >= 1.0 && big_m > 0.0) || n < 2 || d == 0 {
        return Err(Error::Domain(format!(
            "magnitude needs Δ ≥ 1, M > 0, n ≥ 2, d ≥ 1; got Δ={delta}, M={big_m}, n={n}, d={d}"
        )));
    }
    let nf = n as f64;
    if delta <= big_m.powf(1.0 - 1.0 / (2.0 * nf)) {
        Ok(MagnitudePrediction {
            value: main_term_constant(a1d, d, n, PhaseConvention::Derived).norm()
                * delta
                * big_m.powf(1.0 / (2.0 * nf) - 0.5),
            regime: Regime::NonOscillating,
        })
    } else {
        Ok(MagnitudePrediction {
            value: big_m.sqrt(),
            regime: Regime::Oscillating,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JmProbeSpec {
    pub integral: IntegralSpec,
    /// `sup |g|` of the amplitude `g = w x^α`.
    pub g0: f64,
    /// Length scale with `g^{(ν)} ≪ G₀ G₁^{−ν}`.
    pub g1: f64,
    /// Radius of the neighbourhood on which the phase is holomorphic.
    pub rho: f64,
    pub p: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JmProbe {
    pub lhs: f64,
    pub rhs: f64,
    /// `min |φ′|` over the support, in turns per unit.
    pub f1: f64,
}

impl JmProbe {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// `F₁ = min |φ′|` on the support, from the sampling grid.
pub fn min_phase_derivative(spec: &IntegralSpec) -> f64 {
    let (a, b) = spec.weight.support();
    (0..=VARIATION_SAMPLES)
        .map(|i| spec.phase.derivative(a + (b - a) * i as f64 / VARIATION_SAMPLES as f64).abs())
        .fold(f64::INFINITY, f64::min)
}

/// First-derivative bound `G₀ (G₁F₁)^{−P} (1 + G₁/ρ)^P (b − a)` set against
/// the quadrature value of `|∫ g e(φ)|`.
pub fn jm_bound_probe(spec: &JmProbeSpec) -> Result<JmProbe> {
    let f1 = min_phase_derivative(&spec.integral);
    jm_bound_probe_with_f1(spec, f1)
}

/// As [`jm_bound_probe`] with an explicit lower bound `F₁` for `|φ′|`.
pub fn jm_bound_probe_with_f1(spec: &JmProbeSpec, f1: f64) -> Result<JmProbe> {
    if !(spec.g0 > 0.0 && spec.g1 > 0.0 && spec.rho > 0.0 && f1 > 0.0) {
        return Err(Error::Domain(format!(
            "bound needs positive G₀, G₁, ρ, F₁; got {}, {}, {}, {f1}",
            spec.g0, spec.g1, spec.rho
        )));
    }
    let lhs = oscillatory_integral(&spec.integral)?.norm();
    let (a, b) = spec.integral.weight.support();
    let p = spec.p as i32;
    let rhs = spec.g0 * (spec.g1 * f1).powi(-p) * (1.0 + spec.g1 / spec.rho).powi(p) * (b - a);
    Ok(JmProbe { lhs, rhs, f1 })
}
