//! Short twisted sums `Σ_{M ≤ m ≤ M+Δ} A(m) w(m) e(φ(m))` and the geometric sum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{tree_reduce, CompensatedSum};
use crate::weights::WeightSpec;
use crate::{e, e_mul, CoefficientTable, Error, Result};

/// Terms per parallel task. Fixed, so the reduction tree and hence every
/// bit of the result are independent of the thread count.
pub const SUM_CHUNK: usize = 8192;
/// Threshold on `|1 − e(θ)|` below which the geometric sum is summed directly.
pub const GEOMETRIC_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    /// `e(d^{1/n} m / M^{1−1/n})`.
    Linear,
    /// `e(n (dm)^{1/n})`, the twist that cancels the dual kernel phase of
    /// index `d`.
    Nonlinear,
    None,
}

#[derive(Debug, Clone, Copy)]
pub struct SumSpec<'a> {
    pub table: &'a CoefficientTable,
    pub m: f64,
    pub delta: f64,
    pub d: u64,
    pub twist: Twist,
    pub weight: Option<WeightSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: Complex64,
    pub terms: u64,
    /// Rounding bound of the compensated accumulation.
    pub accumulation_error: f64,
    /// `Σ |A(m) w(m)|` over the window.
    pub abs_sum: f64,
}

impl SumSpec<'_> {
    /// Integer range `[⌈M⌉, ⌊M+Δ⌋]`, empty when it contains no integer.
    pub fn range(&self) -> Option<(usize, usize)> {
        integer_range(self.m, self.delta)
    }

    /// Phase `φ(m)` of the twist, in turns.
    pub fn phase(&self, m: f64) -> f64 {
        let n = self.table.n_rank as f64;
        let d = self.d as f64;
        match self.twist {
            Twist::Linear => d.powf(1.0 / n) * m / self.m.powf(1.0 - 1.0 / n),
            Twist::Nonlinear => n * (d * m).powf(1.0 / n),
            Twist::None => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.delta >= 0.0 && self.m.is_finite() && self.delta.is_finite()) {
            return Err(Error::Domain(format!(
                "sum window needs M > 0 and Δ ≥ 0, got {} and {}",
                self.m, self.delta
            )));
        }
        if self.d == 0 {
            return Err(Error::Domain("twist index d must be positive".into()));
        }
        if let Some(w) = &self.weight {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
            if !(close(w.m, self.m) && close(w.delta, self.delta)) {
                return Err(Error::Domain(format!(
                    "weight window ({}, {}) differs from the sum window ({}, {})",
                    w.m, w.delta, self.m, self.delta
                )));
            }
        }
        let top = (self.m + self.delta).floor();
        if top > self.table.n_max() as f64 {
            return Err(Error::Range(format!(
                "window ends at {top} but the table stops at {}",
                self.table.n_max()
            )));
        }
        Ok(())
    }
}

fn integer_range(m: f64, delta: f64) -> Option<(usize, usize)> {
    let lo = m.ceil();
    let hi = (m + delta).floor();
    (lo <= hi).then_some((lo as usize, hi as usize))
}

pub fn exp_sum(spec: &SumSpec) -> Result<SumResult> {
    spec.validate()?;
    let Some((lo, hi)) = spec.range() else {
        return Ok(SumResult {
            value: Complex64::new(0.0, 0.0),
            terms: 0,
            accumulation_error: 0.0,
            abs_sum: 0.0,
        });
    };
    let twisted = spec.twist != Twist::None;
    let weight = spec.weight;
    Ok(sum_range(spec.table, lo, hi, |m| {
        let x = m as f64;
        let w = weight.map_or(1.0, |w| w.eval(x));
        if twisted {
            e(spec.phase(x)) * w
        } else {
            Complex64::new(w, 0.0)
        }
    }))
}

/// `Σ_{lo ≤ m ≤ hi} A(m) g(m)` in fixed chunks with compensated accumulation.
pub fn sum_range<G>(table: &CoefficientTable, lo: usize, hi: usize, g: G) -> SumResult
where
    G: Fn(usize) -> Complex64 + Sync,
{
    let coeffs = table.padded();
    let len = hi + 1 - lo;
    let parts: Vec<CompensatedSum> = (0..len.div_ceil(SUM_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = lo + c * SUM_CHUNK;
            let end = (start + SUM_CHUNK - 1).min(hi);
            let mut acc = CompensatedSum::new();
            for m in start..=end {
                let a = coeffs[m];
                if a != 0.0 {
                    acc.add(g(m) * a);
                } else {
                    acc.add(Complex64::new(0.0, 0.0));
                }
            }
            acc
        })
        .collect();
    let total = tree_reduce(parts);
    SumResult {
        value: total.value(),
        terms: len as u64,
        accumulation_error: total.error_bound(),
        abs_sum: total.abs_total(),
    }
}

/// `Σ_{0 ≤ h < Δ} e(θh)`.
pub fn geometric_sum(delta: u64, theta: f64) -> Complex64 {
    let denom = e(theta) - 1.0;
    if denom.norm() > GEOMETRIC_THRESHOLD {
        (e_mul(theta - theta.floor(), delta as f64) - 1.0) / denom
    } else {
        let mut acc = CompensatedSum::new();
        for h in 0..delta {
            acc.add(e_mul(theta, h as f64));
        }
        acc.value()
    }
}

/// `S(t) = Σ_{t ≤ m ≤ t+Δ−1} A(m)` for every integer `t ∈ [M, M+U]`, by a
/// sliding window with compensated updates.
pub fn windowed_plain_sums(
    table: &CoefficientTable,
    m: f64,
    delta: usize,
    span: usize,
) -> Result<Vec<f64>> {
    if !(m > 0.0 && m.is_finite()) || delta == 0 {
        return Err(Error::Domain(format!(
            "windowed sums need M > 0 and Δ ≥ 1, got {m} and {delta}"
        )));
    }
    let start = m.ceil() as usize;
    let last = start + span + delta - 1;
    if last > table.n_max() {
        return Err(Error::Range(format!(
            "windows reach {last} but the table stops at {}",
            table.n_max()
        )));
    }
    let a = table.padded();
    let mut acc = CompensatedSum::new();
    for &x in &a[start..start + delta] {
        acc.add_real(x);
    }
    let mut out = Vec::with_capacity(span + 1);
    out.push(acc.value().re);
    for t in start..start + span {
        acc.add_real(a[t + delta]);
        acc.add_real(-a[t]);
        out.push(acc.value().re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn tau_table(n_max: usize) -> CoefficientTable {
        let t = crate::forms::tau_table(n_max).unwrap();
        let g = crate::forms::normalize_gl2(&t, 12).unwrap();
        CoefficientTable::from_values(2, g.values(), true)
    }

    fn spec(table: &CoefficientTable, m: f64, delta: f64, twist: Twist) -> SumSpec<'_> {
        SumSpec {
            table,
            m,
            delta,
            d: 1,
            twist,
            weight: None,
        }
    }

    #[test]
    fn empty_and_counting() {
        let unit = CoefficientTable::unit(2, 100);
        let r = exp_sum(&spec(&unit, 10.2, 0.5, Twist::Linear)).unwrap();
        assert_eq!(r.terms, 0);
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        let r = exp_sum(&spec(&unit, 10.0, 10.0, Twist::None)).unwrap();
        assert_eq!(r.terms, 11);
        assert_eq!(r.value, Complex64::new(11.0, 0.0));
    }

    #[test]
    fn matches_naive_loop() {
        let table = tau_table(10_200);
        let r = exp_sum(&spec(&table, 1e4, 1e2, Twist::Linear)).unwrap();
        let mut naive = Complex64::new(0.0, 0.0);
        for m in 10_000..=10_100 {
            let ph = TAU * (m as f64) / 100.0;
            naive += Complex64::new(ph.cos(), ph.sin()) * table.get(m);
        }
        assert!((r.value - naive).norm() <= 1e-10 * naive.norm());
        assert!(r.value.norm() <= r.abs_sum * (1.0 + 1e-12));
        assert!(r.accumulation_error <= 1e-9 * r.abs_sum);
    }

    #[test]
    fn weight_and_range_checks() {
        let table = CoefficientTable::unit(3, 1000);
        let mut s = spec(&table, 100.0, 50.0, Twist::Nonlinear);
        s.weight = Some(WeightSpec::bump(100.0, 40.0).unwrap());
        assert!(matches!(exp_sum(&s), Err(Error::Domain(_))));
        s.weight = Some(WeightSpec::bump(100.0, 50.0).unwrap());
        assert!(exp_sum(&s).is_ok());
        let far = spec(&table, 990.0, 20.0, Twist::None);
        assert!(matches!(exp_sum(&far), Err(Error::Range(_))));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let table = tau_table(200_000);
        let mut s = spec(&table, 1e5, 9e4, Twist::Linear);
        s.weight = Some(WeightSpec::plateau(1e5, 9e4).unwrap());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| exp_sum(&s)).unwrap();
        let b = eight.install(|| exp_sum(&s)).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }

    #[test]
    fn linearity_in_the_table() {
        let t1 = tau_table(5000);
        let t2 = CoefficientTable::unit(2, 5000);
        let sum = t1.pointwise_add(&t2);
        let a = exp_sum(&spec(&t1, 3000.0, 1500.0, Twist::Linear)).unwrap().value;
        let b = exp_sum(&spec(&t2, 3000.0, 1500.0, Twist::Linear)).unwrap().value;
        let c = exp_sum(&spec(&sum, 3000.0, 1500.0, Twist::Linear)).unwrap().value;
        assert!((c - a - b).norm() <= 1e-12 * c.norm().max(a.norm()));
    }

    #[test]
    fn geometric_reference_values() {
        assert_eq!(geometric_sum(17, 0.0), Complex64::new(17.0, 0.0));
        let closed = geometric_sum(100_000, 0.01);
        let mut direct = CompensatedSum::new();
        for h in 0..100_000u64 {
            direct.add(e_mul(0.01, h as f64));
        }
        assert!((closed - direct.value()).norm() <= 1e-12 * direct.value().norm().max(1.0));
        let tiny = geometric_sum(1000, 1e-12);
        assert!((tiny - Complex64::new(1000.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn geometric_random_grid() {
        // θ on a 2^{−32} lattice keeps every θh exact in the oracle loop.
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let delta: u64 = rng.gen_range(1..=100_000);
            let theta = rng.gen_range(-3i64 << 32..3i64 << 32) as f64 / (1u64 << 32) as f64;
            let closed = geometric_sum(delta, theta);
            let mut direct = CompensatedSum::new();
            for h in 0..delta {
                direct.add(e(theta * h as f64));
            }
            let scale = direct.value().norm().max(1.0);
            assert!(
                (closed - direct.value()).norm() <= 1e-12 * scale,
                "Δ={delta} θ={theta} closed {closed} direct {}",
                direct.value()
            );
        }
    }

    #[test]
    fn windows() {
        let table = tau_table(3000);
        let w1 = windowed_plain_sums(&table, 100.0, 1, 50).unwrap();
        for (i, v) in w1.iter().enumerate() {
            assert_eq!(*v, table.get(100 + i));
        }
        let w = windowed_plain_sums(&table, 1000.0, 300, 1500).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let i = rng.gen_range(0..=1500usize);
            let t = 1000 + i;
            let direct = exp_sum(&spec(&table, t as f64, 299.0, Twist::None)).unwrap().value.re;
            assert!((w[i] - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
        assert!(windowed_plain_sums(&table, 1000.0, 300, 1702).is_err());
        assert!(windowed_plain_sums(&table, 1000.0, 300, 1701).is_ok());
    }

    proptest! {
        #[test]
        fn triangle_inequality(m in 1.0f64..4000.0, delta in 0.0f64..900.0, d in 1u64..5) {
            let table = CoefficientTable::from_values(
                2,
                &(1..=5000).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect::<Vec<_>>(),
                true,
            );
            let s = SumSpec { table: &table, m, delta, d, twist: Twist::Linear, weight: None };
            let r = exp_sum(&s).unwrap();
            prop_assert!(r.value.norm() <= r.abs_sum * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn short_geometric_sums_are_large(delta in 1u64..100_000, frac in 0.0f64..1.0) {
            let theta = 0.1 * frac / delta as f64;
            prop_assert!(geometric_sum(delta, theta).norm() >= 0.9 * delta as f64);
        }
    }
}
