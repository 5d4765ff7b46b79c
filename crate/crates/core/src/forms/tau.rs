use super::cache;
use crate::{Error, Result};
use std::path::Path;

/// Largest supported table length.
pub const TAU_MAX: usize = 2_000_000;

/// Exact values of Ramanujan's `τ(m)` for `1 ≤ m ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauTable {
    // values[m - 1] = τ(m)
    values: Vec<i128>,
}

impl TauTable {
    pub(crate) fn from_values(values: Vec<i128>) -> Self {
        TauTable { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `τ(m)`, 1-based.
    pub fn get(&self, m: usize) -> i128 {
        self.values[m - 1]
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }

    pub fn write_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        cache::write(path.as_ref(), &self.values)
    }

    pub fn read_cache(path: impl AsRef<Path>) -> Result<Self> {
        cache::read(path.as_ref()).map(TauTable::from_values)
    }

    /// Load from `path` when it holds at least `n_max` values, otherwise
    /// compute and (re)write it.
    pub fn load_or_build(path: impl AsRef<Path>, n_max: usize) -> Result<Self> {
        let path = path.as_ref();
        if let Ok(t) = Self::read_cache(path) {
            if t.n_max() >= n_max {
                return Ok(t.truncated(n_max));
            }
        }
        let t = tau_table(n_max)?;
        t.write_cache(path)?;
        Ok(t)
    }

    pub fn truncated(mut self, n_max: usize) -> Self {
        self.values.truncate(n_max);
        self
    }
}

/// Exponents and signed weights of the Jacobi series
/// `∏(1−q^k)^3 = Σ_{j≥0} (−1)^j (2j+1) q^{j(j+1)/2}` below `len`.
fn jacobi_terms(len: usize) -> Vec<(usize, i64)> {
    (0..)
        .map(|j: usize| (j * (j + 1) / 2, if j % 2 == 0 { 1 } else { -1 } * (2 * j as i64 + 1)))
        .take_while(|&(e, _)| e < len)
        .collect()
}

/// `out[m] = Σ_j c_j · dense[m − e_j]`, for all `m < dense.len()`.
///
/// When `max|dense| · Σ|c_j|` fits comfortably in `i128` no partial sum can
/// overflow and plain arithmetic is used; otherwise every step is checked.
fn sparse_mul(dense: &[i128], terms: &[(usize, i64)]) -> Result<Vec<i128>> {
    let len = dense.len();
    let mut out = vec![0i128; len];
    let max_abs = dense.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let weight: u128 = terms.iter().map(|&(_, c)| c.unsigned_abs() as u128).sum();
    let safe = max_abs
        .checked_mul(weight)
        .is_some_and(|b| b < (1u128 << 126));

    if max_abs < (1 << 62) && weight < (1 << 20) && safe && (max_abs * weight) < (1u128 << 62) {
        // Everything fits in i64.
        let small: Vec<i64> = dense.iter().map(|&v| v as i64).collect();
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = 0i64;
            for &(e, c) in terms {
                if e > m {
                    break;
                }
                acc += c * small[m - e];
            }
            *slot = acc as i128;
        }
    } else if safe {
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = 0i128;
            for &(e, c) in terms {
                if e > m {
                    break;
                }
                acc += c as i128 * dense[m - e];
            }
            *slot = acc;
        }
    } else {
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = 0i128;
            for &(e, c) in terms {
                if e > m {
                    break;
                }
                acc = (c as i128)
                    .checked_mul(dense[m - e])
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(Error::Overflow { index: m + 1 })?;
            }
            *slot = acc;
        }
    }
    Ok(out)
}

fn check_len(n_max: usize) -> Result<()> {
    if n_max == 0 || n_max > TAU_MAX {
        return Err(Error::Range(format!(
            "tau table length must be in [1, {TAU_MAX}], got {n_max}"
        )));
    }
    Ok(())
}

/// Exact `τ(m)` for `m ≤ n_max`, as the coefficient of `q^{m−1}` in
/// `P^8` where `P = ∏(1−q^k)^3` is the sparse Jacobi series.
///
/// `F = P^8` is generated by the power recurrence `P·F' = 8·P'·F`, i.e.
/// `k f_k = Σ_{j≥1} p_j (9 e_j − k) f_{k−e_j}`, run modulo two primes just
/// below `2^63` and recombined by CRT into the symmetric range
/// `±p₁p₂/2 ≈ ±2^125`. Each reconstructed value is checked against
/// `|τ(m)| ≤ 2m^6`; a violation means the true value left the range.
pub fn tau_table(n_max: usize) -> Result<TauTable> {
    check_len(n_max)?;
    let terms = jacobi_terms(n_max);
    let r1 = power_mod(&terms, n_max, PRIMES[0]);
    let r2 = power_mod(&terms, n_max, PRIMES[1]);

    let (p1, p2) = (PRIMES[0] as u128, PRIMES[1] as u128);
    let p1_inv = P1_INV_MOD_P2 as u128;
    let modulus = p1 * p2;
    let half = modulus / 2;
    let mut values = Vec::with_capacity(n_max);
    for (i, (&a, &b)) in r1.iter().zip(&r2).enumerate() {
        let diff = (b as u128 + p2 - (a as u128 % p2)) % p2;
        let t = diff * p1_inv % p2;
        let x = a as u128 + p1 * t;
        let v = if x > half {
            -((modulus - x) as i128)
        } else {
            x as i128
        };
        let m = (i + 1) as f64;
        if (v as f64).abs() > 2.0 * m.powi(6) * (1.0 + 1e-9) {
            return Err(Error::Overflow { index: i + 1 });
        }
        values.push(v);
    }
    Ok(TauTable::from_values(values))
}

const PRIMES: [u64; 2] = [9_223_372_036_854_775_783, 9_223_372_036_854_775_643];
const P1_INV_MOD_P2: u64 = 2_174_080_551_544_339_973;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

/// Coefficients `f_0..f_{len−1}` of `P^8 mod p`.
fn power_mod(terms: &[(usize, i64)], len: usize, p: u64) -> Vec<u64> {
    // inverses of 1..len modulo p
    let mut inv = vec![0u64; len.max(2)];
    inv[1] = 1;
    for i in 2..len {
        let q = p / i as u64;
        let r = (p % i as u64) as usize;
        inv[i] = mul_mod(p - q, inv[r], p);
    }
    // (exponent, 9·e_j·p_j, p_j) for j ≥ 1
    let scaled: Vec<(usize, i64, i64)> = terms[1..]
        .iter()
        .map(|&(e, c)| (e, 9 * e as i64 * c, c))
        .collect();

    // Terms with e_j ≥ BLOCK only read values from earlier blocks, so they
    // are applied block-wise as contiguous streams; the few short-range
    // terms are applied sequentially inside the block.
    const BLOCK: usize = 512;
    let split = scaled.partition_point(|t| t.0 < BLOCK);
    let (near, far) = scaled.split_at(split);

    let pi = p as i128;
    let mut f = vec![0u64; len];
    f[0] = 1;
    let mut acc = [0i128; BLOCK];
    let mut start = 1;
    while start < len {
        let end = (start + BLOCK).min(len);
        let acc = &mut acc[..end - start];
        acc.fill(0);
        for &(e, a, c) in far {
            if e >= end {
                break;
            }
            let lo = start.max(e);
            let src = &f[lo - e..end - e];
            for ((slot, &v), k) in acc[lo - start..].iter_mut().zip(src).zip(lo..) {
                *slot += ((a - k as i64 * c) as i128) * (v as i128);
            }
        }
        for k in start..end {
            let kk = k as i64;
            let mut s = acc[k - start];
            for &(e, a, c) in near {
                if e > k {
                    break;
                }
                s += ((a - kk * c) as i128) * (f[k - e] as i128);
            }
            f[k] = mul_mod(s.rem_euclid(pi) as u64, inv[k], p);
        }
        start = end;
    }
    f
}

/// Slower reference route: seven dense-by-sparse products over `i128`,
/// every step overflow-checked when no a priori bound rules it out.
pub fn tau_table_by_products(n_max: usize) -> Result<TauTable> {
    check_len(n_max)?;
    let terms = jacobi_terms(n_max);
    let mut power = vec![0i128; n_max];
    for &(e, c) in &terms {
        power[e] = c as i128;
    }
    for _ in 1..8 {
        power = sparse_mul(&power, &terms)?;
    }
    Ok(TauTable::from_values(power))
}

/// Normalised Hecke eigenvalues `a(m) = τ(m) / m^{(κ−1)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gl2EigenSeries {
    pub kappa: u32,
    // a[m - 1] = a(m)
    a: Vec<f64>,
}

impl Gl2EigenSeries {
    pub fn n_max(&self) -> usize {
        self.a.len()
    }

    pub fn get(&self, m: usize) -> f64 {
        self.a[m - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }
}

pub fn normalize_gl2(t: &TauTable, kappa: u32) -> Result<Gl2EigenSeries> {
    if kappa != 12 {
        return Err(Error::Unsupported(format!(
            "only the weight 12 discriminant is built in, got weight {kappa}"
        )));
    }
    let a = t
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v as f64 / ((i + 1) as f64).powf(5.5))
        .collect();
    Ok(Gl2EigenSeries { kappa, a })
}
