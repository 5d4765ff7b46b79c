use num_complex::Complex64;

/// Neumaier-compensated accumulator for complex values.
///
/// Real and imaginary parts are compensated independently. Two accumulators
/// can be merged, which is what the chunked parallel reductions rely on.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: [f64; 2],
    comp: [f64; 2],
    abs_total: f64,
    terms: u64,
}

#[inline]
fn two_sum_into(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        two_sum_into(&mut self.sum[0], &mut self.comp[0], z.re);
        two_sum_into(&mut self.sum[1], &mut self.comp[1], z.im);
        self.abs_total += z.norm();
        self.terms += 1;
    }

    #[inline]
    pub fn add_real(&mut self, x: f64) {
        two_sum_into(&mut self.sum[0], &mut self.comp[0], x);
        self.abs_total += x.abs();
        self.terms += 1;
    }

    /// Fold another accumulator into this one. The result depends on the
    /// order of merges, so callers fix that order.
    pub fn merge(&mut self, other: &CompensatedSum) {
        for i in 0..2 {
            two_sum_into(&mut self.sum[i], &mut self.comp[i], other.sum[i]);
            two_sum_into(&mut self.sum[i], &mut self.comp[i], other.comp[i]);
        }
        self.abs_total += other.abs_total;
        self.terms += other.terms;
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.sum[0] + self.comp[0], self.sum[1] + self.comp[1])
    }

    /// Sum of the moduli of all terms added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// A posteriori bound on the rounding error of [`value`](Self::value):
    /// `2u|S| + 4n u^2 Σ|x_i|` for unit roundoff `u`.
    pub fn error_bound(&self) -> f64 {
        let u = f64::EPSILON / 2.0;
        2.0 * u * self.value().norm() + 4.0 * (self.terms as f64) * u * u * self.abs_total
    }
}

/// Pairwise merge of per-chunk accumulators in index order.
pub(crate) fn tree_reduce(mut parts: Vec<CompensatedSum>) -> CompensatedSum {
    if parts.is_empty() {
        return CompensatedSum::new();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.chunks_exact(2);
        for pair in &mut it {
            let mut a = pair[0];
            a.merge(&pair[1]);
            next.push(a);
        }
        if let [last] = it.remainder() {
            next.push(*last);
        }
        parts = next;
    }
    parts[0]
}
