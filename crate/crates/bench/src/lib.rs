//! Fixtures shared by the benchmarks.

use gln_resonance::forms::{normalize_gl2, sym_lift_table, tau_table};
use gln_resonance::CoefficientTable;

/// Normalised coefficients of Δ (`n_rank = 2`) or its symmetric square
/// (`n_rank = 3`) up to `len`.
pub fn fixture_table(n_rank: u32, len: usize) -> CoefficientTable {
    let tau = tau_table(len).expect("tau table");
    let g = normalize_gl2(&tau, 12).expect("normalisation");
    sym_lift_table(&g, n_rank - 1, len).expect("lift")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_starts_with_one() {
        let t = fixture_table(3, 100);
        assert_eq!(t.n_max(), 100);
        assert!((t.get(1) - 1.0).abs() < 1e-15);
    }
}
