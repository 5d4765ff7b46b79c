//! Fourier coefficients of level-one cusp forms.
//!
//! The only GL(2) form built in is the discriminant `Δ = q∏(1−q^k)^24`
//! (weight 12). Higher rank tables come from its symmetric-power lifts,
//! whose Satake parameters at `p` are `α^{n−1}, α^{n−3}, …, α^{1−n}`.

mod cache;
mod lift;
mod tau;

pub use lift::{
    complete_homogeneous, dual_table, satake_parameter, sym_lift_table, sym_prime_power,
    CoefficientTable,
};
pub use tau::{normalize_gl2, tau_table, tau_table_by_products, Gl2EigenSeries, TauTable, TAU_MAX};

use crate::{Error, Result};
use num_rational::Rational64;

/// Admissible exponent `ϑ` in `A(m,1,…,1) ≪ m^{ϑ+ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaBound {
    pub n_rank: u32,
    pub theta: Rational64,
}

impl ThetaBound {
    /// Holomorphic forms satisfy the Ramanujan bound.
    pub fn holomorphic() -> Self {
        ThetaBound {
            n_rank: 2,
            theta: Rational64::from_integer(0),
        }
    }

    pub fn as_f64(&self) -> f64 {
        *self.theta.numer() as f64 / *self.theta.denom() as f64
    }
}

/// Best known `ϑ` for Maass forms on GL(n).
pub fn theta_bound(n_rank: u32) -> Result<ThetaBound> {
    let theta = match n_rank {
        0 | 1 => {
            return Err(Error::Domain(format!(
                "theta bound needs n >= 2, got {n_rank}"
            )))
        }
        2 => Rational64::new(7, 64),
        3 => Rational64::new(5, 14),
        4 => Rational64::new(9, 22),
        n => {
            let n = n as i64;
            Rational64::new(1, 2) - Rational64::new(2, n * n + 1)
        }
    };
    Ok(ThetaBound { n_rank, theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert_eq!(theta_bound(2).unwrap().theta, Rational64::new(7, 64));
        assert_eq!(theta_bound(3).unwrap().theta, Rational64::new(5, 14));
        assert_eq!(theta_bound(4).unwrap().theta, Rational64::new(9, 22));
        assert_eq!(
            theta_bound(5).unwrap().theta,
            Rational64::new(1, 2) - Rational64::new(2, 26)
        );
        assert_eq!(ThetaBound::holomorphic().as_f64(), 0.0);
        assert!(theta_bound(1).is_err());
        for n in 5..40 {
            let t = theta_bound(n).unwrap().as_f64();
            assert!((0.0..0.5).contains(&t));
        }
    }
}
