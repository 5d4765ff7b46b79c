//! Experiment driver for the `glnres` binary. Each experiment turns an
//! [`ExperimentConfig`] into a [`CsvReport`]; grid points run in parallel and
//! rows come out in grid order.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;

use gln_resonance::forms::{normalize_gl2, sym_lift_table, tau_table, TauTable};
use gln_resonance::CoefficientTable;
use thiserror::Error;

pub use config::{Experiment, ExperimentConfig, WeightShape, MAASS_PHASE_TOL};
pub use experiments::{
    omega_exhaustive_max, run, run_coeffs, run_kernel_check, run_nonlinear, run_omega_scan,
    run_recover, run_resonance,
};
pub use report::{Cell, CsvReport, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gln_resonance::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for accuracy failures, 3 for range and configuration errors, 1 for
    /// anything else.
    pub fn exit_code(&self) -> u8 {
        use gln_resonance::Error as E;
        match self {
            CliError::Core(E::Accuracy { .. }) => 2,
            CliError::Core(E::Range(_) | E::Domain(_)) | CliError::Config(_) => 3,
            _ => 1,
        }
    }
}

/// Coefficients of the built-in form of rank `n`: Δ for n = 2, its
/// symmetric square for n = 3 and symmetric cube for n = 4. Tau values come
/// from `tau_cache` when it holds enough of them and are written there
/// otherwise.
pub fn load_table(
    n_rank: u32,
    len: usize,
    tau_cache: Option<&Path>,
) -> Result<CoefficientTable, CliError> {
    let len = len.max(1);
    let tau = match tau_cache {
        Some(path) => TauTable::load_or_build(path, len)?,
        None => tau_table(len)?,
    };
    let g = normalize_gl2(&tau, 12)?;
    Ok(sym_lift_table(&g, n_rank, len)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let acc = CliError::Core(gln_resonance::Error::Accuracy {
            context: "x".into(),
            achieved: 1.0,
            requested: 0.1,
        });
        assert_eq!(acc.exit_code(), 2);
        assert_eq!(CliError::Core(gln_resonance::Error::Range("x".into())).exit_code(), 3);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
        assert_eq!(CliError::Core(gln_resonance::Error::Cache("x".into())).exit_code(), 1);
    }

    #[test]
    fn tables_by_rank() {
        let t2 = load_table(2, 10, None).unwrap();
        assert!((t2.get(2) - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
        let t3 = load_table(3, 10, None).unwrap();
        // A(p) = a(p)² − 1 for the symmetric square.
        assert!((t3.get(2) - (t2.get(2).powi(2) - 1.0)).abs() < 1e-14);
        assert_eq!(t3.n_rank, 3);
    }
}
