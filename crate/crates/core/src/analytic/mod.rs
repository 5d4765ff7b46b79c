//! Gamma factors, Bessel functions, the leading-order Voronoi kernel and a
//! Mellin–Barnes oracle for the transform it approximates.

mod bessel;
mod gamma;
mod kernel;
mod mellin;
mod quotient;

pub use bessel::{bessel_j, bessel_j_asymptotic, bessel_j_series, series_limit};
pub use gamma::{
    bernoulli_numbers, complex_log_gamma, stirling_coefficients, stirling_eval,
    StirlingExpansion, STIRLING_MIN_MODULUS, STIRLING_SECTOR_MARGIN,
};
pub use kernel::{
    kernel_coefficient, kernel_form, kernel_leading, resonance_phase, KernelValue,
    KERNEL_ERROR_CONSTANT,
};
pub use mellin::{
    mellin_transform, omega_bessel, omega_contour, ContourValue, MellinContourSpec,
};
pub use quotient::{
    gamma_quotient, h_correction, log_gamma_quotient, log_reduced_quotient, reduced_quotient,
    SpectralParams, POLE_PROXIMITY,
};

/// Least-squares slope of `(x, y)` points.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
