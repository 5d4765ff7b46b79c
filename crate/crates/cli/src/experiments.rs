//! The experiments behind the `glnres` subcommands.

use gln_resonance::analytic::{
    fit_slope, kernel_form, omega_contour, MellinContourSpec, SpectralParams,
};
use gln_resonance::forms::{dual_table, theta_bound};
use gln_resonance::predict::{
    main_term_constant, main_term_linear, main_term_nonlinear, MainTermResult, PhaseConvention,
};
use gln_resonance::sums::{exp_sum, windowed_plain_sums, SumSpec, Twist};
use gln_resonance::weights::WeightSpec;
use gln_resonance::{CoefficientTable, Complex64, Error};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, WeightShape, MAASS_PHASE_TOL};
use crate::report::{Cell, CsvReport};
use crate::{load_table, CliError};

/// Points of the omega scan over `c ∈ [1/2, 2]`.
pub const OMEGA_GRID: usize = 16;
/// Main integrals below this make coefficient recovery meaningless.
pub const DEGENERATE_INTEGRAL: f64 = 1e-12;

/// Validate `cfg` and run its experiment on a pool of `cfg.threads` workers.
pub fn run(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} threads: {e}", cfg.threads)))?;
    pool.install(|| match cfg.experiment {
        Experiment::Coeffs => run_coeffs(cfg),
        Experiment::Resonance => run_resonance(cfg),
        Experiment::Nonlinear => run_nonlinear(cfg),
        Experiment::Kernel => run_kernel_check(cfg),
        Experiment::OmegaScan => run_omega_scan(cfg),
        Experiment::Recover => run_recover(cfg),
    })
}

fn table_for(cfg: &ExperimentConfig) -> Result<CoefficientTable, CliError> {
    load_table(cfg.n_rank, cfg.required_table_len(), cfg.tau_cache.as_deref())
}

fn weight(shape: WeightShape, m: f64, delta: f64) -> Result<WeightSpec, CliError> {
    Ok(match shape {
        WeightShape::Bump => WeightSpec::bump(m, delta)?,
        WeightShape::Plateau => WeightSpec::plateau(m, delta)?,
    })
}

fn grid(cfg: &ExperimentConfig) -> Vec<(f64, u64)> {
    cfg.m_list
        .iter()
        .flat_map(|&m| cfg.d_list.iter().map(move |&d| (m, d)))
        .collect()
}

/// `n, m, coefficient` for `m ≤ max M`.
pub fn run_coeffs(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    let table = table_for(cfg)?;
    let mut report = CsvReport::new("coeffs", &["n", "m", "coefficient"]);
    for (i, &a) in table.values().iter().enumerate() {
        report.push(vec![cfg.n_rank.into(), ((i + 1) as u64).into(), a.into()]);
    }
    Ok(report)
}

const RESONANCE_HEADER: [&str; 13] = [
    "n",
    "M",
    "Delta",
    "d",
    "re_sum",
    "im_sum",
    "re_main",
    "im_main",
    "abs_ratio",
    "arg_diff",
    "budget",
    "within_budget",
    "applicable",
];

struct ResonanceRow {
    m: f64,
    delta: f64,
    d: u64,
    sum: Complex64,
    main: MainTermResult,
    applicable: bool,
}

impl ResonanceRow {
    fn ratio(&self) -> Complex64 {
        if self.applicable {
            self.sum / self.main.value
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        }
    }

    fn cells(&self, n: u32) -> Vec<Cell> {
        let r = self.ratio();
        vec![
            n.into(),
            self.m.into(),
            self.delta.into(),
            self.d.into(),
            self.sum.re.into(),
            self.sum.im.into(),
            self.main.value.re.into(),
            self.main.value.im.into(),
            r.norm().into(),
            r.arg().into(),
            self.main.error_budget.into(),
            ((self.sum - self.main.value).norm() <= self.main.error_budget).into(),
            self.applicable.into(),
        ]
    }
}

fn resonance_rows(cfg: &ExperimentConfig, twist: Twist) -> Result<Vec<ResonanceRow>, CliError> {
    let table = table_for(cfg)?;
    let dual = dual_table(&table)?;
    let n = cfg.n_rank;
    grid(cfg)
        .into_par_iter()
        .map(|(m, d)| {
            let delta = cfg.delta(m);
            let w = weight(cfg.weight, m, delta)?;
            let sum = exp_sum(&SumSpec {
                table: &table,
                m,
                delta,
                d,
                twist,
                weight: Some(w),
            })?
            .value;
            let main = match twist {
                Twist::Nonlinear => main_term_nonlinear(&dual, &w, d, n, PhaseConvention::Derived)?,
                _ => main_term_linear(&dual, &w, d, n, PhaseConvention::Derived)?,
            };
            // A vanishing dual coefficient leaves no main term to compare with.
            let applicable = dual.get(d as usize) != 0.0;
            Ok(ResonanceRow {
                m,
                delta,
                d,
                sum,
                main,
                applicable,
            })
        })
        .collect()
}

fn resonance_report(
    cfg: &ExperimentConfig,
    name: &str,
    twist: Twist,
) -> Result<CsvReport, CliError> {
    let rows = resonance_rows(cfg, twist)?;
    if cfg.assume_maass_phase && cfg.n_rank == 2 {
        check_phase(&rows)?;
    }
    let mut report = CsvReport::new(name, &RESONANCE_HEADER);
    for row in &rows {
        report.push(row.cells(cfg.n_rank));
    }
    Ok(report)
}

/// Accuracy error at the first applicable row whose phase misses the main
/// term's by more than [`MAASS_PHASE_TOL`].
fn check_phase(rows: &[ResonanceRow]) -> Result<(), CliError> {
    match rows
        .iter()
        .find(|r| r.applicable && r.ratio().arg().abs() > MAASS_PHASE_TOL)
    {
        Some(row) => Err(Error::Accuracy {
            context: format!("main-term phase at M = {}, d = {}", row.m, row.d),
            achieved: row.ratio().arg().abs(),
            requested: MAASS_PHASE_TOL,
        }
        .into()),
        None => Ok(()),
    }
}

/// Weighted linearly twisted sums against their resonant main terms.
pub fn run_resonance(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    resonance_report(cfg, "resonance", Twist::Linear)
}

/// As [`run_resonance`] with the twist `e(n(dm)^{1/n})`.
pub fn run_nonlinear(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    resonance_report(cfg, "nonlinear", Twist::Nonlinear)
}

/// Contour value of `Ω(y)` against the leading kernel form on a window over
/// `[1, 2]` with `λ = 0`, and the fitted decay slope of the residual.
pub fn run_kernel_check(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    let n = cfg.n_rank;
    let f = weight(cfg.weight, 1.0, 1.0)?;
    let params = SpectralParams::zero(n)?;
    let values: Vec<(f64, Complex64, Complex64, f64)> = cfg
        .y_list
        .par_iter()
        .map(|&y| {
            let contour = omega_contour(&f, y, &params, &MellinContourSpec::auto(&f, y, n))?;
            let kernel = kernel_form(&f, y, n)?;
            Ok((y, contour.value, kernel, contour.tail_estimate))
        })
        .collect::<Result<_, CliError>>()?;
    let residual = |c: Complex64, k: Complex64| {
        if k == Complex64::new(0.0, 0.0) {
            (c - k).norm()
        } else {
            (c - k).norm() / k.norm()
        }
    };
    let points: Vec<(f64, f64)> = values
        .iter()
        .map(|&(y, c, k, _)| (y.ln(), residual(c, k).ln()))
        .filter(|p| p.1.is_finite())
        .collect();
    let slope = if points.len() >= 2 {
        fit_slope(&points)
    } else {
        f64::NAN
    };
    let mut report = CsvReport::new(
        "kernel",
        &[
            "n",
            "y",
            "re_contour",
            "im_contour",
            "re_kernel",
            "im_kernel",
            "residual",
            "tail_estimate",
            "slope",
            "predicted_slope",
        ],
    );
    for &(y, c, k, tail) in &values {
        report.push(vec![
            n.into(),
            y.into(),
            c.re.into(),
            c.im.into(),
            k.re.into(),
            k.im.into(),
            residual(c, k).into(),
            tail.into(),
            slope.into(),
            (-1.0 / n as f64).into(),
        ]);
    }
    Ok(report)
}

/// `|Σ_{M ≤ m ≤ M+Δ} A(m) e(d^{1/n} m / M^{1−1/n})| / M^{1/2}`, unweighted.
fn twisted_scale(table: &CoefficientTable, m: f64, delta: f64, d: u64) -> Result<f64, CliError> {
    let s = exp_sum(&SumSpec {
        table,
        m,
        delta,
        d,
        twist: Twist::Linear,
        weight: None,
    })?;
    Ok(s.value.norm() / m.sqrt())
}

/// Largest `|S|/M^{1/2}` over every integer `Δ ∈ [U/2, 2U]`, `U = M^{1−1/(2n)}`,
/// with the `Δ` where it occurs.
pub fn omega_exhaustive_max(
    table: &CoefficientTable,
    m: f64,
    d: u64,
) -> Result<(f64, f64), CliError> {
    let u = m.powf(1.0 - 0.5 / table.n_rank as f64);
    let lo = (0.5 * u).ceil() as u64;
    let hi = (2.0 * u).floor() as u64;
    let values: Vec<(f64, f64)> = (lo..=hi)
        .into_par_iter()
        .map(|delta| Ok((twisted_scale(table, m, delta as f64, d)?, delta as f64)))
        .collect::<Result<_, CliError>>()?;
    Ok(values
        .into_iter()
        .fold((f64::MIN, 0.0), |best, v| if v.0 > best.0 { v } else { best }))
}

/// Twisted sums over `Δ = c M^{1−1/(2n)}` on a 16-point grid of `c ∈ [1/2, 2]`
/// and the largest plain window sum of length `Δ′ = M^{0.4(1/2−ϑ)}` over
/// starts in `[M, M + M^{1−1/(2n)}]`.
pub fn run_omega_scan(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    let table = table_for(cfg)?;
    let n = cfg.n_rank;
    let theta = theta_bound(n)?.as_f64();
    let mut report = CsvReport::new(
        "omega-scan",
        &["n", "M", "d", "scan", "c", "Delta", "t", "value"],
    );
    for (m, d) in grid(cfg) {
        let u = cfg.boundary(m);
        let cs: Vec<f64> = (0..OMEGA_GRID)
            .map(|i| 0.5 + 1.5 * i as f64 / (OMEGA_GRID - 1) as f64)
            .collect();
        let values: Vec<f64> = cs
            .par_iter()
            .map(|&c| twisted_scale(&table, m, (c * u).floor(), d))
            .collect::<Result<_, CliError>>()?;
        let start = m.ceil();
        let mut best = 0;
        for (i, (&c, &v)) in cs.iter().zip(&values).enumerate() {
            if v > values[best] {
                best = i;
            }
            report.push(vec![
                n.into(),
                m.into(),
                d.into(),
                "twisted".into(),
                c.into(),
                (c * u).floor().into(),
                start.into(),
                v.into(),
            ]);
        }
        report.push(vec![
            n.into(),
            m.into(),
            d.into(),
            "twisted_max".into(),
            cs[best].into(),
            (cs[best] * u).floor().into(),
            start.into(),
            values[best].into(),
        ]);

        let short = m.powf(0.4 * (0.5 - theta)).floor().max(1.0) as usize;
        let sums = windowed_plain_sums(&table, m, short, u.floor() as usize)?;
        let (at, peak) = sums
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |b, (i, s)| if s.abs() > b.1 { (i, s.abs()) } else { b });
        let scale = short as f64 * m.powf(0.5 / n as f64 - 0.5);
        report.push(vec![
            n.into(),
            m.into(),
            d.into(),
            "plain_max".into(),
            f64::NAN.into(),
            (short as f64).into(),
            (start + at as f64).into(),
            (peak / scale).into(),
        ]);
    }
    Ok(report)
}

/// `A(1,…,1,d)` estimated as the weighted sum over its main term without the
/// coefficient, against the dual table.
pub fn run_recover(cfg: &ExperimentConfig) -> Result<CsvReport, CliError> {
    let table = table_for(cfg)?;
    let dual = dual_table(&table)?;
    let n = cfg.n_rank;
    let rows: Vec<Vec<Cell>> = grid(cfg)
        .into_par_iter()
        .map(|(m, d)| {
            let delta = cfg.delta(m);
            let w = weight(cfg.weight, m, delta)?;
            let sum = exp_sum(&SumSpec {
                table: &table,
                m,
                delta,
                d,
                twist: Twist::Linear,
                weight: Some(w),
            })?
            .value;
            let main = main_term_linear(&dual, &w, d, n, PhaseConvention::Derived)?;
            if main.integral.norm() < DEGENERATE_INTEGRAL {
                return Err(Error::Degenerate(format!(
                    "main integral {:.3e} at M = {m}, Δ = {delta}, d = {d}",
                    main.integral.norm()
                ))
                .into());
            }
            let estimate = sum / (main.integral * main_term_constant(1.0, d, n, PhaseConvention::Derived));
            let truth = dual.get(d as usize);
            let rel_error = (estimate - truth).norm() / truth.abs();
            Ok(vec![
                n.into(),
                m.into(),
                delta.into(),
                d.into(),
                estimate.re.into(),
                estimate.im.into(),
                truth.into(),
                rel_error.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut report = CsvReport::new(
        "recover",
        &["n", "M", "Delta", "d", "re_estimate", "im_estimate", "truth", "rel_error"],
    );
    for row in rows {
        report.push(row);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gln_resonance::sums::geometric_sum;

    fn cfg(experiment: Experiment, n: u32, m: &[f64], gamma: f64, d: &[u64]) -> ExperimentConfig {
        ExperimentConfig {
            n_rank: n,
            m_list: m.to_vec(),
            gamma,
            d_list: d.to_vec(),
            ..ExperimentConfig::new(experiment)
        }
    }

    #[test]
    fn resonance_rows_follow_the_grid() {
        let c = cfg(Experiment::Resonance, 2, &[2e4, 1e4], 0.8, &[1, 2]);
        let r = run(&c).unwrap();
        assert_eq!(r.header, RESONANCE_HEADER.to_vec());
        assert_eq!(r.column("M").unwrap(), vec![2e4, 2e4, 1e4, 1e4]);
        assert_eq!(r.column("d").unwrap(), vec![1.0, 2.0, 1.0, 2.0]);
        assert_eq!(r.column("Delta").unwrap()[2], 1e4f64.powf(0.8).floor());
        for ratio in r.column("abs_ratio").unwrap() {
            assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
        }
    }

    fn row(sum: Complex64, main: MainTermResult, applicable: bool) -> ResonanceRow {
        ResonanceRow {
            m: 1.0,
            delta: 2.0,
            d: 2,
            sum,
            main,
            applicable,
        }
    }

    #[test]
    fn maass_phase_flag() {
        let mut c = cfg(Experiment::Resonance, 2, &[1e5], 0.75, &[1]);
        c.assume_maass_phase = true;
        run(&c).unwrap();

        let w = WeightSpec::bump(1e4, 1e3).unwrap();
        let table = load_table(2, 12_000, None).unwrap();
        let main = main_term_linear(&table, &w, 1, 2, PhaseConvention::Derived).unwrap();
        let close = row(main.value * gln_resonance::e(0.02), main, true);
        let off = row(main.value * gln_resonance::e(0.1), main, true);
        check_phase(&[close]).unwrap();
        assert_eq!(check_phase(&[off]).unwrap_err().exit_code(), 2);
        let ignored = row(main.value * gln_resonance::e(0.1), main, false);
        check_phase(&[ignored]).unwrap();
    }

    #[test]
    fn nonlinear_main_term_carries_only_the_prefactor_phase() {
        let mut c = cfg(Experiment::Nonlinear, 2, &[2e5], 0.7, &[1]);
        let a = run(&c).unwrap();
        c.gamma = 0.8;
        let b = run(&c).unwrap();
        for r in [&a, &b] {
            let main = Complex64::new(r.column("re_main").unwrap()[0], r.column("im_main").unwrap()[0]);
            let phase = main / main.norm();
            let expected = gln_resonance::analytic::resonance_phase(2);
            assert!((phase - expected).norm() < 1e-12);
        }
        let da = a.column("arg_diff").unwrap()[0];
        let db = b.column("arg_diff").unwrap()[0];
        assert!((da - db).abs() < 0.1, "{da} {db}");
    }

    #[test]
    fn zero_dual_coefficient_is_flagged() {
        let table = CoefficientTable::from_values(2, &[1.0, 0.0, 1.0], true);
        let w = WeightSpec::bump(1.0, 2.0).unwrap();
        let main = main_term_linear(&table, &w, 2, 2, PhaseConvention::Derived).unwrap();
        assert_eq!(main.value, Complex64::new(0.0, 0.0));
        let cells = row(Complex64::new(0.1, 0.0), main, false).cells(2);
        assert_eq!(cells[12], Cell::Flag(false));
        assert!(cells[8].as_f64().unwrap().is_nan());
    }

    #[test]
    fn kernel_report_for_rank_two() {
        let mut c = cfg(Experiment::Kernel, 2, &[1.0], 0.75, &[1]);
        c.y_list = vec![1e2, 1e3];
        let r = run(&c).unwrap();
        for res in r.column("residual").unwrap() {
            assert!(res < 1e-2, "{res}");
        }
        let slope = r.column("slope").unwrap()[0];
        assert!((slope + 0.5).abs() < 0.6, "{slope}");
    }

    #[test]
    fn omega_scan_on_the_unit_table_is_the_geometric_sum() {
        let table = CoefficientTable::unit(2, 20_000);
        let m: f64 = 1e4;
        let u = m.powf(0.75);
        for c in [0.5, 1.1, 2.0] {
            let delta = (c * u).floor();
            let got = twisted_scale(&table, m, delta, 1).unwrap();
            // Σ_{M ≤ k ≤ M+Δ} e(k/√M) = e(M/√M) Σ_{0 ≤ h ≤ Δ} e(h/√M).
            let g = geometric_sum(delta as u64 + 1, 1.0 / m.sqrt()).norm() / m.sqrt();
            assert!((got - g).abs() <= 1e-12 * g, "{got} {g}");
        }
    }

    #[test]
    fn omega_scan_rows() {
        let c = cfg(Experiment::OmegaScan, 2, &[1e4], 0.75, &[1]);
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), OMEGA_GRID + 2);
        let values = r.column("value").unwrap();
        let max = values[..OMEGA_GRID].iter().cloned().fold(0.0, f64::max);
        assert_eq!(values[OMEGA_GRID], max);
        assert!(values[OMEGA_GRID + 1] > 0.0);
        let table = load_table(2, 20_000, None).unwrap();
        let (exhaustive, _) = omega_exhaustive_max(&table, 1e4, 1).unwrap();
        assert!(exhaustive >= max);
    }

    #[test]
    fn recover_d_one_gives_one() {
        let c = cfg(Experiment::Recover, 2, &[3e5], 0.75, &[1]);
        let r = run(&c).unwrap();
        assert_eq!(r.column("truth").unwrap()[0], 1.0);
        assert!(r.column("rel_error").unwrap()[0] < 0.1);
    }

    #[test]
    fn coeffs_lists_the_table() {
        let c = cfg(Experiment::Coeffs, 2, &[5.0], 0.75, &[1]);
        let r = run(&c).unwrap();
        assert_eq!(r.column("m").unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let a = r.column("coefficient").unwrap();
        assert!((a[2] - 252.0 / 3f64.powf(5.5)).abs() < 1e-15);
    }

    #[test]
    fn reports_do_not_depend_on_the_thread_count() {
        let mut c = cfg(Experiment::Resonance, 3, &[1e4, 3e4], 0.75, &[1, 2]);
        c.threads = 1;
        let one = run(&c).unwrap().to_csv();
        c.threads = 5;
        assert_eq!(one, run(&c).unwrap().to_csv());
    }
}
