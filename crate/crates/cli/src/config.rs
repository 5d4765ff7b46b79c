//! Experiment configuration: defaults, a plain `key = value` file format
//! mirroring the command-line flags, and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gln_resonance::forms::TAU_MAX;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Coeffs,
    Resonance,
    Nonlinear,
    Kernel,
    OmegaScan,
    Recover,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coeffs => "coeffs",
            Experiment::Resonance => "resonance",
            Experiment::Nonlinear => "nonlinear",
            Experiment::Kernel => "kernel",
            Experiment::OmegaScan => "omega-scan",
            Experiment::Recover => "recover",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "coeffs" => Experiment::Coeffs,
            "resonance" => Experiment::Resonance,
            "nonlinear" => Experiment::Nonlinear,
            "kernel" => Experiment::Kernel,
            "omega-scan" | "omega_scan" => Experiment::OmegaScan,
            "recover" => Experiment::Recover,
            _ => return Err(CliError::Config(format!("unknown experiment `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightShape {
    Bump,
    Plateau,
}

impl FromStr for WeightShape {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "bump" => Ok(WeightShape::Bump),
            "plateau" => Ok(WeightShape::Plateau),
            _ => Err(CliError::Config(format!(
                "weight must be `bump` or `plateau`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_rank: u32,
    /// Window starts `M`. For `coeffs` the largest entry is the table length.
    pub m_list: Vec<f64>,
    /// Window length exponent: `Δ = ⌊M^γ⌋`.
    pub gamma: f64,
    pub d_list: Vec<u64>,
    pub weight: WeightShape,
    /// Kernel-check arguments `y`.
    pub y_list: Vec<f64>,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Seed for randomized grids. The built-in grids are fixed, so no
    /// experiment reads it yet.
    pub seed: u64,
    pub tau_cache: Option<PathBuf>,
    /// For n = 2, fail with an accuracy error when a resonance row's phase
    /// differs from the main term's by more than [`MAASS_PHASE_TOL`].
    pub assume_maass_phase: bool,
}

/// Largest accepted `|arg(sum/main)|` under `assume_maass_phase`, radians.
pub const MAASS_PHASE_TOL: f64 = 0.25;

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            n_rank: 2,
            m_list: vec![1e5],
            gamma: 0.75,
            d_list: vec![1],
            weight: WeightShape::Bump,
            y_list: vec![1e2, 1e3, 1e4],
            out: None,
            threads: 0,
            seed: 0,
            tau_cache: None,
            assume_maass_phase: false,
        }
    }

    /// `⌊M^γ⌋`.
    pub fn delta(&self, m: f64) -> f64 {
        m.powf(self.gamma).floor()
    }

    /// `M^{1−1/(2n)}`, the regime boundary and the omega-scan length unit.
    pub fn boundary(&self, m: f64) -> f64 {
        m.powf(1.0 - 0.5 / self.n_rank as f64)
    }

    /// Number of coefficients the experiment reads.
    pub fn required_table_len(&self) -> usize {
        let d_max = self.d_list.iter().copied().max().unwrap_or(1) as usize;
        let m_max = self.m_list.iter().copied().fold(0.0, f64::max);
        let reach = |end: f64| end.floor() as usize + 1;
        match self.experiment {
            Experiment::Coeffs => m_max as usize,
            Experiment::Kernel => 0,
            Experiment::Resonance | Experiment::Nonlinear | Experiment::Recover => self
                .m_list
                .iter()
                .map(|&m| reach(m + self.delta(m)))
                .max()
                .unwrap_or(0)
                .max(d_max),
            Experiment::OmegaScan => self
                .m_list
                .iter()
                .map(|&m| {
                    let u = self.boundary(m);
                    // The plain windows reach M + U + Δ′ − 1 ≤ M + 2U.
                    reach(m + 2.0 * u)
                })
                .max()
                .unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.n_rank;
        if !(2..=4).contains(&n) {
            return Err(CliError::Config(format!(
                "n must be 2, 3 or 4 (Δ and its symmetric square and cube), got {n}"
            )));
        }
        let lo = 0.5 - 0.5 / n as f64;
        // The slack admits the endpoint written as a rounded decimal or 1/3.
        if !(self.gamma >= lo - 1e-12 && self.gamma <= 1.0) {
            return Err(CliError::Config(format!(
                "γ must lie in [{lo}, 1] for n = {n}, got {}",
                self.gamma
            )));
        }
        if self.m_list.is_empty() {
            return Err(CliError::Config("at least one M is required".into()));
        }
        if let Some(m) = self.m_list.iter().find(|m| !(m.is_finite() && **m >= 1.0)) {
            return Err(CliError::Config(format!("M must be ≥ 1, got {m}")));
        }
        if self.d_list.is_empty() || self.d_list.contains(&0) {
            return Err(CliError::Config("d values must be ≥ 1".into()));
        }
        if self.experiment == Experiment::Kernel {
            if let Some(y) = self.y_list.iter().find(|y| !(y.is_finite() && **y >= 1.0)) {
                return Err(CliError::Config(format!("y must be ≥ 1, got {y}")));
            }
        }
        let len = self.required_table_len();
        if len > TAU_MAX {
            return Err(CliError::Config(format!(
                "the windows need {len} coefficients, above the table limit {TAU_MAX}"
            )));
        }
        Ok(())
    }

    /// Apply one `key = value` setting. List keys append.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "n" => self.n_rank = parse(key, value)?,
            "M" => self.m_list.extend(parse_list::<f64>(key, value)?),
            "gamma" => self.gamma = parse(key, value)?,
            "d" => self.d_list.extend(parse_list::<u64>(key, value)?),
            "y" => self.y_list.extend(parse_list::<f64>(key, value)?),
            "weight" => self.weight = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => self.threads = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "tau-cache" | "tau_cache" => self.tau_cache = Some(PathBuf::from(value)),
            "assume-maass-phase" | "assume_maass_phase" => {
                self.assume_maass_phase = parse(key, value)?
            }
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Read a config file. A list key given in the file replaces the
    /// default list; repeated lines append to it.
    pub fn from_file(path: &Path, experiment: Experiment) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, experiment)
    }

    pub fn from_text(text: &str, experiment: Experiment) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::new(experiment);
        let mut cleared = [false; 3];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`, got `{raw}`", i + 1))
            })?;
            let slot = match key.trim() {
                "M" => Some(0),
                "d" => Some(1),
                "y" => Some(2),
                _ => None,
            };
            if let Some(k) = slot {
                if !cleared[k] {
                    cleared[k] = true;
                    match k {
                        0 => cfg.m_list.clear(),
                        1 => cfg.d_list.clear(),
                        _ => cfg.y_list.clear(),
                    }
                }
            }
            cfg.set(key, value)
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse(key, v))
        .collect()
}
