//! Run parameters gathered from a flat `key = value` file and command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use crate::CliError;

/// Environment variable holding the default configuration file path.
pub const CONFIG_ENV: &str = "ACFREQ_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Single,
    Centroid,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Dicke,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

macro_rules! value_enum_display {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}

value_enum_display!(Kind, StateKind, Format);

/// Every tunable parameter. Unset fields fall back to the configuration file
/// and then to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunConfig {
    /// Signal frequency ω (single-frequency protocols).
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Centroid frequency ω_s.
    #[arg(long, global = true)]
    pub omega_s: Option<f64>,
    /// Half-separation frequency ω_r.
    #[arg(long, global = true)]
    pub omega_r: Option<f64>,
    /// Interrogation time (total field time for `coherent`).
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Amplitude standard deviation; comma-separated list for `fig2`/`fig3`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub n_qubits: Option<usize>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Parameter being estimated.
    #[arg(long, global = true)]
    pub kind: Option<Kind>,
    /// Probe state for `probe-qfi`.
    #[arg(long, global = true)]
    pub state: Option<StateKind>,
    /// Coherent field amplitude B.
    #[arg(long, global = true)]
    pub b_field: Option<f64>,
    /// Highest characteristic-function order compared by `montecarlo`.
    #[arg(long, global = true)]
    pub k_max: Option<u32>,
    /// Acceptance threshold: |z| for `montecarlo`, relative residual for `pulse-verify`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config key `{key}`: cannot parse `{value}`: {e}")))
}

impl RunConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// dashes and underscores in keys are interchangeable.
    pub fn from_flat(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "omega" => cfg.omega = Some(parse(&key, value)?),
                "omega_s" => cfg.omega_s = Some(parse(&key, value)?),
                "omega_r" => cfg.omega_r = Some(parse(&key, value)?),
                "t" => cfg.t = Some(parse(&key, value)?),
                "sigma" => {
                    let list = value
                        .split(',')
                        .map(|s| parse(&key, s.trim()))
                        .collect::<Result<Vec<f64>, _>>()?;
                    cfg.sigma = Some(list);
                }
                "n_qubits" => cfg.n_qubits = Some(parse(&key, value)?),
                "n_max" => cfg.n_max = Some(parse(&key, value)?),
                "seed" => cfg.seed = Some(parse(&key, value)?),
                "samples" => cfg.samples = Some(parse(&key, value)?),
                "kind" => cfg.kind = Some(parse(&key, value)?),
                "state" => cfg.state = Some(parse(&key, value)?),
                "b_field" => cfg.b_field = Some(parse(&key, value)?),
                "k_max" => cfg.k_max = Some(parse(&key, value)?),
                "tolerance" => cfg.tolerance = Some(parse(&key, value)?),
                "format" => cfg.format = Some(parse(&key, value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(CliError::Usage(format!("config line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_flat(&text)
    }

    /// Fills every unset field from `base`.
    pub fn or(self, base: Self) -> Self {
        Self {
            omega: self.omega.or(base.omega),
            omega_s: self.omega_s.or(base.omega_s),
            omega_r: self.omega_r.or(base.omega_r),
            t: self.t.or(base.t),
            sigma: self.sigma.or(base.sigma),
            n_qubits: self.n_qubits.or(base.n_qubits),
            n_max: self.n_max.or(base.n_max),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            kind: self.kind.or(base.kind),
            state: self.state.or(base.state),
            b_field: self.b_field.or(base.b_field),
            k_max: self.k_max.or(base.k_max),
            tolerance: self.tolerance.or(base.tolerance),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
        }
    }

    /// The single σ value, rejecting lists.
    pub fn sigma_scalar(&self, default: f64) -> Result<f64, CliError> {
        match self.sigma.as_deref() {
            None => Ok(default),
            Some([s]) => Ok(*s),
            Some(list) => Err(CliError::Usage(format!(
                "this command takes a single --sigma, got {} values",
                list.len()
            ))),
        }
    }
}
