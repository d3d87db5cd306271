use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use transverse_core::dns::Scheme;
use transverse_core::scanner::Sector;
use transverse_core::spectral::Parity;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorArg {
    Full,
    Odd,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Sector {
        match s {
            SectorArg::Full => Sector::Full,
            SectorArg::Odd => Sector::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SchemeArg {
    SplittingOrder2,
    ExplicitRk4,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::SplittingOrder2 => Scheme::SplittingOrder2,
            SchemeArg::ExplicitRk4 => Scheme::ExplicitRk4,
        }
    }
}

/// Constraint level: a value, or a target peak amplitude resolved by
/// bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSpec {
    Value(f64),
    Amplitude(f64),
}

impl FromStr for TauSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(rest) = s.strip_prefix("auto:") {
            let a = rest
                .strip_prefix("amplitude=")
                .ok_or_else(|| format!("expected auto:amplitude=A, got {s:?}"))?;
            return a.parse().map(TauSpec::Amplitude).map_err(|e| format!("bad amplitude {a:?}: {e}"));
        }
        s.parse().map(TauSpec::Value).map_err(|e| format!("bad tau {s:?}: {e}"))
    }
}

impl<'de> Deserialize<'de> for TauSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(TauSpec::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Every flag is optional so that a config file can supply it. Config keys
/// are the flag names, with either dashes or underscores.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Nonlinearity power α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Frequency ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Spatial period L [default: 2π].
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
    /// Grid size N (even).
    #[arg(long)]
    pub modes: Option<usize>,
    /// Constraint level, or auto:amplitude=A.
    #[arg(long)]
    pub tau: Option<TauSpec>,
    /// Kernel threshold for eigenvalue counts [default: 1e-6 (1 + max|λ|)].
    #[arg(long)]
    pub zero_tolerance: Option<f64>,
    #[arg(long)]
    pub kappa_min: Option<f64>,
    #[arg(long)]
    pub kappa_max: Option<f64>,
    #[arg(long)]
    pub kappa_steps: Option<usize>,
    /// Eigenvalue sector [default: full for even waves, odd for odd waves].
    #[arg(long, value_enum)]
    pub sector: Option<SectorArg>,
    /// Transverse wavenumber for dns [default: most unstable on the scan].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// dns time step [default: from the spectral radius].
    #[arg(long)]
    pub dt: Option<f64>,
    /// dns final time [default: 40 / λ].
    #[arg(long)]
    pub final_time: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Random dns seed instead of the leading eigenvector.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read the wave from a stored profile instead of solving.
    #[arg(long)]
    pub wave: Option<PathBuf>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Options { $($field: $flags.$field.or($file.$field),)* config: None }
    };
}

impl Options {
    /// Fills unset flags from the config file, if one was given.
    pub fn merged(self) -> Result<Options, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let serde_json::Value::Object(map) = value else {
            return Err(CliError::Usage(format!("config {} must be a JSON object", path.display())));
        };
        let normalized: serde_json::Map<_, _> = map.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect();
        let file: Options = serde_json::from_value(serde_json::Value::Object(normalized))
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Ok(overlay!(
            self, file, alpha, omega, period, parity, modes, tau, zero_tolerance, kappa_min, kappa_max,
            kappa_steps, sector, kappa, dt, final_time, scheme, seed, wave, out, format
        ))
    }
}
