//! Study configuration: a flat `key = value` file with command-line
//! overrides applied on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fembem_core::bem::BemOptions;
use fembem_core::coupling::CouplingOptions;
use fembem_core::solver::SolverKind;
use thiserror::Error;

/// Keys accepted in config files and `--set` overrides.
pub const KEYS: [&str; 14] = [
    "case",
    "k_multiplier",
    "degrees",
    "levels",
    "first_level",
    "mode",
    "solver",
    "output_dir",
    "singular_order",
    "near_order",
    "far_order",
    "near_ratio",
    "load_order_extra",
    "error_order",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found '{text}'")]
    Syntax { line: usize, text: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("key '{0}' given twice")]
    Duplicate(String),
    #[error("invalid value '{value}' for '{key}': {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    /// Plane wave inside, point source outside, on the unit cube.
    Tc1,
    /// Piecewise diffusion coefficient on a region-conforming mesh.
    Tc2,
    /// Polynomial interior field reproduced exactly for `p >= 2`.
    PolyExact,
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tc1 => "tc1",
            Self::Tc2 => "tc2",
            Self::PolyExact => "poly-exact",
        })
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tc1" => Ok(Self::Tc1),
            "tc2" => Ok(Self::Tc2),
            "poly-exact" => Ok(Self::PolyExact),
            _ => Err("expected tc1, tc2 or poly-exact".into()),
        }
    }
}

/// Which refinement the rates and checks follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Rates over mesh levels at fixed degree.
    HVersion,
    /// Degrees on each fixed mesh; errors must decrease strictly in `p`.
    PVersion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HVersion => "h-version",
            Self::PVersion => "p-version",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "h-version" => Ok(Self::HVersion),
            "p-version" => Ok(Self::PVersion),
            _ => Err("expected h-version or p-version".into()),
        }
    }
}

/// A validated study: the meshes are levels `first_level..first_level + levels`
/// of the case's base mesh, each run with every degree.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub case: CaseName,
    /// `k = k_multiplier * sqrt(3) * pi`.
    pub k_multiplier: f64,
    pub degrees: Vec<usize>,
    pub levels: usize,
    pub first_level: usize,
    pub mode: Mode,
    pub solver: SolverKind,
    pub output_dir: PathBuf,
    pub coupling: CouplingOptions,
    /// Overrides the default error quadrature order.
    pub error_order: Option<usize>,
}

impl StudyConfig {
    pub fn wavenumber(&self) -> f64 {
        self.k_multiplier * 3f64.sqrt() * std::f64::consts::PI
    }

    pub fn level_range(&self) -> std::ops::Range<usize> {
        self.first_level..self.first_level + self.levels
    }

    /// File stem of the study's CSV, e.g. `tc1_k1.5_h-version`.
    pub fn stem(&self) -> String {
        format!("{}_k{}_{}", self.case, self.k_multiplier, self.mode)
    }

    /// Parses config file text and applies `key=value` overrides.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut seen = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                split_pair(line).ok_or_else(|| ConfigError::Syntax { line: i + 1, text: line.into() })?;
            if seen.contains(&key) {
                return Err(ConfigError::Duplicate(key.into()));
            }
            seen.push(key);
            raw.set(key, value)?;
        }
        for o in overrides {
            let (key, value) = split_pair(o).ok_or_else(|| ConfigError::Syntax { line: 0, text: o.clone() })?;
            raw.set(key, value)?;
        }
        raw.validate()
    }

    pub fn from_file(path: &Path, overrides: &[String]) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading config {}: {e}", path.display()))?;
        Ok(Self::parse(&text, overrides)?)
    }
}

impl Default for StudyConfig {
    fn default() -> Self {
        RawConfig::default().validate().expect("defaults are valid")
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

#[derive(Default)]
struct RawConfig {
    case: Option<CaseName>,
    k_multiplier: Option<f64>,
    degrees: Option<Vec<usize>>,
    levels: Option<usize>,
    first_level: Option<usize>,
    mode: Option<Mode>,
    solver: Option<SolverKind>,
    output_dir: Option<PathBuf>,
    singular_order: Option<usize>,
    near_order: Option<usize>,
    far_order: Option<usize>,
    near_ratio: Option<f64>,
    load_order_extra: Option<usize>,
    error_order: Option<usize>,
}

fn parsed<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

impl RawConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "case" => self.case = Some(parsed(key, value)?),
            "k_multiplier" => self.k_multiplier = Some(parsed(key, value)?),
            "degrees" => {
                let list = value.split(',').map(|d| parsed(key, d.trim())).collect::<Result<Vec<usize>, _>>()?;
                self.degrees = Some(list);
            }
            "levels" => self.levels = Some(parsed(key, value)?),
            "first_level" => self.first_level = Some(parsed(key, value)?),
            "mode" => self.mode = Some(parsed(key, value)?),
            "solver" => self.solver = Some(parsed(key, value)?),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "singular_order" => self.singular_order = Some(parsed(key, value)?),
            "near_order" => self.near_order = Some(parsed(key, value)?),
            "far_order" => self.far_order = Some(parsed(key, value)?),
            "near_ratio" => self.near_ratio = Some(parsed(key, value)?),
            "load_order_extra" => self.load_order_extra = Some(parsed(key, value)?),
            "error_order" => self.error_order = Some(parsed(key, value)?),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    fn validate(self) -> Result<StudyConfig, ConfigError> {
        let invalid = |msg: &str| Err(ConfigError::Invalid(msg.into()));
        let case = self.case.unwrap_or(CaseName::Tc1);
        let k_multiplier = match (case, self.k_multiplier) {
            (CaseName::Tc2, Some(m)) if m != 1.0 => return invalid("tc2 is posed at k_multiplier = 1"),
            (CaseName::Tc2, _) => 1.0,
            (_, Some(m)) => m,
            (_, None) => 1.5,
        };
        if !(k_multiplier.is_finite() && k_multiplier > 0.0) {
            return invalid("k_multiplier must be positive and finite");
        }
        let degrees = self.degrees.unwrap_or_else(|| vec![1]);
        if degrees.is_empty() || degrees.iter().any(|p| !(1..=3).contains(p)) {
            return invalid("degrees must be a nonempty list drawn from 1, 2, 3");
        }
        if degrees.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("degrees must be strictly increasing");
        }
        if case == CaseName::PolyExact && degrees.contains(&1) {
            return invalid("poly-exact needs degrees >= 2");
        }
        let levels = self.levels.unwrap_or(3);
        if levels == 0 {
            return invalid("levels must be at least 1");
        }
        let mode = self.mode.unwrap_or(Mode::HVersion);
        if mode == Mode::PVersion && degrees.len() < 2 {
            return invalid("p-version needs at least two degrees");
        }
        let defaults = BemOptions::default();
        let bem = BemOptions {
            singular_order: self.singular_order.unwrap_or(defaults.singular_order),
            near_order: self.near_order.unwrap_or(defaults.near_order),
            far_order: self.far_order.unwrap_or(defaults.far_order),
            near_ratio: self.near_ratio.unwrap_or(defaults.near_ratio),
            parallel: defaults.parallel,
        };
        if bem.singular_order == 0 || bem.near_order == 0 || bem.far_order == 0 {
            return invalid("quadrature orders must be positive");
        }
        if !(bem.near_ratio.is_finite() && bem.near_ratio >= 0.0) {
            return invalid("near_ratio must be nonnegative and finite");
        }
        let load_order_extra = self.load_order_extra.unwrap_or(CouplingOptions::default().load_order_extra);
        if self.error_order == Some(0) {
            return invalid("error_order must be positive");
        }
        Ok(StudyConfig {
            case,
            k_multiplier,
            degrees,
            levels,
            first_level: self.first_level.unwrap_or(0),
            mode,
            solver: self.solver.unwrap_or(SolverKind::Schur),
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("results")),
            coupling: CouplingOptions { bem, load_order_extra },
            error_order: self.error_order,
        })
    }
}
