//! Run configuration: one TOML file per run.

use std::path::PathBuf;

use qshift::classifier::Hypotheses;
use qshift::poles::{RhsDegrees, StartKind};
use qshift::solver::{EquationParams, Variable};
use qshift::{Complex64, Precision};
use serde::Deserialize;

use crate::error::CliError;

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Laurent,
    Continue,
    Residual,
    ExpolyCheck,
    PoleOrbit,
    Nevanlinna,
    Classify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Self::Solve,
        Self::Laurent,
        Self::Continue,
        Self::Residual,
        Self::ExpolyCheck,
        Self::PoleOrbit,
        Self::Nevanlinna,
        Self::Classify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Laurent => "laurent",
            Self::Continue => "continue",
            Self::Residual => "residual",
            Self::ExpolyCheck => "expoly-check",
            Self::PoleOrbit => "pole-orbit",
            Self::Nevanlinna => "nevanlinna",
            Self::Classify => "classify",
        }
    }

    fn needs_params(self) -> bool {
        matches!(self, Self::Solve | Self::Laurent | Self::Continue | Self::Residual | Self::ExpolyCheck)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: Pair,
    pub b: Pair,
    pub c: Pair,
    pub d: Pair,
    pub q: Pair,
    #[serde(default)]
    pub precision: Option<Precision>,
}

impl ParamsConfig {
    pub fn build(&self) -> Result<EquationParams, CliError> {
        let p = EquationParams::new(complex(self.a), complex(self.b), complex(self.c), complex(self.d), complex(self.q))?;
        Ok(p.with_precision(self.precision.unwrap_or_default()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    #[default]
    Entire,
    Linear,
    Forced,
    Family,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default)]
    pub mode: SolveMode,
    pub a0: Option<Pair>,
    pub seeds: Option<Vec<Pair>>,
    pub order: Option<usize>,
    pub variable: Option<Variable>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentConfig {
    pub z0: Option<Pair>,
    pub b0: Option<Pair>,
    pub b1: Option<Pair>,
    pub order: Option<usize>,
    pub variable: Option<Variable>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Entire,
    Linear,
    Forced,
    LaurentOrigin,
    LaurentAt,
}

/// The series a `residual` or `continue` run works on.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub kind: SeriesKind,
    pub a0: Option<Pair>,
    pub z0: Option<Pair>,
    pub b0: Option<Pair>,
    pub b1: Option<Pair>,
    pub order: Option<usize>,
    /// Overrides the estimated evaluation radius.
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ring {
    pub radius: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualConfig {
    pub series: SeriesConfig,
    pub points: Option<Vec<Pair>>,
    pub ring: Option<Ring>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinueConfig {
    pub series: SeriesConfig,
    pub targets: Vec<Pair>,
    pub steps: usize,
    pub eps_pole: Option<f64>,
    #[serde(default)]
    pub known_poles: Vec<Pair>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    /// Ascending coefficients of the polynomial prefactor.
    pub prefactor: Vec<Pair>,
    /// Ascending coefficients of the exponent polynomial.
    pub exponent: Vec<Pair>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpolyConfig {
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleOrbitConfig {
    pub p: u32,
    pub s: u32,
    pub kind: StartKind,
    #[serde(default = "one")]
    pub order: u64,
    pub z0: Pair,
    pub q: Pair,
    pub steps: usize,
}

fn one() -> u64 {
    1
}

impl PoleOrbitConfig {
    pub fn degrees(&self) -> Result<RhsDegrees, CliError> {
        Ok(RhsDegrees::new(self.p, self.s)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NevanlinnaCheck {
    Curve,
    QShift,
    FirstMain,
    Mokhonko,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Radii, either listed or generated.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn radii(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (None, Some(a), Some(b), Some(n)) => {
                if n < 2 || !(a > 0.0 && b > a) {
                    return Err(CliError::validation("grid needs count >= 2 and 0 < start < stop"));
                }
                let step = |i: usize| i as f64 / (n - 1) as f64;
                Ok((0..n)
                    .map(|i| match self.spacing {
                        Spacing::Linear => a + (b - a) * step(i),
                        Spacing::Log => (a.ln() + (b.ln() - a.ln()) * step(i)).exp(),
                    })
                    .collect())
            }
            _ => Err(CliError::validation("grid takes either `values` or all of `start`, `stop`, `count`")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NevanlinnaConfig {
    pub check: NevanlinnaCheck,
    /// Ascending coefficients of the numerator of `f`.
    pub numerator: Vec<Pair>,
    /// Ascending coefficients of the denominator of `f`.
    pub denominator: Vec<Pair>,
    pub grid: GridConfig,
    pub nodes: Option<usize>,
    /// Dilation for `q-shift`.
    pub q: Option<Pair>,
    /// Target value for `first-main`.
    pub a: Option<Pair>,
    /// Numerator and denominator of `R(y)` for `mokhonko`.
    pub rhs_numerator: Option<Vec<Pair>>,
    pub rhs_denominator: Option<Vec<Pair>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub params: Option<ParamsConfig>,
    /// Output file, relative to the config file; standard output when absent.
    pub output: Option<PathBuf>,
    pub solve: Option<SolveConfig>,
    pub laurent: Option<LaurentConfig>,
    #[serde(rename = "continue")]
    pub continue_: Option<ContinueConfig>,
    pub residual: Option<ResidualConfig>,
    #[serde(rename = "expoly-check")]
    pub expoly_check: Option<ExpolyConfig>,
    #[serde(rename = "pole-orbit")]
    pub pole_orbit: Option<PoleOrbitConfig>,
    pub nevanlinna: Option<NevanlinnaConfig>,
    pub classify: Option<Hypotheses>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::validation(e.to_string()))?;
        cfg.check_sections()?;
        Ok(cfg)
    }

    fn present(&self) -> Vec<Command> {
        let flags = [
            (Command::Solve, self.solve.is_some()),
            (Command::Laurent, self.laurent.is_some()),
            (Command::Continue, self.continue_.is_some()),
            (Command::Residual, self.residual.is_some()),
            (Command::ExpolyCheck, self.expoly_check.is_some()),
            (Command::PoleOrbit, self.pole_orbit.is_some()),
            (Command::Nevanlinna, self.nevanlinna.is_some()),
            (Command::Classify, self.classify.is_some()),
        ];
        flags.into_iter().filter(|(_, on)| *on).map(|(c, _)| c).collect()
    }

    fn check_sections(&self) -> Result<(), CliError> {
        if let Some(other) = self.present().into_iter().find(|c| *c != self.command) {
            return Err(CliError::validation(format!(
                "section [{}] does not belong to command `{}`",
                other.name(),
                self.command.name()
            )));
        }
        match (self.command.needs_params(), self.params.is_some()) {
            (true, false) => Err(CliError::validation(format!("command `{}` needs [params]", self.command.name()))),
            (false, true) => Err(CliError::validation(format!("command `{}` takes no [params]", self.command.name()))),
            _ => Ok(()),
        }
    }

    /// Section for the command, or an error if it is required and missing.
    pub fn section<'a, T>(&self, s: &'a Option<T>) -> Result<&'a T, CliError> {
        s.as_ref().ok_or_else(|| CliError::validation(format!("missing section [{}]", self.command.name())))
    }
}
