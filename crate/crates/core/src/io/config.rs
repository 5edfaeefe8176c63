use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::analysis::{
    AggregateExponents, Band, FitWindow, LinearData, LinearScenario, Measure, Propagator, FIT_WINDOW, TOL_EXP,
};
use crate::model::{FluidParams, Grid, PressureLaw};
use crate::nonlinear::{InitialData, NonlinearScenario};
use crate::spectral::Cutoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    LinearDecay,
    Ablation,
    NonlinearRun,
    SymbolVerify,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::LinearDecay => "linear-decay",
            ScenarioKind::Ablation => "ablation",
            ScenarioKind::NonlinearRun => "nonlinear-run",
            ScenarioKind::SymbolVerify => "symbol-verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "law", deny_unknown_fields)]
pub enum PressureConfig {
    /// `k (rho - rho_star)^2`
    CriticalQuadratic { k: f64 },
    /// Coefficients of `(rho - rho_star)^j`; the linear one must vanish.
    Polynomial { coeffs: Vec<f64> },
}

impl Default for PressureConfig {
    fn default() -> Self {
        PressureConfig::CriticalQuadratic { k: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub mu_star: f64,
    pub nu_star: f64,
    pub kappa_star: f64,
    pub rho_star: f64,
    #[serde(default)]
    pub pressure: PressureConfig,
}

impl ParamsConfig {
    pub fn build(&self) -> Result<FluidParams, ConfigError> {
        let law = match &self.pressure {
            PressureConfig::CriticalQuadratic { k } => PressureLaw::critical_quadratic(*k, self.rho_star),
            PressureConfig::Polynomial { coeffs } => PressureLaw::polynomial(coeffs.clone(), self.rho_star),
        };
        FluidParams::new(self.mu_star, self.nu_star, self.kappa_star, self.rho_star, law)
            .map_err(|e| ConfigError::validation("params", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub box_len: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.dim, self.n, self.box_len).map_err(|e| ConfigError::validation("grid", e.to_string()))
    }
}

fn default_band() -> Band {
    Band::Low
}
fn default_propagator() -> Propagator {
    Propagator::Full
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_window() -> FitWindow {
    FIT_WINDOW
}
fn default_samples() -> usize {
    16
}
fn default_tolerance() -> f64 {
    TOL_EXP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    pub data: LinearData,
    pub measure: Measure,
    #[serde(default = "default_band")]
    pub band: Band,
    #[serde(default = "default_propagator")]
    pub propagator: Propagator,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Lebesgue exponent of the data norm.
    #[serde(default = "two")]
    pub data_q: f64,
    #[serde(default = "default_window")]
    pub window: FitWindow,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Smallest accepted slope gap in an ablation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_threshold: Option<f64>,
}

fn default_exponents() -> AggregateExponents {
    AggregateExponents::DEFAULT_3D
}
fn default_sample_every() -> usize {
    10
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearConfig {
    pub amplitude: f64,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "two")]
    pub bump_width: f64,
    #[serde(default = "two")]
    pub tensor_width: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub dense_until: f64,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_exponents")]
    pub exponents: AggregateExponents,
}

fn default_cases() -> usize {
    1000
}
fn three() -> usize {
    3
}
fn oracle_tolerance() -> f64 {
    1e-10
}
fn jump_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsConfig {
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "three")]
    pub dim: usize,
    #[serde(default = "oracle_tolerance")]
    pub tolerance: f64,
    #[serde(default = "jump_tolerance")]
    pub jump_tolerance: f64,
}

impl Default for SymbolsConfig {
    fn default() -> Self {
        Self {
            cases: default_cases(),
            dim: three(),
            tolerance: oracle_tolerance(),
            jump_tolerance: jump_tolerance(),
        }
    }
}

/// One scenario as read from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Low/high split radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<NonlinearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<SymbolsConfig>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Parses, fills defaults and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    if let Err(e) = text.parse::<toml::Table>() {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        return Err(ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        });
    }
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().to_string();
        let field = backticked(&message).unwrap_or_default();
        if message.starts_with("unknown field") {
            ConfigError::validation(field, "unknown key")
        } else if message.starts_with("missing field") {
            ConfigError::validation(field, "missing key")
        } else {
            let at = e.span().map_or(String::new(), |s| {
                let (l, c) = line_col(text, s.start);
                format!(" at line {l}, column {c}")
            });
            ConfigError::validation(field, format!("{message}{at}"))
        }
    })?;
    config.normalized()
}

impl ScenarioConfig {
    /// Serializes to TOML; [`parse_config`] reads the result back unchanged.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    fn require<'a, T>(block: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
        block
            .as_ref()
            .ok_or_else(|| ConfigError::validation(name, "block required for this kind"))
    }

    /// Fills defaults and checks that every referenced block is present.
    pub fn normalized(mut self) -> Result<Self, ConfigError> {
        match self.kind {
            ScenarioKind::SymbolVerify => {
                self.symbols.get_or_insert_with(SymbolsConfig::default);
                if self.seed.is_none() {
                    return Err(ConfigError::validation("seed", "required for randomized cases"));
                }
                let s = self.symbols.as_ref().expect("filled");
                if s.cases == 0 || !(1..=4).contains(&s.dim) {
                    return Err(ConfigError::validation("symbols", "need cases >= 1 and 1 <= dim <= 4"));
                }
            }
            ScenarioKind::LinearDecay | ScenarioKind::Ablation => {
                Self::require(&self.params, "params")?.build()?;
                let grid = Self::require(&self.grid, "grid")?.build()?;
                Self::require(&self.linear, "linear")?;
                let eps = *self.cutoff.get_or_insert(Cutoff::default_for(&grid).eps);
                Cutoff::new(eps).map_err(|e| ConfigError::validation("cutoff", e.to_string()))?;
                if self.kind == ScenarioKind::Ablation {
                    let linear = self.linear.as_mut().expect("checked");
                    linear.gap_threshold.get_or_insert(0.5);
                    if !matches!(linear.data, LinearData::CriticalDivergence { .. }) {
                        return Err(ConfigError::validation("linear.data", "ablation needs critical-divergence data"));
                    }
                }
            }
            ScenarioKind::NonlinearRun => {
                Self::require(&self.params, "params")?.build()?;
                Self::require(&self.grid, "grid")?.build()?;
                Self::require(&self.nonlinear, "nonlinear")?;
                if self.seed.is_none() {
                    return Err(ConfigError::validation("seed", "required for randomized data"));
                }
                self.nonlinear_scenario()?
                    .check()
                    .map_err(|e| ConfigError::validation("nonlinear", e.to_string()))?;
            }
        }
        Ok(self)
    }

    pub fn linear_scenario(&self) -> Result<LinearScenario, ConfigError> {
        let grid = Self::require(&self.grid, "grid")?.build()?;
        let lin = Self::require(&self.linear, "linear")?;
        let eps = self.cutoff.unwrap_or(Cutoff::default_for(&grid).eps);
        Ok(LinearScenario {
            grid,
            params: Self::require(&self.params, "params")?.build()?,
            cutoff: Cutoff::new(eps).map_err(|e| ConfigError::validation("cutoff", e.to_string()))?,
            band: lin.band,
            data: lin.data,
            propagator: lin.propagator,
            amplitude: lin.amplitude,
            data_q: lin.data_q,
            measure: lin.measure,
            window: lin.window,
            samples: lin.samples,
            tolerance: lin.tolerance,
        })
    }

    pub fn nonlinear_scenario(&self) -> Result<NonlinearScenario, ConfigError> {
        let nl = Self::require(&self.nonlinear, "nonlinear")?;
        Ok(NonlinearScenario {
            params: Self::require(&self.params, "params")?.build()?,
            grid: Self::require(&self.grid, "grid")?.build()?,
            initial: InitialData {
                bump_width: nl.bump_width,
                tensor_width: nl.tensor_width,
                seed: self.seed.ok_or_else(|| ConfigError::validation("seed", "required for randomized data"))?,
            },
            amplitude: nl.amplitude,
            horizon: nl.horizon,
            dt: nl.dt,
            exponents: nl.exponents,
            sample_every: nl.sample_every,
            dense_until: nl.dense_until,
            nonlinear: nl.nonlinear,
        })
    }
}
