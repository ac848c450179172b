//! Scenario files.
//!
//! TOML by default, JSON when the file name ends in `.json`. Every section and
//! key is optional; missing values fall back to the reference system. Angles
//! are in degrees, radii and distance in carrier wavelengths `λ₀ = c / f_c`.

use std::path::Path;

use oam_core::channel::{ChannelParams, OfdmGrid};
use oam_core::experiments::PresetOptions;
use oam_core::geometry::{LinkPose, UcaConfig};
use oam_core::metrics::PowerMode;
use oam_core::scenario::{carrier_wavelength, table1, Case, Evaluation, Metric, ModeChoice, Scenario, SweepAxis};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(#[from] oam_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

impl ConfigFormat {
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ConfigFormat::Json,
            _ => ConfigFormat::Toml,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    name: Option<String>,
    seed: Option<u64>,
    system: SystemSection,
    pose: PoseSection,
    modes: ModesSection,
    power: PowerSection,
    steering: SteeringSection,
    evaluation: EvaluationSection,
    sweep: SweepSection,
    presets: Option<PresetOptions>,
    monte_carlo: MonteCarloSection,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SystemSection {
    elements: usize,
    center_frequency_hz: f64,
    subcarrier_spacing_hz: f64,
    subcarriers: usize,
    tx_radius_wavelengths: f64,
    rx_radius_wavelengths: f64,
    distance_wavelengths: f64,
    beta_db: f64,
    tx_initial_azimuth_deg: f64,
    rx_initial_azimuth_deg: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            elements: table1::ELEMENTS,
            center_frequency_hz: table1::CENTER_FREQUENCY,
            subcarrier_spacing_hz: table1::SUBCARRIER_SPACING,
            subcarriers: table1::SUBCARRIERS,
            tx_radius_wavelengths: table1::RADIUS,
            rx_radius_wavelengths: table1::RADIUS,
            distance_wavelengths: table1::DISTANCE,
            beta_db: table1::BETA_DB,
            tx_initial_azimuth_deg: 0.0,
            rx_initial_azimuth_deg: 0.0,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PoseSection {
    alpha_deg: f64,
    gamma_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ModesSection {
    /// symmetric set of this size; defaults to one mode per element
    count: Option<usize>,
    list: Option<Vec<i32>>,
    focus: i32,
}

impl Default for ModesSection {
    fn default() -> Self {
        Self {
            count: None,
            list: None,
            focus: 1,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PowerSection {
    snr_db: f64,
    noise_power: f64,
    mode: PowerMode,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            snr_db: table1::SNR_DB,
            noise_power: table1::NOISE_POWER,
            mode: PowerMode::PerMode,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SteeringSection {
    /// defaults to `P/2`
    anchor: Option<usize>,
    cases: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvaluationSection {
    /// `band`, `lowest` or `center`
    at: Option<String>,
    subcarrier: Option<usize>,
    /// `exact` or `far-field`
    model: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepSection {
    metrics: Option<Vec<String>>,
    axis: Vec<AxisSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisSection {
    parameter: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MonteCarloSection {
    symbols: usize,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self { symbols: 10_000 }
    }
}

/// A fully validated scenario plus the figure-preset options.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub presets: PresetOptions,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(oam_core::Error::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    })
}

impl AxisSection {
    fn values(&self) -> Result<Vec<f64>, ConfigError> {
        match (&self.values, self.start, self.stop, self.step) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (None, Some(start), Some(stop), Some(step)) => {
                if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite() && stop >= start) {
                    return Err(invalid(&self.parameter, "range needs finite start <= stop and step > 0"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
            _ => Err(invalid(&self.parameter, "give either `values` or all of `start`, `stop`, `step`")),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_file(text: &str, format: ConfigFormat, path: &str) -> Result<FileConfig, ConfigError> {
    match format {
        ConfigFormat::Toml => toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            ConfigError::Parse {
                path: path.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        }),
        ConfigFormat::Json => serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }),
    }
}

/// Parses and validates scenario text. `path` is only used in messages.
pub fn parse_config_str(text: &str, format: ConfigFormat, path: &str) -> Result<ResolvedConfig, ConfigError> {
    resolve(parse_file(text, format, path)?)
}

pub fn parse_config(path: &Path) -> Result<ResolvedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, ConfigFormat::for_path(path), &path.display().to_string())
}

fn resolve(cfg: FileConfig) -> Result<ResolvedConfig, ConfigError> {
    let sys = &cfg.system;
    let grid = OfdmGrid::new(sys.center_frequency_hz, sys.subcarrier_spacing_hz, sys.subcarriers)?;
    let lambda = carrier_wavelength(sys.center_frequency_hz);
    let tx = UcaConfig::new(
        sys.elements,
        sys.tx_radius_wavelengths * lambda,
        sys.tx_initial_azimuth_deg.to_radians(),
    )?;
    let rx = UcaConfig::new(
        sys.elements,
        sys.rx_radius_wavelengths * lambda,
        sys.rx_initial_azimuth_deg.to_radians(),
    )?;
    let pose = LinkPose::new(
        sys.distance_wavelengths * lambda,
        cfg.pose.alpha_deg.to_radians(),
        cfg.pose.gamma_deg.to_radians(),
    )?;
    let params = ChannelParams {
        beta_db: sys.beta_db,
        tx,
        rx,
        pose,
    };

    let modes = match (&cfg.modes.list, cfg.modes.count) {
        (Some(_), Some(_)) => return Err(invalid("modes", "give either `count` or `list`, not both")),
        (Some(list), None) => ModeChoice::Explicit(list.clone()),
        (None, count) => ModeChoice::Symmetric(count),
    };

    let defaults = Scenario::default();
    let evaluation = match (cfg.evaluation.at.as_deref(), cfg.evaluation.subcarrier) {
        (Some(_), Some(_)) => {
            return Err(invalid("evaluation", "give either `at` or `subcarrier`, not both"));
        }
        (None, Some(p)) => Evaluation::Subcarrier(p),
        (None | Some("band"), None) => Evaluation::Band,
        (Some("lowest"), None) => Evaluation::Lowest,
        (Some("center"), None) => Evaluation::Center,
        (Some(other), None) => {
            return Err(invalid("evaluation.at", format!("unknown value `{other}`")));
        }
    };
    let approximate = match cfg.evaluation.model.as_deref() {
        None | Some("exact") => false,
        Some("far-field") => true,
        Some(other) => return Err(invalid("evaluation.model", format!("unknown value `{other}`"))),
    };
    let cases = match &cfg.steering.cases {
        Some(list) => list.iter().map(|c| Case::from_label(c)).collect::<Result<Vec<_>, _>>()?,
        None => defaults.cases.clone(),
    };
    let metrics = match &cfg.sweep.metrics {
        Some(list) => list.iter().map(|m| Metric::from_id(m)).collect::<Result<Vec<_>, _>>()?,
        None => defaults.metrics.clone(),
    };
    let axes = cfg
        .sweep
        .axis
        .iter()
        .map(|a| {
            Ok(SweepAxis {
                parameter: a.parameter.clone(),
                values: a.values()?,
            })
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    let scenario = Scenario {
        name: cfg.name.unwrap_or_else(|| "scenario".into()),
        params,
        grid,
        modes,
        snr_db: cfg.power.snr_db,
        noise_power: cfg.power.noise_power,
        power_mode: cfg.power.mode,
        anchor: cfg.steering.anchor.unwrap_or_else(|| grid.center_subcarrier()),
        focus_mode: cfg.modes.focus,
        evaluation,
        approximate,
        cases,
        metrics,
        axes,
        seed: cfg.seed.unwrap_or(0),
        monte_carlo_symbols: cfg.monte_carlo.symbols,
    };
    scenario.validate()?;
    let presets = cfg.presets.unwrap_or_default();
    if presets.decimate == 0 || !scenario.grid.subcarrier_count.is_multiple_of(presets.decimate) {
        return Err(invalid(
            "presets.decimate",
            format!("must divide the subcarrier count {}", scenario.grid.subcarrier_count),
        ));
    }
    if presets.snr_db.is_empty() || presets.snr_db.iter().any(|v| !v.is_finite()) {
        return Err(invalid("presets.snr_db", "needs finite values"));
    }
    Ok(ResolvedConfig { scenario, presets })
}

/// Reference system with no sweep axes.
pub fn default_config() -> ResolvedConfig {
    resolve(FileConfig::default()).expect("defaults are valid")
}
