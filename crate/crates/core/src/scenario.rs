//! Resolved simulation scenarios and the reference system parameters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelParams, OfdmGrid};
use crate::error::{Error, Result};
use crate::geometry::{LinkPose, UcaConfig};
use crate::metrics::{PowerAllocation, PowerMode};
use crate::oam::ModeSet;
use crate::SPEED_OF_LIGHT;

/// Reference system parameters.
pub mod table1 {
    pub const ELEMENTS: usize = 15;
    pub const MODES: usize = 15;
    pub const CENTER_FREQUENCY: f64 = 3.5e9;
    pub const SUBCARRIER_SPACING: f64 = 60e3;
    pub const SUBCARRIERS: usize = 1620;
    /// in carrier wavelengths
    pub const RADIUS: f64 = 10.0;
    /// in carrier wavelengths
    pub const DISTANCE: f64 = 300.0;
    pub const BETA_DB: f64 = 24.7;
    pub const NOISE_POWER: f64 = 0.01;
    pub const SNR_DB: f64 = 20.0;
}

pub fn carrier_wavelength(center_frequency: f64) -> f64 {
    SPEED_OF_LIGHT / center_frequency
}

/// Aligned link with the reference geometry.
pub fn table1_params() -> ChannelParams {
    let lambda = carrier_wavelength(table1::CENTER_FREQUENCY);
    let uca = UcaConfig {
        elements: table1::ELEMENTS,
        radius: table1::RADIUS * lambda,
        initial_azimuth: 0.0,
    };
    ChannelParams {
        beta_db: table1::BETA_DB,
        tx: uca,
        rx: uca,
        pose: LinkPose::aligned(table1::DISTANCE * lambda),
    }
}

pub fn table1_grid() -> OfdmGrid {
    OfdmGrid {
        center_frequency: table1::CENTER_FREQUENCY,
        subcarrier_spacing: table1::SUBCARRIER_SPACING,
        subcarrier_count: table1::SUBCARRIERS,
    }
}

/// A link configuration to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Perfectly aligned arrays, no steering.
    Aligned,
    /// Tilted receiver, no steering.
    Misaligned,
    Abs,
    Dbs,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::Aligned, Case::Misaligned, Case::Abs, Case::Dbs];

    pub fn label(self) -> &'static str {
        match self {
            Case::Aligned => "aligned",
            Case::Misaligned => "ma",
            Case::Abs => "abs",
            Case::Dbs => "dbs",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "aligned" | "pa" => Ok(Case::Aligned),
            "ma" | "misaligned" | "none" => Ok(Case::Misaligned),
            "abs" => Ok(Case::Abs),
            "dbs" => Ok(Case::Dbs),
            _ => Err(Error::invalid("cases", format!("unknown case `{s}`"))),
        }
    }
}

/// Where in frequency a sweep point is evaluated, unless a `subcarrier` axis
/// overrides it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Evaluation {
    /// Every subcarrier of the grid; metrics are averaged over them.
    Band,
    /// The lower band edge `f_L`.
    Lowest,
    /// `f_c`.
    Center,
    Subcarrier(usize),
}

impl Evaluation {
    pub fn label(&self) -> String {
        match self {
            Evaluation::Band => "band".into(),
            Evaluation::Lowest => "lowest".into(),
            Evaluation::Center => "center".into(),
            Evaluation::Subcarrier(p) => format!("subcarrier:{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `(1/U) Σ_u CG_u`, averaged over the evaluated frequencies.
    AvgCg,
    AvgImi,
    /// Quantities of the focus mode, averaged over the evaluated frequencies.
    ModeCg,
    ModeImi,
    ModeSinr,
    /// Noise-free limit of the focus mode on the `1/N`-scaled channel.
    ModeSir,
    /// Simulated SINR of the focus mode.
    McModeSinr,
    /// `(1/P) Σ_p Σ_u log2(1 + SINR)`.
    Se,
    /// `k_c R_r ρ` at the carrier.
    KpRRho,
    /// `|k_g| R_r ρ` between `f_L` and the analog anchor.
    KgRRho,
}

impl Metric {
    pub fn id(self) -> &'static str {
        match self {
            Metric::AvgCg => "avg_cg",
            Metric::AvgImi => "avg_imi",
            Metric::ModeCg => "mode_cg",
            Metric::ModeImi => "mode_imi",
            Metric::ModeSinr => "mode_sinr",
            Metric::ModeSir => "mode_sir",
            Metric::McModeSinr => "mc_mode_sinr",
            Metric::Se => "se",
            Metric::KpRRho => "kp_r_rho",
            Metric::KgRRho => "kg_r_rho",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        const ALL: [Metric; 10] = [
            Metric::AvgCg,
            Metric::AvgImi,
            Metric::ModeCg,
            Metric::ModeImi,
            Metric::ModeSinr,
            Metric::ModeSir,
            Metric::McModeSinr,
            Metric::Se,
            Metric::KpRRho,
            Metric::KgRRho,
        ];
        ALL.into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::invalid("metrics", format!("unknown metric `{s}`")))
    }

    /// Whether the metric depends on the link case.
    pub fn per_case(self) -> bool {
        !matches!(self, Metric::KpRRho | Metric::KgRRho)
    }
}

/// Sweepable scenario parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    /// sets `α = γ`
    TiltDeg,
    AlphaDeg,
    GammaDeg,
    SnrDb,
    /// `N` for both arrays; a default mode set follows `N`
    Elements,
    /// total band `B`, with `Δf = B / P`
    BandwidthMhz,
    DistanceWavelengths,
    RadiusWavelengths,
    Subcarrier,
    Anchor,
}

impl Parameter {
    pub const ALL: [Parameter; 10] = [
        Parameter::TiltDeg,
        Parameter::AlphaDeg,
        Parameter::GammaDeg,
        Parameter::SnrDb,
        Parameter::Elements,
        Parameter::BandwidthMhz,
        Parameter::DistanceWavelengths,
        Parameter::RadiusWavelengths,
        Parameter::Subcarrier,
        Parameter::Anchor,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Parameter::TiltDeg => "tilt_deg",
            Parameter::AlphaDeg => "alpha_deg",
            Parameter::GammaDeg => "gamma_deg",
            Parameter::SnrDb => "snr_db",
            Parameter::Elements => "elements",
            Parameter::BandwidthMhz => "bandwidth_mhz",
            Parameter::DistanceWavelengths => "distance_wavelengths",
            Parameter::RadiusWavelengths => "radius_wavelengths",
            Parameter::Subcarrier => "subcarrier",
            Parameter::Anchor => "anchor",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }

    fn integral(self) -> bool {
        matches!(self, Parameter::Elements | Parameter::Subcarrier | Parameter::Anchor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(parameter: Parameter, values: Vec<f64>) -> Self {
        Self {
            parameter: parameter.id().to_string(),
            values,
        }
    }

    pub fn resolve(&self) -> Result<Parameter> {
        let p = Parameter::from_id(&self.parameter)?;
        if self.values.is_empty() {
            return Err(Error::invalid(&self.parameter, "axis needs at least one value"));
        }
        for &v in &self.values {
            if !v.is_finite() {
                return Err(Error::invalid(&self.parameter, format!("non-finite axis value {v}")));
            }
            if p.integral() && (v.fract() != 0.0 || v < 0.0) {
                return Err(Error::invalid(&self.parameter, format!("{v} is not a non-negative integer")));
            }
        }
        Ok(p)
    }
}

/// `None` means the symmetric set with one mode per element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum ModeChoice {
    /// `−⌊U/2⌋ ..= ⌈U/2⌉ − 1`; `None` sets `U = N`.
    Symmetric(Option<usize>),
    Explicit(Vec<i32>),
}

impl ModeChoice {
    pub fn resolve(&self, elements: usize) -> Result<ModeSet> {
        match self {
            ModeChoice::Symmetric(count) => {
                let u = count.unwrap_or(elements);
                if u > elements {
                    return Err(Error::invalid(
                        "mode_count",
                        format!("{u} modes exceed the {elements} array elements"),
                    ));
                }
                ModeSet::new(ModeSet::symmetric(u).modes().to_vec(), elements)
            }
            ModeChoice::Explicit(modes) => ModeSet::new(modes.clone(), elements),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: ChannelParams,
    pub grid: OfdmGrid,
    pub modes: ModeChoice,
    pub snr_db: f64,
    pub noise_power: f64,
    pub power_mode: PowerMode,
    /// ABS anchor subcarrier `A`.
    pub anchor: usize,
    /// Mode reported by the `mode_*` metrics.
    pub focus_mode: i32,
    pub evaluation: Evaluation,
    /// Use the far-field distance approximation instead of exact distances.
    pub approximate: bool,
    pub cases: Vec<Case>,
    pub metrics: Vec<Metric>,
    pub axes: Vec<SweepAxis>,
    pub seed: u64,
    pub monte_carlo_symbols: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        let grid = table1_grid();
        Self {
            name: "default".into(),
            params: table1_params(),
            grid,
            modes: ModeChoice::Symmetric(Some(table1::MODES)),
            snr_db: table1::SNR_DB,
            noise_power: table1::NOISE_POWER,
            power_mode: PowerMode::PerMode,
            anchor: grid.center_subcarrier(),
            focus_mode: 1,
            evaluation: Evaluation::Band,
            approximate: false,
            cases: vec![Case::Misaligned, Case::Abs, Case::Dbs],
            metrics: vec![Metric::AvgCg, Metric::AvgImi],
            axes: Vec::new(),
            seed: 0,
            monte_carlo_symbols: 10_000,
        }
    }
}

impl Scenario {
    pub fn mode_set(&self) -> Result<ModeSet> {
        self.modes.resolve(self.params.elements())
    }

    pub fn power(&self) -> Result<PowerAllocation> {
        PowerAllocation::from_snr(self.snr_db, self.noise_power, self.power_mode, self.mode_set()?.len())
    }

    /// Whether the mode set was left at the default rather than given.
    pub fn modes_assumed(&self) -> bool {
        matches!(self.modes, ModeChoice::Symmetric(_))
    }

    pub fn resolved_axes(&self) -> Result<Vec<(Parameter, Vec<f64>)>> {
        let mut seen = Vec::new();
        self.axes
            .iter()
            .map(|a| {
                let p = a.resolve()?;
                if seen.contains(&p) {
                    return Err(Error::invalid(&a.parameter, "axis listed twice"));
                }
                seen.push(p);
                Ok((p, a.values.clone()))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        let modes = self.mode_set()?;
        self.power()?;
        self.grid.check(self.anchor).map_err(|_| {
            Error::invalid(
                "anchor",
                format!("{} is outside 1..={}", self.anchor, self.grid.subcarrier_count),
            )
        })?;
        if let Evaluation::Subcarrier(p) = self.evaluation {
            self.grid.check(p)?;
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("metrics", "at least one metric is required"));
        }
        if self.metrics.iter().any(|m| m.per_case()) && self.cases.is_empty() {
            return Err(Error::invalid("cases", "link metrics need at least one case"));
        }
        let focus_needed = self
            .metrics
            .iter()
            .any(|m| matches!(m, Metric::ModeCg | Metric::ModeImi | Metric::ModeSinr | Metric::ModeSir | Metric::McModeSinr));
        if focus_needed && modes.position(self.focus_mode).is_none() && !self.has_axis(Parameter::Elements) {
            return Err(Error::invalid(
                "focus_mode",
                format!("mode {} is not in the mode set", self.focus_mode),
            ));
        }
        if self.monte_carlo_symbols == 0 {
            return Err(Error::invalid("monte_carlo_symbols", "must be at least 1"));
        }
        self.resolved_axes()?;
        Ok(())
    }

    fn has_axis(&self, p: Parameter) -> bool {
        self.axes.iter().any(|a| a.parameter == p.id())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serialises");
        hex::encode(Sha256::digest(bytes))
    }
}
