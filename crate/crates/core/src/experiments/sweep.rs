use std::collections::HashMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::channel::{
    build_channel_approx, build_channel_approx_at, build_channel_exact, build_channel_exact_at, wavenumber,
    ChannelMatrix, ChannelParams, OfdmGrid,
};
use crate::error::{Error, Result};
use crate::geometry::oblique_factors;
use crate::metrics::{
    gain_and_imi_from_powers, monte_carlo_link, sinr_from_powers, spectral_efficiency, MonteCarloSpec,
    PowerAllocation, PowerMode,
};
use crate::oam::{effective_oam_channel, make_fourier, FourierMatrix, ModeSet, OamChannel, Steering};
use crate::scenario::{carrier_wavelength, Case, Evaluation, Metric, Parameter, Scenario};
use crate::steering::{abs_weights, steered_oam_channel, steering_weights_at, SteeringWeights};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMeta {
    pub name: String,
    pub fingerprint: String,
    pub version: String,
    pub seed: u64,
    pub power_mode: PowerMode,
    pub modes: Vec<i32>,
    /// The mode set was the symmetric default rather than configured.
    pub modes_assumed: bool,
    pub evaluation: String,
    pub channel_model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub axes: Vec<f64>,
    pub case: Option<Case>,
    pub values: Vec<f64>,
}

/// Tabular sweep output. Rows are ordered lexicographically by axis index,
/// last axis fastest; when present, the case acts as one more axis after the
/// configured ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub meta: ResultMeta,
    pub axis_names: Vec<String>,
    pub has_case: bool,
    pub metric_names: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultSet {
    pub fn column(&self, metric: &str) -> Option<usize> {
        self.metric_names.iter().position(|m| m == metric)
    }

    /// Rows for one case, in sweep order.
    pub fn case_rows(&self, case: Case) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.case == Some(case))
    }
}

/// A single evaluation frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Freq {
    Grid(usize),
    Hz(f64),
}

/// Everything needed to evaluate one sweep point.
#[derive(Debug, Clone)]
struct Point {
    params: ChannelParams,
    grid: OfdmGrid,
    modes: ModeSet,
    alloc: PowerAllocation,
    anchor: usize,
    focus: Option<usize>,
    freqs: Vec<Freq>,
}

fn resolve_point(base: &Scenario, settings: &[(Parameter, f64)]) -> Result<Point> {
    let mut params = base.params;
    let mut grid = base.grid;
    let mut snr_db = base.snr_db;
    let mut anchor = base.anchor;
    let mut evaluation = base.evaluation;
    let lambda = carrier_wavelength(base.grid.center_frequency);
    for &(p, v) in settings {
        match p {
            Parameter::TiltDeg => {
                params.pose.alpha = v.to_radians();
                params.pose.gamma = v.to_radians();
            }
            Parameter::AlphaDeg => params.pose.alpha = v.to_radians(),
            Parameter::GammaDeg => params.pose.gamma = v.to_radians(),
            Parameter::SnrDb => snr_db = v,
            Parameter::Elements => {
                params.tx.elements = v as usize;
                params.rx.elements = v as usize;
            }
            Parameter::BandwidthMhz => grid.subcarrier_spacing = v * 1e6 / grid.subcarrier_count as f64,
            Parameter::DistanceWavelengths => params.pose.distance = v * lambda,
            Parameter::RadiusWavelengths => {
                params.tx.radius = v * lambda;
                params.rx.radius = v * lambda;
            }
            Parameter::Subcarrier => evaluation = Evaluation::Subcarrier(v as usize),
            Parameter::Anchor => anchor = v as usize,
        }
    }
    params.validate()?;
    grid.validate()?;
    grid.check(anchor)?;
    let modes = base.modes.resolve(params.elements())?;
    let alloc = PowerAllocation::from_snr(snr_db, base.noise_power, base.power_mode, modes.len())?;
    let freqs = match evaluation {
        Evaluation::Band => grid.subcarriers().map(Freq::Grid).collect(),
        Evaluation::Lowest => vec![Freq::Hz(grid.lowest_frequency())],
        Evaluation::Center => vec![Freq::Hz(grid.center_frequency)],
        Evaluation::Subcarrier(p) => {
            grid.check(p)?;
            vec![Freq::Grid(p)]
        }
    };
    Ok(Point {
        params,
        grid,
        focus: modes.position(base.focus_mode),
        modes,
        alloc,
        anchor,
        freqs,
    })
}

fn build_channel(point: &Point, params: &ChannelParams, freq: Freq, approximate: bool) -> Result<ChannelMatrix> {
    match (freq, approximate) {
        (Freq::Grid(p), false) => build_channel_exact(params, &point.grid, p),
        (Freq::Grid(p), true) => build_channel_approx(params, &point.grid, p),
        (Freq::Hz(f), false) => build_channel_exact_at(params, f),
        (Freq::Hz(f), true) => build_channel_approx_at(params, f),
    }
}

/// Channel and receive weights for one case at one frequency.
fn case_link(
    point: &Point,
    case: Case,
    freq: Freq,
    approximate: bool,
) -> Result<(ChannelMatrix, Option<SteeringWeights>)> {
    let params = match case {
        Case::Aligned => ChannelParams {
            pose: crate::geometry::LinkPose::aligned(point.params.pose.distance),
            ..point.params
        },
        _ => point.params,
    };
    let h = build_channel(point, &params, freq, approximate)?;
    let w = match case {
        Case::Aligned | Case::Misaligned => None,
        Case::Abs => Some(abs_weights(&params.rx, &params.pose, &point.grid, point.anchor)?),
        Case::Dbs => Some(steering_weights_at(&params.rx, &params.pose, h.wavenumber, Steering::Dbs)?),
    };
    Ok((h, w))
}

fn case_channel(point: &Point, f: &FourierMatrix, case: Case, freq: Freq, approximate: bool) -> Result<OamChannel> {
    let (h, w) = case_link(point, case, freq, approximate)?;
    match w {
        Some(w) => steered_oam_channel(&h, f, &w),
        None => effective_oam_channel(&h, f),
    }
}

/// `|h(u,v)|²` matrices per case, per evaluation frequency.
type CasePowers = Vec<Vec<Array2<f64>>>;

fn channel_powers(point: &Point, cases: &[Case], approximate: bool) -> Result<CasePowers> {
    let f = make_fourier(&point.modes, point.params.elements())?;
    cases
        .iter()
        .map(|&case| {
            point
                .freqs
                .iter()
                .map(|&freq| Ok(case_channel(point, &f, case, freq, approximate)?.powers()))
                .collect()
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn focus_index(point: &Point, base: &Scenario) -> Result<usize> {
    point.focus.ok_or_else(|| {
        Error::invalid(
            "focus_mode",
            format!("mode {} is not in the mode set {:?}", base.focus_mode, point.modes.modes()),
        )
    })
}

fn case_free_metric(metric: Metric, point: &Point) -> Result<f64> {
    let rho = oblique_factors(&point.params.pose)?.rho;
    let r = point.params.rx.radius;
    Ok(match metric {
        Metric::KpRRho => wavenumber(point.grid.center_frequency) * r * rho,
        Metric::KgRRho => {
            let deviation = point.grid.lowest_frequency() - point.grid.frequency(point.anchor)?;
            (2.0 * std::f64::consts::PI * deviation / SPEED_OF_LIGHT).abs() * r * rho
        }
        _ => unreachable!("link metric routed to case-free evaluation"),
    })
}

#[allow(clippy::too_many_arguments)]
fn link_metric(
    metric: Metric,
    base: &Scenario,
    point: &Point,
    point_index: usize,
    case: Case,
    powers: &[Array2<f64>],
) -> Result<f64> {
    let alloc = &point.alloc;
    Ok(match metric {
        Metric::AvgCg => mean(powers.iter().map(|p| gain_and_imi_from_powers(p).avg_cg)),
        Metric::AvgImi => mean(powers.iter().map(|p| gain_and_imi_from_powers(p).avg_imi)),
        Metric::ModeCg | Metric::ModeImi => {
            let u = focus_index(point, base)?;
            mean(powers.iter().map(|p| {
                let (cg, imi) = gain_and_imi_from_powers(p).per_mode[u];
                if metric == Metric::ModeCg {
                    cg
                } else {
                    imi
                }
            }))
        }
        Metric::ModeSinr => {
            let u = focus_index(point, base)?;
            mean(powers.iter().map(|p| sinr_from_powers(p, alloc)[u]))
        }
        Metric::ModeSir => {
            let u = focus_index(point, base)?;
            mean(powers.iter().map(|p| {
                let (cg, imi) = gain_and_imi_from_powers(p).per_mode[u];
                if imi == 0.0 {
                    f64::INFINITY
                } else {
                    cg / imi
                }
            }))
        }
        Metric::Se => {
            let sinrs: Vec<Vec<f64>> = powers.iter().map(|p| sinr_from_powers(p, alloc)).collect();
            spectral_efficiency(&sinrs)
        }
        Metric::McModeSinr => {
            let u = focus_index(point, base)?;
            let f = make_fourier(&point.modes, point.params.elements())?;
            let spec = MonteCarloSpec::new(base.monte_carlo_symbols, point_seed(base.seed, point_index))?;
            let mut total = 0.0;
            for &freq in &point.freqs {
                let (h, w) = case_link(point, case, freq, base.approximate)?;
                total += monte_carlo_link(&h, &f, w.as_ref(), alloc, &spec)?.sinr[u];
            }
            total / point.freqs.len() as f64
        }
        Metric::KpRRho | Metric::KgRRho => case_free_metric(metric, point)?,
    })
}

/// Seed for the Monte Carlo draws of one sweep point.
pub fn point_seed(seed: u64, point_index: usize) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add((point_index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(feature = "parallel")]
fn map_collect<T, R, F>(items: &[T], parallel: bool, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
    } else {
        items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_collect<T, R, F>(items: &[T], _parallel: bool, f: F) -> Result<Vec<R>>
where
    F: Fn(usize, &T) -> Result<R>,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Cartesian-product evaluation of the scenario's metrics.
pub fn run_sweep(scenario: &Scenario) -> Result<ResultSet> {
    run_sweep_with(scenario, cfg!(feature = "parallel"))
}

/// As [`run_sweep`], choosing whether to spread points over threads. The
/// result does not depend on the choice.
pub fn run_sweep_with(scenario: &Scenario, parallel: bool) -> Result<ResultSet> {
    scenario.validate()?;
    let axes = scenario.resolved_axes()?;
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();

    let mut settings: Vec<Vec<(Parameter, f64)>> = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut point = vec![(Parameter::SnrDb, 0.0); axes.len()];
        for (slot, (p, values)) in point.iter_mut().zip(&axes).rev() {
            *slot = (*p, values[rem % values.len()]);
            rem /= values.len();
        }
        settings.push(point);
    }

    let points = map_collect(&settings, parallel, |_, s| resolve_point(scenario, s))?;

    let link_metrics: Vec<Metric> = scenario.metrics.iter().copied().filter(|m| m.per_case()).collect();
    let cases: Vec<Case> = if link_metrics.is_empty() { Vec::new() } else { scenario.cases.clone() };

    // Points that differ only in SNR share channels.
    let mut key_of = Vec::with_capacity(total);
    let mut unique: Vec<usize> = Vec::new();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, s) in settings.iter().enumerate() {
        let key: Vec<u64> = s
            .iter()
            .filter(|(p, _)| *p != Parameter::SnrDb)
            .map(|(_, v)| v.to_bits())
            .collect();
        let slot = *seen.entry(key).or_insert_with(|| {
            unique.push(i);
            unique.len() - 1
        });
        key_of.push(slot);
    }
    let powers: Vec<CasePowers> = if cases.is_empty() {
        Vec::new()
    } else {
        map_collect(&unique, parallel, |_, &i| channel_powers(&points[i], &cases, scenario.approximate))?
    };

    let per_point = map_collect(&points, parallel, |i, point| {
        let mut rows = Vec::new();
        let axis_values: Vec<f64> = settings[i].iter().map(|(_, v)| *v).collect();
        if cases.is_empty() {
            let values = scenario
                .metrics
                .iter()
                .map(|&m| case_free_metric(m, point))
                .collect::<Result<Vec<_>>>()?;
            rows.push(ResultRow {
                axes: axis_values,
                case: None,
                values,
            });
            return Ok(rows);
        }
        for (c, &case) in cases.iter().enumerate() {
            let values = scenario
                .metrics
                .iter()
                .map(|&m| link_metric(m, scenario, point, i, case, &powers[key_of[i]][c]))
                .collect::<Result<Vec<_>>>()?;
            if let Some(v) = values.iter().find(|v| v.is_nan()) {
                return Err(Error::Domain(format!("metric evaluated to {v} at point {i}")));
            }
            rows.push(ResultRow {
                axes: axis_values.clone(),
                case: Some(case),
                values,
            });
        }
        Ok(rows)
    })?;

    let modes = scenario.mode_set()?;
    Ok(ResultSet {
        meta: ResultMeta {
            name: scenario.name.clone(),
            fingerprint: scenario.fingerprint(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: scenario.seed,
            power_mode: scenario.power_mode,
            modes: modes.modes().to_vec(),
            modes_assumed: scenario.modes_assumed(),
            evaluation: scenario.evaluation.label(),
            channel_model: if scenario.approximate { "far-field" } else { "exact" }.into(),
        },
        axis_names: axes.iter().map(|(p, _)| p.id().to_string()).collect(),
        has_case: !cases.is_empty(),
        metric_names: scenario.metrics.iter().map(|m| m.id().to_string()).collect(),
        rows: per_point.into_iter().flatten().collect(),
    })
}
