//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function returns a flat `Float64Array` with a fixed row
//! stride so the page can draw it without a serialisation layer. The same
//! computations are available as plain Rust functions for native tests.

use oam_core::channel::build_channel_exact;
use oam_core::experiments::run_sweep;
use oam_core::geometry::LinkPose;
use oam_core::oam::{effective_oam_channel, make_fourier};
use oam_core::scenario::{Case, Evaluation, Metric, Parameter, Scenario, SweepAxis};
use oam_core::steering::{abs_weights, dbs_weights, steered_oam_channel};
use wasm_bindgen::prelude::*;

/// Row layout of [`tilt_sweep`]: tilt, then (CG, IMI) for MA, ABS, DBS.
pub const TILT_STRIDE: usize = 7;
/// Row layout of [`band_sinr`]: frequency in GHz, then SINR in dB for MA, ABS, DBS.
pub const BAND_STRIDE: usize = 4;

const CASES: [Case; 3] = [Case::Misaligned, Case::Abs, Case::Dbs];

fn scheme_case(scheme: &str) -> oam_core::Result<Case> {
    Case::from_label(scheme)
}

/// Mode-averaged gain and interference at the lower band edge for `α = γ`
/// from 0 to `max_deg` in `steps` equal steps.
pub fn tilt_sweep_rows(max_deg: f64, steps: u32) -> oam_core::Result<Vec<f64>> {
    let steps = steps.max(1);
    let tilts: Vec<f64> = (0..=steps).map(|i| max_deg * f64::from(i) / f64::from(steps)).collect();
    let s = Scenario {
        axes: vec![SweepAxis::new(Parameter::TiltDeg, tilts.clone())],
        cases: CASES.to_vec(),
        metrics: vec![Metric::AvgCg, Metric::AvgImi],
        evaluation: Evaluation::Lowest,
        ..Scenario::default()
    };
    let rs = run_sweep(&s)?;
    let mut out = Vec::with_capacity(tilts.len() * TILT_STRIDE);
    for (tilt, rows) in tilts.iter().zip(rs.rows.chunks(CASES.len())) {
        out.push(*tilt);
        for row in rows {
            out.extend_from_slice(&row.values);
        }
    }
    Ok(out)
}

/// SINR of `mode` at every `decimate`-th subcarrier for a tilt `α = γ`.
pub fn band_sinr_rows(tilt_deg: f64, mode: i32, decimate: u32) -> oam_core::Result<Vec<f64>> {
    let base = Scenario::default();
    let grid = base.grid.decimated(decimate.max(1) as usize)?;
    let mut s = Scenario {
        grid,
        anchor: grid.center_subcarrier(),
        focus_mode: mode,
        axes: vec![SweepAxis::new(
            Parameter::Subcarrier,
            grid.subcarriers().map(|p| p as f64).collect(),
        )],
        cases: CASES.to_vec(),
        metrics: vec![Metric::ModeSinr],
        ..base
    };
    s.params.pose.alpha = tilt_deg.to_radians();
    s.params.pose.gamma = tilt_deg.to_radians();
    let rs = run_sweep(&s)?;
    let mut out = Vec::with_capacity(grid.subcarrier_count * BAND_STRIDE);
    for (p, rows) in grid.subcarriers().zip(rs.rows.chunks(CASES.len())) {
        out.push(grid.frequency(p)? / 1e9);
        out.extend(rows.iter().map(|r| 10.0 * r.values[0].log10()));
    }
    Ok(out)
}

/// `|h_OAM(u, v)|²` row-major for one subcarrier; `scheme` is `ma`, `abs` or
/// `dbs`.
pub fn channel_heatmap_values(
    alpha_deg: f64,
    gamma_deg: f64,
    scheme: &str,
    subcarrier: u32,
) -> oam_core::Result<Vec<f64>> {
    let s = Scenario::default();
    let mut params = s.params;
    params.pose = LinkPose::new(params.pose.distance, alpha_deg.to_radians(), gamma_deg.to_radians())?;
    let p = subcarrier as usize;
    let modes = s.mode_set()?;
    let f = make_fourier(&modes, params.elements())?;
    let h = build_channel_exact(&params, &s.grid, p)?;
    let ch = match scheme_case(scheme)? {
        Case::Abs => steered_oam_channel(&h, &f, &abs_weights(&params.rx, &params.pose, &s.grid, s.anchor)?)?,
        Case::Dbs => steered_oam_channel(&h, &f, &dbs_weights(&params.rx, &params.pose, &s.grid, p)?)?,
        Case::Misaligned | Case::Aligned => effective_oam_channel(&h, &f)?,
    };
    Ok(ch.powers().iter().copied().collect())
}

fn js(e: oam_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn tilt_sweep(max_deg: f64, steps: u32) -> Result<Vec<f64>, JsError> {
    tilt_sweep_rows(max_deg, steps).map_err(js)
}

#[wasm_bindgen]
pub fn band_sinr(tilt_deg: f64, mode: i32, decimate: u32) -> Result<Vec<f64>, JsError> {
    band_sinr_rows(tilt_deg, mode, decimate).map_err(js)
}

#[wasm_bindgen]
pub fn channel_heatmap(alpha_deg: f64, gamma_deg: f64, scheme: &str, subcarrier: u32) -> Result<Vec<f64>, JsError> {
    channel_heatmap_values(alpha_deg, gamma_deg, scheme, subcarrier).map_err(js)
}

/// Number of modes in the demo's mode set (side of the heatmap).
#[wasm_bindgen]
pub fn mode_count() -> usize {
    Scenario::default().mode_set().map_or(0, |m| m.len())
}
