//! Preset sweeps for the reference tables and figures, on top of the generic
//! [`run_sweep`].
//!
//! Every runner takes a base scenario, overrides its axes, cases, metrics and
//! evaluation frequency, and hands the result to [`run_sweep`]; the matching
//! `preset_*` function returns that scenario so the same rows can be
//! reproduced with a hand-written sweep.

mod sweep;

pub use sweep::{point_seed, run_sweep, run_sweep_with, ResultMeta, ResultRow, ResultSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{Case, Evaluation, Metric, ModeChoice, Parameter, Scenario, SweepAxis};

/// Tilts `α = γ` used by the tables and the SINR-vs-frequency figure.
pub const TABLE_TILTS_DEG: [f64; 5] = [1.0, 5.0, 10.0, 15.0, 20.0];

/// Knobs shared by the figure presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PresetOptions {
    /// SNR axis of the spectral-efficiency figures; the x-axis range is an
    /// assumption.
    pub snr_db: Vec<f64>,
    /// Keep every `decimate`-th subcarrier of the band (1 keeps all).
    pub decimate: usize,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            snr_db: (0..=20).map(f64::from).collect(),
            decimate: 1,
        }
    }
}

fn with(base: &Scenario, name: &str, opts: &PresetOptions) -> Result<Scenario> {
    let mut s = base.clone();
    s.name = name.into();
    if opts.decimate > 1 {
        s.grid = s.grid.decimated(opts.decimate)?;
        s.anchor = s.grid.center_subcarrier();
    }
    Ok(s)
}

pub fn preset_table2(base: &Scenario) -> Result<Scenario> {
    let mut s = with(base, "table2", &PresetOptions::default())?;
    s.axes = vec![SweepAxis::new(Parameter::TiltDeg, TABLE_TILTS_DEG.to_vec())];
    s.cases = Vec::new();
    s.metrics = vec![Metric::KpRRho, Metric::KgRRho];
    Ok(s)
}

pub fn preset_table3(base: &Scenario) -> Result<Scenario> {
    let mut s = with(base, "table3", &PresetOptions::default())?;
    s.axes = vec![SweepAxis::new(Parameter::TiltDeg, vec![5.0, 15.0])];
    s.cases = vec![Case::Misaligned, Case::Abs, Case::Dbs];
    s.metrics = vec![Metric::ModeCg, Metric::ModeImi];
    s.evaluation = Evaluation::Lowest;
    Ok(s)
}

/// Includes an untilted reference series ahead of the table tilts.
pub fn preset_fig3(base: &Scenario, opts: &PresetOptions) -> Result<Scenario> {
    let mut s = with(base, "fig3", opts)?;
    let mut tilts = vec![0.0];
    tilts.extend(TABLE_TILTS_DEG);
    s.axes = vec![
        SweepAxis::new(Parameter::TiltDeg, tilts),
        SweepAxis::new(Parameter::Subcarrier, s.grid.subcarriers().map(|p| p as f64).collect()),
    ];
    s.cases = vec![Case::Misaligned];
    s.metrics = vec![Metric::ModeCg, Metric::ModeImi, Metric::ModeSinr];
    Ok(s)
}

pub fn preset_fig4(base: &Scenario) -> Result<Scenario> {
    let mut s = with(base, "fig4", &PresetOptions::default())?;
    s.axes = vec![
        SweepAxis::new(Parameter::GammaDeg, vec![0.0, 10.0, 20.0]),
        SweepAxis::new(Parameter::AlphaDeg, (0..=20).map(f64::from).collect()),
    ];
    s.cases = vec![Case::Misaligned, Case::Abs, Case::Dbs];
    s.metrics = vec![Metric::AvgCg, Metric::AvgImi];
    s.evaluation = Evaluation::Lowest;
    Ok(s)
}

pub fn preset_fig5(base: &Scenario, opts: &PresetOptions) -> Result<Scenario> {
    let mut s = with(base, "fig5", opts)?;
    s.axes = vec![
        SweepAxis::new(Parameter::TiltDeg, vec![10.0, 15.0, 20.0]),
        SweepAxis::new(Parameter::SnrDb, opts.snr_db.clone()),
    ];
    s.cases = Case::ALL.to_vec();
    s.metrics = vec![Metric::Se];
    s.evaluation = Evaluation::Band;
    Ok(s)
}

/// Array sizes 15 and 32 at a 20° tilt, one mode per element.
pub fn preset_fig6(base: &Scenario, opts: &PresetOptions) -> Result<Scenario> {
    let mut s = with(base, "fig6", opts)?;
    s.params.pose.alpha = 20f64.to_radians();
    s.params.pose.gamma = 20f64.to_radians();
    s.modes = ModeChoice::Symmetric(None);
    s.axes = vec![
        SweepAxis::new(Parameter::Elements, vec![15.0, 32.0]),
        SweepAxis::new(Parameter::SnrDb, opts.snr_db.clone()),
    ];
    s.cases = Case::ALL.to_vec();
    s.metrics = vec![Metric::Se];
    s.evaluation = Evaluation::Band;
    Ok(s)
}

/// `k R_r ρ` at the carrier and `|k_g| R_r ρ` at the lower band edge, per tilt.
pub fn run_table2(base: &Scenario) -> Result<ResultSet> {
    run_sweep(&preset_table2(base)?)
}

/// Focus-mode channel gain and interference at `f_L`, unsteered and steered.
pub fn run_table3(base: &Scenario) -> Result<ResultSet> {
    run_sweep(&preset_table3(base)?)
}

/// Focus-mode SINR at every subcarrier for each tilt.
pub fn run_fig3(base: &Scenario, opts: &PresetOptions) -> Result<ResultSet> {
    run_sweep(&preset_fig3(base, opts)?)
}

/// Mode-averaged gain and interference over a grid of tilts at `f_L`.
pub fn run_fig4(base: &Scenario) -> Result<ResultSet> {
    run_sweep(&preset_fig4(base)?)
}

/// Spectral efficiency against SNR; the x-axis variable is assumed to be SNR.
pub fn run_fig5(base: &Scenario, opts: &PresetOptions) -> Result<ResultSet> {
    run_sweep(&preset_fig5(base, opts)?)
}

pub fn run_fig6(base: &Scenario, opts: &PresetOptions) -> Result<ResultSet> {
    run_sweep(&preset_fig6(base, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build_channel_exact;
    use crate::metrics::{sinr, PowerAllocation, PowerMode};
    use crate::oam::{effective_oam_channel, make_fourier, ModeSet};

    fn value(rs: &ResultSet, row: &ResultRow, metric: &str) -> f64 {
        row.values[rs.column(metric).unwrap()]
    }

    #[test]
    fn table2_values() {
        let rs = run_table2(&Scenario::default()).unwrap();
        assert_eq!(rs.rows.len(), 5);
        assert!(!rs.has_case);
        let want = [
            (1.55, 2.15e-2),
            (7.73, 1.07e-1),
            (15.31, 2.13e-1),
            (22.6, 3.14e-1),
            (29.49, 4.09e-1),
        ];
        for (row, (kp, kg)) in rs.rows.iter().zip(want) {
            assert!((value(&rs, row, "kp_r_rho") / kp - 1.0).abs() <= 0.01, "{row:?}");
            assert!((value(&rs, row, "kg_r_rho") / kg - 1.0).abs() <= 0.01, "{row:?}");
        }
    }

    #[test]
    fn untilted_arguments_vanish() {
        let mut s = preset_table2(&Scenario::default()).unwrap();
        s.axes = vec![SweepAxis::new(Parameter::TiltDeg, vec![0.0])];
        let rs = run_sweep(&s).unwrap();
        assert_eq!(rs.rows[0].values, vec![0.0, 0.0]);
    }

    #[test]
    fn table3_rows() {
        let rs = run_table3(&Scenario::default()).unwrap();
        assert_eq!(rs.rows.len(), 6);
        let want = [
            (Case::Misaligned, 5.0, 2.99e-2, 4.29e-2, 0.10),
            (Case::Abs, 5.0, 4.76e-1, 8.52e-4, 0.25),
            (Case::Dbs, 5.0, 4.79e-1, 2.57e-5, 0.50),
            (Case::Misaligned, 15.0, 2.74e-2, 5.30e-2, 0.10),
            (Case::Abs, 15.0, 4.58e-1, 8.11e-3, 0.25),
            (Case::Dbs, 15.0, 4.85e-1, 9.72e-4, 0.25),
        ];
        for (row, (case, tilt, cg, imi, imi_tol)) in rs.rows.iter().zip(want) {
            assert_eq!((row.case, row.axes[0]), (Some(case), tilt));
            assert!((value(&rs, row, "mode_cg") / cg - 1.0).abs() <= 0.10, "{row:?}");
            assert!((value(&rs, row, "mode_imi") / imi - 1.0).abs() <= imi_tol, "{row:?}");
        }
    }

    #[test]
    fn row_counts_and_order() {
        let mut s = Scenario::default();
        s.evaluation = Evaluation::Center;
        s.cases = vec![Case::Misaligned];
        s.axes = vec![
            SweepAxis::new(Parameter::TiltDeg, vec![1.0, 2.0, 3.0]),
            SweepAxis::new(Parameter::SnrDb, vec![0.0, 5.0, 10.0, 15.0]),
        ];
        let rs = run_sweep(&s).unwrap();
        assert_eq!(rs.rows.len(), 12);
        assert_eq!(rs.rows[1].axes, vec![1.0, 5.0]);
        assert_eq!(rs.rows[4].axes, vec![2.0, 0.0]);
    }

    #[test]
    fn single_point_matches_direct_evaluation() {
        let mut s = Scenario::default();
        s.evaluation = Evaluation::Subcarrier(100);
        s.cases = vec![Case::Misaligned];
        s.metrics = vec![Metric::ModeSinr, Metric::AvgCg];
        s.axes = vec![SweepAxis::new(Parameter::TiltDeg, vec![7.0])];
        let rs = run_sweep(&s).unwrap();
        assert_eq!(rs.rows.len(), 1);

        let mut params = s.params;
        params.pose.alpha = 7f64.to_radians();
        params.pose.gamma = 7f64.to_radians();
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let ch = effective_oam_channel(&build_channel_exact(&params, &s.grid, 100).unwrap(), &f).unwrap();
        let alloc = PowerAllocation::from_snr(20.0, 0.01, PowerMode::PerMode, 15).unwrap();
        let direct = sinr(&ch, &alloc)[modes.position(1).unwrap()];
        assert_eq!(rs.rows[0].values[0], direct);
    }

    #[test]
    fn presets_equal_hand_written_sweeps() {
        let base = Scenario::default();
        let mut s = base.clone();
        s.name = "table3".into();
        s.axes = vec![SweepAxis {
            parameter: "tilt_deg".into(),
            values: vec![5.0, 15.0],
        }];
        s.cases = vec![Case::Misaligned, Case::Abs, Case::Dbs];
        s.metrics = vec![Metric::ModeCg, Metric::ModeImi];
        s.evaluation = Evaluation::Lowest;
        assert_eq!(run_sweep(&s).unwrap(), run_table3(&base).unwrap());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let opts = PresetOptions {
            snr_db: vec![0.0, 10.0, 20.0],
            decimate: 20,
        };
        let s = preset_fig5(&Scenario::default(), &opts).unwrap();
        let a = run_sweep_with(&s, false).unwrap();
        let b = run_sweep_with(&s, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, run_sweep(&s).unwrap());
        assert_eq!(a.rows.len(), 3 * 3 * 4);
    }

    #[test]
    fn untilted_cases_coincide() {
        let mut s = preset_fig4(&Scenario::default()).unwrap();
        s.axes = vec![
            SweepAxis::new(Parameter::GammaDeg, vec![0.0]),
            SweepAxis::new(Parameter::AlphaDeg, vec![0.0]),
        ];
        let rs = run_sweep(&s).unwrap();
        assert_eq!(rs.rows.len(), 3);
        assert_eq!(rs.rows[0].values, rs.rows[1].values);
        assert_eq!(rs.rows[0].values, rs.rows[2].values);
    }

    #[test]
    fn unknown_parameter_rejected() {
        let mut s = Scenario::default();
        s.axes = vec![SweepAxis {
            parameter: "beta".into(),
            values: vec![1.0],
        }];
        assert!(matches!(run_sweep(&s), Err(crate::Error::UnknownParameter(_))));
    }

    #[test]
    fn monte_carlo_metric_is_seeded_per_point() {
        let mut s = Scenario::default();
        s.evaluation = Evaluation::Subcarrier(10);
        s.cases = vec![Case::Misaligned];
        s.metrics = vec![Metric::McModeSinr, Metric::ModeSinr];
        s.monte_carlo_symbols = 4_000;
        s.seed = 11;
        s.axes = vec![SweepAxis::new(Parameter::TiltDeg, vec![4.0, 8.0])];
        let a = run_sweep_with(&s, true).unwrap();
        assert_eq!(a, run_sweep_with(&s, false).unwrap());
        for row in &a.rows {
            assert!((row.values[0] / row.values[1] - 1.0).abs() < 0.1);
        }
        s.seed = 12;
        assert_ne!(a.rows[0].values[0], run_sweep(&s).unwrap().rows[0].values[0]);
    }
}
