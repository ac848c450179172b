//! Free-space UCA-to-UCA channel matrices and the OFDM subcarrier plan.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, LinkPose, UcaConfig};
use crate::numerics::db_to_linear_power;
use crate::SPEED_OF_LIGHT;

pub fn wavenumber(frequency: f64) -> f64 {
    2.0 * PI * frequency / SPEED_OF_LIGHT
}

/// Subcarrier plan. Subcarriers are numbered `1..=P`; subcarrier `p` sits at
/// `f_L + p·Δf` with `f_L = f_c − (P/2)·Δf`, so `f_{P/2} = f_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmGrid {
    pub center_frequency: f64,
    pub subcarrier_spacing: f64,
    pub subcarrier_count: usize,
}

impl OfdmGrid {
    pub fn new(center_frequency: f64, subcarrier_spacing: f64, subcarrier_count: usize) -> Result<Self> {
        let grid = Self {
            center_frequency,
            subcarrier_spacing,
            subcarrier_count,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_frequency > 0.0 && self.center_frequency.is_finite()) {
            return Err(Error::invalid("center_frequency", "must be finite and > 0"));
        }
        if !(self.subcarrier_spacing > 0.0 && self.subcarrier_spacing.is_finite()) {
            return Err(Error::invalid("subcarrier_spacing", "must be finite and > 0"));
        }
        if self.subcarrier_count == 0 {
            return Err(Error::invalid("subcarriers", "must be >= 1"));
        }
        if !(self.lowest_frequency() > 0.0) {
            return Err(Error::invalid(
                "subcarrier_spacing",
                "lowest frequency f_c - (P/2)·Δf must be > 0",
            ));
        }
        Ok(())
    }

    pub fn bandwidth(&self) -> f64 {
        self.subcarrier_count as f64 * self.subcarrier_spacing
    }

    /// `f_L`. Not itself a subcarrier: the first subcarrier is one spacing above.
    pub fn lowest_frequency(&self) -> f64 {
        self.center_frequency - 0.5 * self.subcarrier_count as f64 * self.subcarrier_spacing
    }

    /// Frequency of subcarrier `p` (one-based).
    pub fn frequency(&self, p: usize) -> Result<f64> {
        self.check(p)?;
        Ok(self.lowest_frequency() + p as f64 * self.subcarrier_spacing)
    }

    pub fn wavenumber(&self, p: usize) -> Result<f64> {
        Ok(wavenumber(self.frequency(p)?))
    }

    /// Default anchor subcarrier for analog steering: `P/2`, i.e. `f_c`.
    pub fn center_subcarrier(&self) -> usize {
        (self.subcarrier_count / 2).max(1)
    }

    pub fn subcarriers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.subcarrier_count
    }

    /// Same band and centre with every `factor`-th subcarrier kept.
    pub fn decimated(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.subcarrier_count.is_multiple_of(factor) {
            return Err(Error::invalid(
                "decimation",
                format!("{factor} must divide the subcarrier count {}", self.subcarrier_count),
            ));
        }
        Self::new(
            self.center_frequency,
            self.subcarrier_spacing * factor as f64,
            self.subcarrier_count / factor,
        )
    }

    pub(crate) fn check(&self, p: usize) -> Result<()> {
        if p == 0 || p > self.subcarrier_count {
            return Err(Error::IndexOutOfRange {
                what: "subcarrier",
                index: p,
                len: self.subcarrier_count,
            });
        }
        Ok(())
    }
}

/// Everything the free-space channel depends on apart from frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub beta_db: f64,
    pub tx: UcaConfig,
    pub rx: UcaConfig,
    pub pose: LinkPose,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        self.tx.validate()?;
        self.rx.validate()?;
        self.pose.validate()?;
        if self.tx.elements != self.rx.elements {
            return Err(Error::invalid(
                "elements",
                format!(
                    "transmit ({}) and receive ({}) arrays must have the same size",
                    self.tx.elements, self.rx.elements
                ),
            ));
        }
        if !self.beta_db.is_finite() {
            return Err(Error::invalid("beta_db", "must be finite"));
        }
        Ok(())
    }

    pub fn beta_linear(&self) -> f64 {
        db_to_linear_power(self.beta_db)
    }

    pub fn elements(&self) -> usize {
        self.rx.elements
    }
}

/// `N × N` channel at one frequency; entry `(m, n)` couples transmit element
/// `n` to receive element `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: Array2<Complex64>,
    /// `None` when built at a frequency that is not on the grid (e.g. `f_L`).
    pub subcarrier: Option<usize>,
    pub wavenumber: f64,
}

impl ChannelMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// `(β / 2kd) · exp(−jkd)`.
pub fn freespace_coefficient(distance: f64, wavenumber: f64, beta_linear: f64) -> Result<Complex64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::Domain(format!("distance {distance} must be finite and > 0")));
    }
    if !(wavenumber > 0.0) || !wavenumber.is_finite() {
        return Err(Error::Domain(format!("wavenumber {wavenumber} must be finite and > 0")));
    }
    Ok(coefficient(distance, wavenumber, beta_linear))
}

fn coefficient(distance: f64, k: f64, beta: f64) -> Complex64 {
    Complex64::from_polar(beta / (2.0 * k * distance), -k * distance)
}

/// Channel from exact element-to-element distances, at subcarrier `p`.
pub fn build_channel_exact(params: &ChannelParams, grid: &OfdmGrid, p: usize) -> Result<ChannelMatrix> {
    let mut h = build_channel_exact_at(params, grid.frequency(p)?)?;
    h.subcarrier = Some(p);
    Ok(h)
}

/// Channel from exact distances at an arbitrary frequency in Hz.
pub fn build_channel_exact_at(params: &ChannelParams, frequency: f64) -> Result<ChannelMatrix> {
    params.validate()?;
    let k = checked_wavenumber(frequency)?;
    let beta = params.beta_linear();
    let n = params.elements();
    let tx: Vec<_> = (0..n)
        .map(|i| geometry::transmit_element_position(i, &params.tx))
        .collect::<Result<_>>()?;
    let rx: Vec<_> = (0..n)
        .map(|i| geometry::receive_element_position(i, &params.rx, &params.pose))
        .collect::<Result<_>>()?;
    let entries = Array2::from_shape_fn((n, n), |(m, t)| coefficient(rx[m].distance_to(&tx[t]), k, beta));
    Ok(ChannelMatrix {
        entries,
        subcarrier: None,
        wavenumber: k,
    })
}

/// Far-field closed form: uniform amplitude `β / 2kD`, phase from the
/// first-order distance expansion.
pub fn build_channel_approx(params: &ChannelParams, grid: &OfdmGrid, p: usize) -> Result<ChannelMatrix> {
    let mut h = build_channel_approx_at(params, grid.frequency(p)?)?;
    h.subcarrier = Some(p);
    Ok(h)
}

pub fn build_channel_approx_at(params: &ChannelParams, frequency: f64) -> Result<ChannelMatrix> {
    params.validate()?;
    geometry::check_far_field(&params.tx, &params.rx, &params.pose)?;
    let k = checked_wavenumber(frequency)?;
    let amplitude = params.beta_linear() / (2.0 * k * params.pose.distance);
    let tx_phi = params.tx.azimuths();
    let rx_phi = params.rx.azimuths();
    let n = params.elements();
    let entries = Array2::from_shape_fn((n, n), |(m, t)| {
        let d = geometry::farfield_distance_at(
            tx_phi[t],
            rx_phi[m],
            params.tx.radius,
            params.rx.radius,
            &params.pose,
        );
        Complex64::from_polar(amplitude, -k * d)
    });
    Ok(ChannelMatrix {
        entries,
        subcarrier: None,
        wavenumber: k,
    })
}

fn checked_wavenumber(frequency: f64) -> Result<f64> {
    if !(frequency > 0.0) || !frequency.is_finite() {
        return Err(Error::Domain(format!("frequency {frequency} must be finite and > 0")));
    }
    Ok(wavenumber(frequency))
}
