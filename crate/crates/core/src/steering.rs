//! Receive-side beam steering.
//!
//! Both schemes multiply the despiraliser rows elementwise by
//! `w_m = exp(j k R_r (−cos φ_m sin γ + sin φ_m sin α cos γ))`. Analog steering
//! fixes `k` at an anchor subcarrier `A` for the whole band; digital steering
//! uses the wavenumber of each subcarrier.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::channel::{ChannelMatrix, ChannelParams, OfdmGrid};
use crate::error::{Error, Result};
use crate::geometry::{tilt_offset, LinkPose, ObliqueFactors, UcaConfig};
use crate::numerics::bessel_j;
use crate::oam::{closed_form_terms, despiralize, FourierMatrix, ModeSet, OamChannel, Steering};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringWeights {
    pub weights: Array1<Complex64>,
    pub scheme: Steering,
    pub wavenumber: f64,
}

impl SteeringWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Offset `g = p − A` of a subcarrier from the analog anchor and the matching
/// wavenumber `k_g = 2π g Δf / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyDeviation {
    pub g: i64,
    pub k_g: f64,
}

impl FrequencyDeviation {
    pub fn new(grid: &OfdmGrid, p: usize, anchor: usize) -> Result<Self> {
        grid.check(p)?;
        grid.check(anchor)?;
        let g = p as i64 - anchor as i64;
        Ok(Self {
            g,
            k_g: 2.0 * PI * g as f64 * grid.subcarrier_spacing / SPEED_OF_LIGHT,
        })
    }

    /// Deviation of an arbitrary frequency from the anchor, for evaluations
    /// off the subcarrier grid.
    pub fn at_frequency(grid: &OfdmGrid, frequency: f64, anchor: usize) -> Result<Self> {
        let anchor_freq = grid.frequency(anchor)?;
        let offset = frequency - anchor_freq;
        Ok(Self {
            g: (offset / grid.subcarrier_spacing).round() as i64,
            k_g: 2.0 * PI * offset / SPEED_OF_LIGHT,
        })
    }
}

/// Weights for an arbitrary wavenumber.
pub fn steering_weights_at(
    rx: &UcaConfig,
    pose: &LinkPose,
    wavenumber: f64,
    scheme: Steering,
) -> Result<SteeringWeights> {
    rx.validate()?;
    pose.validate()?;
    if !(wavenumber.is_finite() && wavenumber > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {wavenumber}")));
    }
    let weights = rx
        .azimuths()
        .into_iter()
        .map(|phi| Complex64::from_polar(1.0, wavenumber * rx.radius * tilt_offset(phi, pose)))
        .collect();
    Ok(SteeringWeights {
        weights,
        scheme,
        wavenumber,
    })
}

/// Analog weights anchored at subcarrier `anchor` (`f_A = f_L + A Δf`).
pub fn abs_weights(rx: &UcaConfig, pose: &LinkPose, grid: &OfdmGrid, anchor: usize) -> Result<SteeringWeights> {
    steering_weights_at(rx, pose, grid.wavenumber(anchor)?, Steering::Abs)
}

pub fn dbs_weights(rx: &UcaConfig, pose: &LinkPose, grid: &OfdmGrid, p: usize) -> Result<SteeringWeights> {
    steering_weights_at(rx, pose, grid.wavenumber(p)?, Steering::Dbs)
}

/// `(w ⊙ F_U) H F_Uᴴ`.
pub fn steered_oam_channel(h: &ChannelMatrix, f: &FourierMatrix, w: &SteeringWeights) -> Result<OamChannel> {
    if w.len() != f.elements() {
        return Err(Error::DimensionMismatch(format!(
            "{} steering weights for {} elements",
            w.len(),
            f.elements()
        )));
    }
    let rows = steer_rows(&f.rows, &w.weights);
    despiralize(h, &rows, f, w.scheme)
}

pub(crate) fn steer_rows(rows: &Array2<Complex64>, w: &Array1<Complex64>) -> Array2<Complex64> {
    rows * &w.view().insert_axis(ndarray::Axis(0))
}

/// Closed form after analog steering:
/// `η′(k_p) J_{ℓ_v}(k_p R_r R_t / D) J_t(k_g R_r ρ)`.
#[allow(clippy::too_many_arguments)]
pub fn closed_form_abs_entry(
    u: usize,
    v: usize,
    modes: &ModeSet,
    params: &ChannelParams,
    wavenumber: f64,
    deviation: &FrequencyDeviation,
    factors: &ObliqueFactors,
) -> Result<Complex64> {
    let terms = closed_form_terms(u, v, modes, params, wavenumber, factors)?;
    let residual = deviation.k_g * params.rx.radius * factors.rho;
    Ok(terms.eta_prime * bessel_j(terms.mode_v, terms.coupling_arg)? * bessel_j(terms.t, residual)?)
}

/// Closed form after digital steering: `η″ J_{ℓ_v}(k_p R_r R_t / D)` on the
/// diagonal and zero elsewhere. Independent of the tilt.
pub fn closed_form_dbs_entry(
    u: usize,
    v: usize,
    modes: &ModeSet,
    params: &ChannelParams,
    wavenumber: f64,
) -> Result<Complex64> {
    let flat = ObliqueFactors {
        nu: 0.0,
        mu: 0.0,
        rho: 0.0,
        phi: 0.0,
    };
    let terms = closed_form_terms(u, v, modes, params, wavenumber, &flat)?;
    if terms.t != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(terms.eta_double_prime * bessel_j(terms.mode_v, terms.coupling_arg)?)
}
