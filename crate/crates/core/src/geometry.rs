//! Array placement and element-pair distances.
//!
//! The transmit array lies in the `z = 0` plane centred on the origin. The
//! receive array is built in its own frame, tilted by `alpha` about x and then
//! by `gamma` about y, and finally translated to `(0, 0, D)`.
//!
//! Element indices are zero-based: element `i` of an `N`-element array sits at
//! azimuth `2πi/N + initial_azimuth`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio `D / max(R_t, R_r)` below which the far-field expansions are refused.
pub const FAR_FIELD_RATIO: f64 = 10.0;

/// A uniform circular array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcaConfig {
    pub elements: usize,
    /// metres
    pub radius: f64,
    /// radians
    pub initial_azimuth: f64,
}

impl UcaConfig {
    pub fn new(elements: usize, radius: f64, initial_azimuth: f64) -> Result<Self> {
        let cfg = Self {
            elements,
            radius,
            initial_azimuth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements == 0 {
            return Err(Error::invalid("elements", "must be >= 1"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("radius", "must be finite and > 0"));
        }
        if !self.initial_azimuth.is_finite() {
            return Err(Error::invalid("initial_azimuth", "must be finite"));
        }
        Ok(())
    }

    /// Azimuth of element `index` (zero-based).
    pub fn azimuth(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.azimuth_unchecked(index))
    }

    pub(crate) fn azimuth_unchecked(&self, index: usize) -> f64 {
        2.0 * PI * index as f64 / self.elements as f64 + self.initial_azimuth
    }

    pub fn azimuths(&self) -> Vec<f64> {
        (0..self.elements).map(|i| self.azimuth_unchecked(i)).collect()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.elements {
            return Err(Error::IndexOutOfRange {
                what: "element",
                index: index + 1,
                len: self.elements,
            });
        }
        Ok(())
    }
}

/// Placement of the receive array relative to the transmit array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPose {
    /// centre-to-centre distance `D`, metres
    pub distance: f64,
    /// tilt about x, radians
    pub alpha: f64,
    /// tilt about y, radians
    pub gamma: f64,
}

impl LinkPose {
    pub fn new(distance: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let pose = Self {
            distance,
            alpha,
            gamma,
        };
        pose.validate()?;
        Ok(pose)
    }

    pub fn aligned(distance: f64) -> Self {
        Self {
            distance,
            alpha: 0.0,
            gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(Error::invalid("distance", "must be finite and > 0"));
        }
        if !(self.alpha.is_finite() && self.gamma.is_finite()) {
            return Err(Error::invalid("alpha/gamma", "must be finite"));
        }
        Ok(())
    }

    pub fn is_aligned(&self) -> bool {
        self.alpha == 0.0 && self.gamma == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_to(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl From<Vector3<f64>> for Point3 {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<Point3> for Vector3<f64> {
    fn from(p: Point3) -> Self {
        Vector3::new(p.x, p.y, p.z)
    }
}

/// Polar form of the tilt: `ν = sin γ`, `μ = sin α cos γ`, `ρ = |(μ, ν)|`,
/// `φ = atan2(ν, μ)`, so that `μ = ρ cos φ` and `ν = ρ sin φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObliqueFactors {
    pub nu: f64,
    pub mu: f64,
    pub rho: f64,
    pub phi: f64,
}

pub fn rotation_x(alpha: f64) -> Matrix3<f64> {
    let (s, c) = alpha.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, c, -s, //
        0.0, s, c,
    )
}

pub fn rotation_y(gamma: f64) -> Matrix3<f64> {
    let (s, c) = gamma.sin_cos();
    Matrix3::new(
        c, 0.0, s, //
        0.0, 1.0, 0.0, //
        -s, 0.0, c,
    )
}

/// Position of transmit element `n` (zero-based).
pub fn transmit_element_position(n: usize, tx: &UcaConfig) -> Result<Point3> {
    let phi = tx.azimuth(n)?;
    Ok(Point3::new(tx.radius * phi.cos(), tx.radius * phi.sin(), 0.0))
}

/// Position of receive element `m` (zero-based) after tilting and
/// translating the receive array.
pub fn receive_element_position(m: usize, rx: &UcaConfig, pose: &LinkPose) -> Result<Point3> {
    let phi = rx.azimuth(m)?;
    Ok(receive_position_at(phi, rx.radius, pose))
}

/// Closed form of `R_y(γ) R_x(α) (R cos φ, R sin φ, 0) + (0, 0, D)`.
pub(crate) fn receive_position_at(phi: f64, radius: f64, pose: &LinkPose) -> Point3 {
    let (sp, cp) = phi.sin_cos();
    let (sa, ca) = pose.alpha.sin_cos();
    let (sg, cg) = pose.gamma.sin_cos();
    Point3::new(
        radius * cp * cg + radius * sp * sa * sg,
        radius * sp * ca,
        pose.distance - radius * cp * sg + radius * sp * sa * cg,
    )
}

/// Euclidean distance from transmit element `n` to receive element `m`.
pub fn exact_distance(
    n: usize,
    m: usize,
    tx: &UcaConfig,
    rx: &UcaConfig,
    pose: &LinkPose,
) -> Result<f64> {
    let t = transmit_element_position(n, tx)?;
    let r = receive_element_position(m, rx, pose)?;
    Ok(r.distance_to(&t))
}

pub(crate) fn check_far_field(tx: &UcaConfig, rx: &UcaConfig, pose: &LinkPose) -> Result<()> {
    let radius = tx.radius.max(rx.radius);
    if pose.distance < FAR_FIELD_RATIO * radius {
        return Err(Error::FarField {
            distance: pose.distance,
            radius,
        });
    }
    Ok(())
}

/// First-order far-field expansion of the element-pair distance.
pub fn farfield_distance(
    n: usize,
    m: usize,
    tx: &UcaConfig,
    rx: &UcaConfig,
    pose: &LinkPose,
) -> Result<f64> {
    check_far_field(tx, rx, pose)?;
    let phi_n = tx.azimuth(n)?;
    let phi_m = rx.azimuth(m)?;
    Ok(farfield_distance_at(phi_n, phi_m, tx.radius, rx.radius, pose))
}

pub(crate) fn farfield_distance_at(
    phi_n: f64,
    phi_m: f64,
    tx_radius: f64,
    rx_radius: f64,
    pose: &LinkPose,
) -> f64 {
    let (sm, cm) = phi_m.sin_cos();
    let (sn, cn) = phi_n.sin_cos();
    let (sa, ca) = pose.alpha.sin_cos();
    let (sg, cg) = pose.gamma.sin_cos();
    let d = pose.distance;
    let coupling = rx_radius * tx_radius / d;
    d - coupling * sm * cn * sa * sg - coupling * (cm * cn * cg + sm * sn * ca)
        + rx_radius * (-cm * sg + sm * sa * cg)
}

/// Tilt-induced path offset of a receive element at azimuth `phi` relative to
/// its aligned position, per unit radius: `-cos φ sin γ + sin φ sin α cos γ`.
/// Steering weights compensate exactly this term.
pub fn tilt_offset(phi: f64, pose: &LinkPose) -> f64 {
    let (sp, cp) = phi.sin_cos();
    -cp * pose.gamma.sin() + sp * pose.alpha.sin() * pose.gamma.cos()
}

pub fn oblique_factors(pose: &LinkPose) -> Result<ObliqueFactors> {
    let half_pi = 0.5 * PI;
    if !(pose.alpha.abs() < half_pi && pose.gamma.abs() < half_pi) {
        return Err(Error::Domain(format!(
            "oblique angles must satisfy |alpha|, |gamma| < pi/2 (got {}, {})",
            pose.alpha, pose.gamma
        )));
    }
    let nu = pose.gamma.sin();
    let mu = pose.alpha.sin() * pose.gamma.cos();
    Ok(ObliqueFactors {
        nu,
        mu,
        rho: nu.hypot(mu),
        phi: nu.atan2(mu),
    })
}
