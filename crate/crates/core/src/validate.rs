//! Fast self-checks of the numerical building blocks.

use num_complex::Complex64;

use crate::channel::build_channel_exact;
use crate::error::Result;
use crate::geometry::{rotation_x, rotation_y};
use crate::numerics::{bessel_integral_oracle, bessel_j, QuadratureSpec};
use crate::oam::{effective_oam_channel, make_fourier};
use crate::scenario::Scenario;
use crate::steering::{abs_weights, dbs_weights, steered_oam_channel};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest deviation seen.
    pub measured: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, tolerance: f64, measured: f64) -> Self {
        Self {
            name,
            tolerance,
            measured,
            passed: measured <= tolerance,
        }
    }
}

/// Test hooks for exercising the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    /// Negate the first analog steering weight before comparing it with the
    /// digital one.
    pub flip_weight_sign: bool,
}

fn fourier_orthonormality(s: &Scenario) -> Result<f64> {
    let modes = s.mode_set()?;
    let f = make_fourier(&modes, s.params.elements())?;
    let gram = f.rows.dot(&f.rows.t().mapv(|z| z.conj()));
    Ok(gram
        .indexed_iter()
        .map(|((i, j), z)| (z - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max))
}

fn aligned_diagonalization(s: &Scenario) -> Result<f64> {
    let mut params = s.params;
    params.pose.alpha = 0.0;
    params.pose.gamma = 0.0;
    let modes = s.mode_set()?;
    let f = make_fourier(&modes, params.elements())?;
    let p_count = s.grid.subcarrier_count;
    let mut worst: f64 = 0.0;
    for p in [1, s.grid.center_subcarrier(), p_count] {
        let m = effective_oam_channel(&build_channel_exact(&params, &s.grid, p)?, &f)?.entries;
        let min_diag = (0..m.nrows()).map(|i| m[[i, i]].norm()).fold(f64::INFINITY, f64::min);
        let max_off = m
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(max_off / min_diag);
    }
    Ok(worst)
}

fn bessel_recurrence() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in -15..15 {
        for i in 1..=40 {
            let x = 0.75 * f64::from(i);
            let lhs = bessel_j(n - 1, x)? + bessel_j(n + 1, x)?;
            let rhs = 2.0 * f64::from(n) / x * bessel_j(n, x)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

fn bessel_parity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..20 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..=30 {
            let x = 0.9 * f64::from(i);
            worst = worst.max((bessel_j(-n, x)? - sign * bessel_j(n, x)?).abs());
            worst = worst.max((bessel_j(n, -x)? - sign * bessel_j(n, x)?).abs());
        }
    }
    Ok(worst)
}

fn bessel_oracle() -> Result<f64> {
    let spec = QuadratureSpec::new(1e-13, 1 << 20)?;
    let mut worst: f64 = 0.0;
    for n in [-7, -2, 0, 1, 4, 9] {
        for x in [0.3, 2.094, 7.73, 15.31, 29.49] {
            worst = worst.max((bessel_j(n, x)? - bessel_integral_oracle(n, x, spec)?).abs());
        }
    }
    Ok(worst)
}

fn rotation_orthogonality() -> f64 {
    let mut worst: f64 = 0.0;
    for i in -8..=8 {
        let a = 0.2 * f64::from(i);
        for r in [rotation_x(a), rotation_y(a), rotation_y(a) * rotation_x(-a)] {
            let gram = r.transpose() * r;
            for (g, e) in gram.iter().zip(nalgebra::Matrix3::<f64>::identity().iter()) {
                worst = worst.max((g - e).abs());
            }
            worst = worst.max((r.determinant() - 1.0).abs());
        }
    }
    worst
}

fn abs_equals_dbs_at_anchor(s: &Scenario, fault: FaultInjection) -> Result<f64> {
    let mut params = s.params;
    if params.pose.is_aligned() {
        params.pose.alpha = 10f64.to_radians();
        params.pose.gamma = 10f64.to_radians();
    }
    let modes = s.mode_set()?;
    let f = make_fourier(&modes, params.elements())?;
    let h = build_channel_exact(&params, &s.grid, s.anchor)?;
    let mut wa = abs_weights(&params.rx, &params.pose, &s.grid, s.anchor)?;
    if fault.flip_weight_sign {
        wa.weights[0] = -wa.weights[0];
    }
    let wd = dbs_weights(&params.rx, &params.pose, &s.grid, s.anchor)?;
    let a = steered_oam_channel(&h, &f, &wa)?.entries;
    let d = steered_oam_channel(&h, &f, &wd)?.entries;
    Ok(a.iter().zip(d.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

fn weight_modulus(s: &Scenario) -> Result<f64> {
    let mut params = s.params;
    params.pose.alpha = 13f64.to_radians();
    params.pose.gamma = -7f64.to_radians();
    let w = dbs_weights(&params.rx, &params.pose, &s.grid, 1)?;
    Ok(w.weights.iter().map(|z: &Complex64| (z.norm() - 1.0).abs()).fold(0.0, f64::max))
}

/// Runs every check against the scenario's geometry.
pub fn run_checks(s: &Scenario, fault: FaultInjection) -> Result<Vec<CheckOutcome>> {
    s.validate()?;
    Ok(vec![
        CheckOutcome::new("fourier_orthonormality", 1e-12, fourier_orthonormality(s)?),
        CheckOutcome::new("aligned_diagonalization", 1e-10, aligned_diagonalization(s)?),
        CheckOutcome::new("bessel_recurrence", 1e-10, bessel_recurrence()?),
        CheckOutcome::new("bessel_parity", 0.0, bessel_parity()?),
        CheckOutcome::new("bessel_quadrature_oracle", 1e-9, bessel_oracle()?),
        CheckOutcome::new("rotation_orthogonality", 1e-12, rotation_orthogonality()),
        CheckOutcome::new("steering_unit_modulus", 1e-14, weight_modulus(s)?),
        CheckOutcome::new("abs_equals_dbs_at_anchor", 0.0, abs_equals_dbs_at_anchor(s, fault)?),
    ])
}
