//! Special functions and numerical helpers.
//!
//! Integer-order Bessel functions of the first kind are evaluated by power
//! series for small arguments and by Miller's downward recurrence, normalised
//! with `J_0 + 2 * sum(J_2k) = 1`, everywhere else. The adaptive Simpson
//! integrator evaluates the integral representation of `J_n` directly and
//! serves as an independent check on the closed forms.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Integer Bessel order. Orders appear as mode numbers and mode differences,
/// so both signs are common.
pub type BesselOrder = i32;

/// Arguments up to this magnitude always use the power series.
const SERIES_LIMIT: f64 = 8.0;

const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// `J_n(x)` for integer `n` and finite real `x`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j argument {x} is not finite")));
    }
    let n = order.unsigned_abs();
    let ax = x.abs();
    let magnitude = if ax == 0.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else if ax <= SERIES_LIMIT || ax * ax / 4.0 < f64::from(n + 1) {
        series(n, ax)
    } else {
        miller(n, ax)
    };
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    let odd = n % 2 == 1;
    let flip = odd && ((order < 0) != (x < 0.0));
    Ok(if flip { -magnitude } else { magnitude })
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / f64::from(i);
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -q / (k * (k + f64::from(n)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = f64::from(n).max(x.ceil());
    let start = top + 20.0 + (40.0 * top).sqrt();
    let mut k = 2 * (start as u32).div_ceil(2);

    let mut above = 0.0;
    let mut current = 1.0;
    let mut wanted = if k == n { current } else { 0.0 };
    // even-order normalisation sum, J_0 counted once at the end
    let mut even_sum = if k.is_multiple_of(2) { current } else { 0.0 };

    let two_over_x = 2.0 / x;
    while k > 0 {
        let below = f64::from(k) * two_over_x * current - above;
        above = current;
        current = below;
        k -= 1;
        if k == n {
            wanted = current;
        }
        if k.is_multiple_of(2) && k > 0 {
            even_sum += current;
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            wanted *= RESCALE_BY;
            even_sum *= RESCALE_BY;
        }
    }
    let norm = current + 2.0 * even_sum;
    wanted / norm
}

/// Error budget for [`integrate`] and [`bessel_integral_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tolerance: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tolerance > 0.0) {
            return Err(Error::invalid("abs_tolerance", "must be > 0"));
        }
        if max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(Self {
            abs_tolerance,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tolerance: 1e-13,
            max_subdivisions: 1 << 22,
        }
    }
}

/// Number of equal panels the interval is cut into before adaptivity kicks in.
/// Periodic integrands sampled only at `a`, `(a+b)/2`, `b` can fool the
/// error estimate into stopping immediately.
const INITIAL_PANELS: usize = 64;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = spec.abs_tolerance / INITIAL_PANELS as f64;
    let mut budget = spec.max_subdivisions;
    let mut total = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, &mut budget)
            .ok_or(Error::Convergence {
                tolerance: spec.abs_tolerance,
                subdivisions: spec.max_subdivisions,
            })?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: &mut usize,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if *budget == 0 || m <= a || m >= b {
        return None;
    }
    *budget -= 1;
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, budget)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, budget)?;
    Some(l + r)
}

/// `(1/2π) ∫₀^{2π} cos(nθ − x sin θ) dθ` by adaptive quadrature.
///
/// Used as an independent oracle for [`bessel_j`].
pub fn bessel_integral_oracle(order: BesselOrder, x: f64, spec: QuadratureSpec) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("oracle argument {x} is not finite")));
    }
    let n = f64::from(order);
    let integral = integrate(
        |theta| (n * theta - x * theta.sin()).cos(),
        0.0,
        2.0 * PI,
        QuadratureSpec {
            // the result is divided by 2π below
            abs_tolerance: spec.abs_tolerance * 2.0 * PI,
            ..spec
        },
    )?;
    Ok(integral / (2.0 * PI))
}

/// `10^(db/10)`.
pub fn db_to_linear_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_power_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn j(n: i32, x: f64) -> f64 {
        bessel_j(n, x).unwrap()
    }

    #[test]
    fn j0_at_origin() {
        assert_eq!(j(0, 0.0), 1.0);
        assert_eq!(j(5, 0.0), 0.0);
        assert_eq!(j(-3, 0.0), 0.0);
    }

    #[test]
    fn non_finite_argument_is_rejected() {
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(2, f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_values() {
        // 30-digit mpmath values.
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (2, 1.0, 0.114_903_484_931_900_48),
            (0, 10.0, -0.245_935_764_451_348_3),
            (1, 10.0, 0.043_472_746_168_861_44),
            (10, 10.0, 0.207_486_106_633_358_9),
            (0, 50.0, 0.055_812_327_669_251_8),
            (20, 1.0, 3.873_503_008_524_658e-25),
            (50, 100.0, -0.038_698_339_728_525_383),
            (0, 100.0, 0.019_985_850_304_223_12),
        ];
        for (n, x, want) in cases {
            let got = j(n, x);
            assert!((got - want).abs() < 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn complex_exponential_form_at_table_argument() {
        // (1/2π) ∫ exp(j(x sin θ − θ)) dθ: the imaginary part integrates to
        // zero, the real part is the oracle integrand.
        let x = 2.094;
        let spec = QuadratureSpec::default();
        let re = integrate(|t| (x * t.sin() - t).cos(), 0.0, 2.0 * PI, spec).unwrap() / (2.0 * PI);
        let im = integrate(|t| (x * t.sin() - t).sin(), 0.0, 2.0 * PI, spec).unwrap() / (2.0 * PI);
        assert!(im.abs() < 1e-12);
        assert!((j(1, x) - re).abs() < 1e-10);
    }

    #[test]
    fn oracle_examples() {
        let spec = QuadratureSpec::default();
        assert!((bessel_integral_oracle(0, 0.0, spec).unwrap() - 1.0).abs() < 1e-13);
        assert!(bessel_integral_oracle(5, 0.0, spec).unwrap().abs() < 1e-13);
        let o = bessel_integral_oracle(2, 1.0, spec).unwrap();
        assert!((o - j(2, 1.0)).abs() < 1e-10);
    }

    #[test]
    fn oracle_reports_exhausted_budget() {
        let spec = QuadratureSpec::new(1e-15, 1).unwrap();
        let err = bessel_integral_oracle(30, 80.0, spec).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::new(0.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, 0).is_err());
        assert!(QuadratureSpec::new(1e-9, 1).is_ok());
    }

    #[test]
    fn oracle_agreement_grid() {
        let spec = QuadratureSpec::default();
        // 25 orders x 20 arguments = 500 points
        let mut worst: f64 = 0.0;
        for n in -12i32..=12 {
            for i in 1..=20 {
                let x = 2.5 * f64::from(i) - 0.3 * f64::from(n.abs() % 3);
                let d = (j(n, x) - bessel_integral_oracle(n, x, spec).unwrap()).abs();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-9, "worst disagreement {worst:e}");
    }

    #[test]
    fn three_term_recurrence() {
        for n in -20..=20 {
            for i in 1..=100 {
                let x = 0.5 * f64::from(i);
                let lhs = j(n - 1, x) + j(n + 1, x);
                let rhs = 2.0 * f64::from(n) / x * j(n, x);
                assert!((lhs - rhs).abs() < 1e-9, "n={n} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn high_orders_and_large_arguments_match_oracle() {
        let spec = QuadratureSpec::default();
        for &(n, x) in &[(64, 100.0), (64, 60.0), (40, 99.5), (3, 97.0), (-63, 75.0)] {
            let d = (j(n, x) - bessel_integral_oracle(n, x, spec).unwrap()).abs();
            assert!(d < 1e-12, "J_{n}({x}) off by {d:e}");
        }
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear_power(0.0), 1.0);
        assert!((db_to_linear_power(20.0) - 100.0).abs() < 1e-12);
        assert!((db_to_linear_power(24.7) - 295.12).abs() < 0.01);
        assert!((linear_power_to_db(db_to_linear_power(-7.5)) + 7.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn parity_in_order(n in -64i32..=64, x in -100.0f64..100.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((j(-n, x) - sign * j(n, x)).abs() <= 1e-12);
        }

        #[test]
        fn parity_in_argument(n in -64i32..=64, x in 0.0f64..100.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((j(n, -x) - sign * j(n, x)).abs() <= 1e-12);
        }

        #[test]
        fn bounded_by_one(n in -200i32..=200, x in -500.0f64..500.0) {
            prop_assert!(j(n, x).abs() <= 1.0);
        }
    }
}
