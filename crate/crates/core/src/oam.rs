//! Mode despiralisation and the effective OAM channel.
//!
//! With the partial Fourier matrix `F_U` (row `u` is `f(ℓ_u)`), the effective
//! channel at one frequency is `H_OAM = F_U H F_Uᴴ`. For an aligned link `H`
//! is circulant and `H_OAM` is diagonal; tilting the receive array couples
//! modes. The closed forms approximate each entry by a product of two Bessel
//! functions, one set by the array coupling `k R_r R_t / D` and one set by the
//! tilt `k R_r ρ`.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix, ChannelParams};
use crate::error::{Error, Result};
use crate::geometry::{ObliqueFactors, UcaConfig};
use crate::numerics::bessel_j;

/// Ordered list of distinct OAM mode numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeSet(Vec<i32>);

impl ModeSet {
    /// Checks the modes against an `elements`-element array: at most
    /// `elements` modes, pairwise distinct modulo `elements`.
    pub fn new(modes: Vec<i32>, elements: usize) -> Result<Self> {
        let set = Self(modes);
        set.validate_for(elements)?;
        Ok(set)
    }

    /// `{−⌊U/2⌋, …, ⌈U/2⌉ − 1}`; for `U = 15` that is `−7..=7`.
    pub fn symmetric(count: usize) -> Self {
        let lo = -((count / 2) as i32);
        Self((0..count as i32).map(|i| lo + i).collect())
    }

    pub fn validate_for(&self, elements: usize) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        if self.0.len() > elements {
            return Err(Error::invalid(
                "modes",
                format!("{} modes exceed the {elements} array elements", self.0.len()),
            ));
        }
        let n = elements as i64;
        for (i, &a) in self.0.iter().enumerate() {
            for &b in &self.0[i + 1..] {
                if (i64::from(a) - i64::from(b)).rem_euclid(n) == 0 {
                    return Err(Error::DuplicateMode {
                        first: a,
                        second: b,
                        elements,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, mode: i32) -> Option<usize> {
        self.0.iter().position(|&m| m == mode)
    }
}

/// `U × N` partial DFT with row `u` equal to
/// `(1/√N) [1, e^{−j2πℓ_u/N}, …, e^{−j2πℓ_u(N−1)/N}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMatrix {
    pub modes: ModeSet,
    pub rows: Array2<Complex64>,
}

impl FourierMatrix {
    pub fn elements(&self) -> usize {
        self.rows.ncols()
    }

    pub fn mode_count(&self) -> usize {
        self.rows.nrows()
    }
}

pub fn make_fourier(modes: &ModeSet, elements: usize) -> Result<FourierMatrix> {
    modes.validate_for(elements)?;
    let n = elements as f64;
    let scale = 1.0 / n.sqrt();
    let rows = Array2::from_shape_fn((modes.len(), elements), |(u, m)| {
        // reduce ℓ·m mod N first so the phase stays small and exact
        let k = (i64::from(modes.0[u]) * m as i64).rem_euclid(elements as i64);
        Complex64::from_polar(scale, -2.0 * PI * k as f64 / n)
    });
    Ok(FourierMatrix {
        modes: modes.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Steering {
    None,
    Abs,
    Dbs,
}

impl Steering {
    pub fn label(self) -> &'static str {
        match self {
            Steering::None => "none",
            Steering::Abs => "abs",
            Steering::Dbs => "dbs",
        }
    }
}

/// `U × U` effective channel at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct OamChannel {
    pub entries: Array2<Complex64>,
    pub subcarrier: Option<usize>,
    pub wavenumber: f64,
    pub steering: Steering,
}

impl OamChannel {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// `|h(u, v)|²` for every entry.
    pub fn powers(&self) -> Array2<f64> {
        self.entries.mapv(|h| h.norm_sqr())
    }

    /// Entries divided by `factor` (e.g. `N` for the large-array limit).
    pub fn scaled(&self, factor: f64) -> OamChannel {
        OamChannel {
            entries: self.entries.mapv(|h| h / factor),
            ..self.clone()
        }
    }
}

/// `F_U H F_Uᴴ`.
pub fn effective_oam_channel(h: &ChannelMatrix, f: &FourierMatrix) -> Result<OamChannel> {
    despiralize(h, &f.rows, f, Steering::None)
}

/// `(row_weights) H F_Uᴴ`, where `row_weights` is `F_U` possibly with steering
/// folded in.
pub(crate) fn despiralize(
    h: &ChannelMatrix,
    receive_rows: &Array2<Complex64>,
    f: &FourierMatrix,
    steering: Steering,
) -> Result<OamChannel> {
    if h.size() != f.elements() || receive_rows.dim() != f.rows.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel is {n}x{n} but the Fourier matrix is {}x{}",
            f.mode_count(),
            f.elements(),
            n = h.size()
        )));
    }
    let fh = f.rows.t().mapv(|z| z.conj());
    let entries = receive_rows.dot(&h.entries).dot(&fh);
    Ok(OamChannel {
        entries,
        subcarrier: h.subcarrier,
        wavenumber: h.wavenumber,
        steering,
    })
}

/// `ξ(t) = Σ_m exp(−j k R_r ρ sin(φ_m − φ) − j φ_m t)`.
pub fn xi_factor(t: i32, factors: &ObliqueFactors, rx: &UcaConfig, wavenumber: f64) -> Complex64 {
    let arg = wavenumber * rx.radius * factors.rho;
    rx.azimuths()
        .into_iter()
        .map(|phi| {
            Complex64::from_polar(1.0, -arg * (phi - factors.phi).sin() - phi * f64::from(t))
        })
        .sum()
}

/// Named intermediates of the Bessel closed forms for one `(u, v)` entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerms {
    /// `ℓ_u − ℓ_v`
    pub t: i32,
    pub mode_v: i32,
    /// `β/(2kDN) · e^{−jkD}`
    pub eta: Complex64,
    /// `η N² e^{jπℓ_v/2 − jπt − jφt}`
    pub eta_prime: Complex64,
    /// `(Nβ/2kD) e^{−jkD + jπℓ_v/2}`
    pub eta_double_prime: Complex64,
    /// `k R_r R_t / D`
    pub coupling_arg: f64,
    /// `k R_r ρ`
    pub tilt_arg: f64,
}

pub fn closed_form_terms(
    u: usize,
    v: usize,
    modes: &ModeSet,
    params: &ChannelParams,
    wavenumber: f64,
    factors: &ObliqueFactors,
) -> Result<ClosedFormTerms> {
    let mode = |i: usize| {
        modes.modes().get(i).copied().ok_or(Error::IndexOutOfRange {
            what: "mode",
            index: i + 1,
            len: modes.len(),
        })
    };
    let (lu, lv) = (mode(u)?, mode(v)?);
    let t = lu - lv;
    let n = params.elements() as f64;
    let d = params.pose.distance;
    let k = wavenumber;
    let beta = params.beta_linear();
    let eta = Complex64::from_polar(beta / (2.0 * k * d * n), -k * d);
    let tf = f64::from(t);
    let eta_prime =
        eta * n * n * Complex64::from_polar(1.0, FRAC_PI_2 * f64::from(lv) - PI * tf - factors.phi * tf);
    let eta_double_prime =
        Complex64::from_polar(n * beta / (2.0 * k * d), -k * d + FRAC_PI_2 * f64::from(lv));
    Ok(ClosedFormTerms {
        t,
        mode_v: lv,
        eta,
        eta_prime,
        eta_double_prime,
        coupling_arg: k * params.rx.radius * params.tx.radius / d,
        tilt_arg: k * params.rx.radius * factors.rho,
    })
}

/// Bessel closed form of the unsteered entry `(u, v)`:
/// `η′ J_{ℓ_v}(k R_r R_t / D) J_t(k R_r ρ)`.
pub fn closed_form_entry(
    u: usize,
    v: usize,
    modes: &ModeSet,
    params: &ChannelParams,
    wavenumber: f64,
    factors: &ObliqueFactors,
) -> Result<Complex64> {
    let terms = closed_form_terms(u, v, modes, params, wavenumber, factors)?;
    Ok(terms.eta_prime
        * bessel_j(terms.mode_v, terms.coupling_arg)?
        * bessel_j(terms.t, terms.tilt_arg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_approx_at, build_channel_exact_at, wavenumber, OfdmGrid};
    use crate::geometry::{oblique_factors, LinkPose};
    use crate::scenario::table1_params;

    fn tilted(deg: f64) -> ChannelParams {
        let mut p = table1_params();
        p.pose.alpha = deg.to_radians();
        p.pose.gamma = deg.to_radians();
        p
    }

    fn eye(n: usize) -> ChannelMatrix {
        ChannelMatrix {
            entries: Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0.into() } else { 0.0.into() }),
            subcarrier: None,
            wavenumber: 1.0,
        }
    }

    #[test]
    fn single_mode_row() {
        let f = make_fourier(&ModeSet::new(vec![0], 4).unwrap(), 4).unwrap();
        assert_eq!(f.rows.dim(), (1, 4));
        for z in f.rows.iter() {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn full_mode_set_is_unitary() {
        for n in [1usize, 2, 4, 15, 16, 32] {
            let f = make_fourier(&ModeSet::symmetric(n), n).unwrap();
            let gram = f.rows.t().mapv(|z| z.conj()).dot(&f.rows);
            for ((i, j), z) in gram.indexed_iter() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((z - want).norm() < 1e-13, "N={n} ({i},{j}) {z}");
            }
        }
    }

    #[test]
    fn rows_are_orthonormal() {
        let modes = ModeSet::new(vec![-3, 0, 1, 5, 9], 15).unwrap();
        let f = make_fourier(&modes, 15).unwrap();
        let gram = f.rows.dot(&f.rows.t().mapv(|z| z.conj()));
        for ((i, j), z) in gram.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-13);
        }
    }

    #[test]
    fn mode_set_validation() {
        assert!(matches!(
            ModeSet::new(vec![1, 16], 15),
            Err(Error::DuplicateMode { first: 1, second: 16, .. })
        ));
        assert!(matches!(
            ModeSet::new(vec![2, -13], 15),
            Err(Error::DuplicateMode { .. })
        ));
        assert!(ModeSet::new(vec![0, 1, 2], 2).is_err());
        assert!(ModeSet::new(vec![], 2).is_err());
        assert_eq!(ModeSet::symmetric(15).modes(), &(-7..=7).collect::<Vec<_>>()[..]);
        assert_eq!(ModeSet::symmetric(32).modes()[0], -16);
        assert_eq!(ModeSet::symmetric(32).modes()[31], 15);
    }

    #[test]
    fn identity_channel_gives_identity() {
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        let oam = effective_oam_channel(&eye(15), &f).unwrap();
        for ((i, j), z) in oam.entries.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-13);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = make_fourier(&ModeSet::symmetric(4), 4).unwrap();
        assert!(matches!(
            effective_oam_channel(&eye(5), &f),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn aligned_channel_diagonalises() {
        let params = table1_params();
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        for freq in [3.45e9, 3.5e9, 3.55e9] {
            let h = build_channel_exact_at(&params, freq).unwrap();
            let oam = effective_oam_channel(&h, &f).unwrap();
            let p = oam.entries.mapv(|z| z.norm());
            for i in 0..15 {
                for j in 0..15 {
                    if i != j {
                        assert!(p[[i, j]] <= 1e-10 * p[[i, i]], "({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn misaligned_table_row() {
        // MA, α = γ = 5°, f_L, ℓ_u = 1: CG 2.99e-2, IMI 4.29e-2
        let params = tilted(5.0);
        let grid = OfdmGrid::new(3.5e9, 60e3, 1620).unwrap();
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let h = build_channel_exact_at(&params, grid.lowest_frequency()).unwrap();
        let oam = effective_oam_channel(&h, &f).unwrap();
        let u = modes.position(1).unwrap();
        let p = oam.powers();
        let cg = p[[u, u]];
        let imi: f64 = (0..15).filter(|&v| v != u).map(|v| p[[u, v]]).sum();
        assert!((cg / 2.99e-2 - 1.0).abs() <= 0.10, "cg {cg}");
        assert!((imi / 4.29e-2 - 1.0).abs() <= 0.10, "imi {imi}");
    }

    #[test]
    fn xi_examples() {
        let rx = table1_params().rx;
        let k = wavenumber(3.5e9);
        let flat = oblique_factors(&LinkPose::aligned(1.0)).unwrap();
        assert!((xi_factor(0, &flat, &rx, k) - 15.0).norm() < 1e-12);
        for t in [1, -1, 7, -14, 16] {
            assert!(xi_factor(t, &flat, &rx, k).norm() < 1e-12, "t={t}");
        }
        let tilt = oblique_factors(&tilted(9.0).pose).unwrap();
        for t in -20..=20 {
            assert!(xi_factor(t, &tilt, &rx, k).norm() <= 15.0 + 1e-12);
        }
    }

    #[test]
    fn xi_matches_direct_tilt_sum() {
        // ρ sin(φ_m − φ) = −ν cos φ_m + μ sin φ_m
        let params = tilted(11.0);
        let rx = params.rx;
        let k = wavenumber(3.4e9);
        let of = oblique_factors(&params.pose).unwrap();
        for t in [-3, 0, 2] {
            let direct: Complex64 = rx
                .azimuths()
                .into_iter()
                .map(|phi| {
                    let s = -of.nu * phi.cos() + of.mu * phi.sin();
                    Complex64::from_polar(1.0, -k * rx.radius * s - phi * f64::from(t))
                })
                .sum();
            assert!((direct - xi_factor(t, &of, &rx, k)).norm() < 1e-11);
        }
    }

    #[test]
    fn closed_form_aligned() {
        let params = table1_params();
        let modes = ModeSet::symmetric(15);
        let k = wavenumber(3.5e9);
        let of = oblique_factors(&params.pose).unwrap();
        for u in 0..15 {
            for v in 0..15 {
                let z = closed_form_entry(u, v, &modes, &params, k, &of).unwrap();
                if u != v {
                    assert_eq!(z.norm(), 0.0);
                } else {
                    let terms = closed_form_terms(u, v, &modes, &params, k, &of).unwrap();
                    let want = terms.eta_prime * bessel_j(modes.modes()[v], terms.coupling_arg).unwrap();
                    assert!((z - want).norm() < 1e-15);
                }
            }
        }
        let terms = closed_form_terms(0, 0, &modes, &params, k, &of).unwrap();
        assert!((terms.coupling_arg - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((terms.coupling_arg - 2.0944).abs() < 1e-4);
    }

    #[test]
    fn closed_form_tilt_argument_matches_table() {
        let params = tilted(5.0);
        let of = oblique_factors(&params.pose).unwrap();
        let terms =
            closed_form_terms(0, 0, &ModeSet::symmetric(15), &params, wavenumber(3.5e9), &of).unwrap();
        assert!((terms.tilt_arg / 7.73 - 1.0).abs() <= 0.01);
    }

    #[test]
    fn eta_relations() {
        let params = tilted(4.0);
        let modes = ModeSet::symmetric(15);
        let of = oblique_factors(&params.pose).unwrap();
        let k = wavenumber(3.47e9);
        let n = 15.0;
        for (u, v) in [(3, 3), (2, 9), (14, 0)] {
            let t = closed_form_terms(u, v, &modes, &params, k, &of).unwrap();
            assert!((t.eta_prime.norm() - t.eta.norm() * n * n).abs() < 1e-12);
            assert!((t.eta_double_prime.norm() - t.eta_prime.norm()).abs() < 1e-12);
            if t.t == 0 {
                assert!((t.eta_prime - t.eta_double_prime).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_grows_linearly_with_elements() {
        let modes = ModeSet::symmetric(15);
        let small = tilted(6.0);
        let mut large = small;
        large.tx.elements = 30;
        large.rx.elements = 30;
        let of = oblique_factors(&small.pose).unwrap();
        let k = wavenumber(3.5e9);
        for (u, v) in [(8, 8), (8, 6), (0, 14)] {
            let a = closed_form_entry(u, v, &modes, &small, k, &of).unwrap().norm();
            let b = closed_form_entry(u, v, &modes, &large, k, &of).unwrap().norm();
            if a > 0.0 {
                assert!((b / a - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_tracks_effective_channel_at_small_tilt() {
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        for deg in [1.0, 3.0, 5.0] {
            let params = tilted(deg);
            let of = oblique_factors(&params.pose).unwrap();
            let h = build_channel_approx_at(&params, 3.5e9).unwrap();
            let oam = effective_oam_channel(&h, &f).unwrap();
            for u in 0..15 {
                let cf = closed_form_entry(u, u, &modes, &params, h.wavenumber, &of).unwrap();
                let ex = oam.entries[[u, u]].norm();
                assert!((cf.norm() - ex).abs() <= 0.10 * ex, "{deg} deg, mode {u}");
            }
        }
    }

    #[test]
    fn closed_form_off_diagonal_without_aliasing() {
        // A 15-point sum stands in for the integral; mode differences
        // |t| >= N/2 pick up aliased Bessel orders t ± N, so only the
        // unaliased band is compared.
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let params = tilted(1.0);
        let of = oblique_factors(&params.pose).unwrap();
        let h = build_channel_approx_at(&params, 3.5e9).unwrap();
        let oam = effective_oam_channel(&h, &f).unwrap();
        for u in 0..15 {
            for v in 0..15 {
                let t = modes.modes()[u] - modes.modes()[v];
                if u == v || t.abs() >= 8 {
                    continue;
                }
                let cf = closed_form_entry(u, v, &modes, &params, h.wavenumber, &of).unwrap().norm();
                let ex = oam.entries[[u, v]].norm();
                let gap = (cf - ex).abs();
                assert!(gap <= 0.20 * ex || gap <= 1e-4, "({u},{v}) {cf} vs {ex}");
            }
        }
    }

    #[test]
    fn imi_rises_with_small_tilt() {
        // Total leakage follows 1 − J_0(k R_r ρ)² and rises monotonically only
        // up to the first zero of J_0 (k R_r ρ ≈ 2.405, ρ ≈ 0.038 here).
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let u = modes.position(1).unwrap();
        let mut last = -1.0;
        for i in 0..=19 {
            let rho = 0.002 * f64::from(i);
            let mut params = table1_params();
            params.pose.gamma = rho.asin();
            let h = build_channel_exact_at(&params, 3.5e9).unwrap();
            let p = effective_oam_channel(&h, &f).unwrap().powers();
            let imi: f64 = (0..15).filter(|&v| v != u).map(|v| p[[u, v]]).sum();
            assert!(imi >= last, "rho={rho}: {imi} < {last}");
            last = imi;
        }
    }
}
