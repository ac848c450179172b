//! Channel gain, inter-mode interference, SINR and spectral efficiency, plus a
//! symbol-level Monte Carlo check of the analytic SINR.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::db_to_linear_power;
use crate::oam::{despiralize, FourierMatrix, OamChannel, Steering};
use crate::steering::{steer_rows, SteeringWeights};

/// How the SNR is turned into a per-mode symbol power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PowerMode {
    /// Every mode transmits at `snr · σ²`.
    #[default]
    PerMode,
    /// `snr · σ²` is split evenly across the `U` modes.
    Total,
}

impl PowerMode {
    pub fn label(self) -> &'static str {
        match self {
            PowerMode::PerMode => "per-mode",
            PowerMode::Total => "total",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    /// `E[|x_u|²]`, equal for every mode.
    pub symbol_power: f64,
    pub noise_power: f64,
    pub snr_db: f64,
    pub mode: PowerMode,
}

impl PowerAllocation {
    pub fn from_snr(snr_db: f64, noise_power: f64, mode: PowerMode, modes: usize) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::invalid("snr_db", "must be finite"));
        }
        if modes == 0 {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        let total = db_to_linear_power(snr_db) * noise_power;
        let symbol_power = match mode {
            PowerMode::PerMode => total,
            PowerMode::Total => total / modes as f64,
        };
        let alloc = Self {
            symbol_power,
            noise_power,
            snr_db,
            mode,
        };
        alloc.validate()?;
        Ok(alloc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            return Err(Error::invalid("noise_power", "must be positive"));
        }
        if !(self.symbol_power.is_finite() && self.symbol_power > 0.0) {
            return Err(Error::invalid("symbol_power", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub mode: i32,
    pub channel_gain: f64,
    pub imi: f64,
    pub sinr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSummary {
    /// `(CG_u, IMI_u)` in mode order.
    pub per_mode: Vec<(f64, f64)>,
    pub avg_cg: f64,
    pub avg_imi: f64,
}

/// Per-mode metrics across a set of subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMetrics {
    /// `rows[p][u]`
    pub rows: Vec<Vec<ModeMetrics>>,
    pub avg_cg: f64,
    pub avg_imi: f64,
    pub spectral_efficiency: f64,
}

pub fn channel_gain_and_imi(ch: &OamChannel) -> GainSummary {
    gain_and_imi_from_powers(&ch.powers())
}

pub(crate) fn gain_and_imi_from_powers(p: &Array2<f64>) -> GainSummary {
    let u_count = p.nrows();
    let per_mode: Vec<(f64, f64)> = (0..u_count)
        .map(|u| {
            let imi = (0..p.ncols()).filter(|&v| v != u).map(|v| p[[u, v]]).sum();
            (p[[u, u]], imi)
        })
        .collect();
    let n = u_count as f64;
    GainSummary {
        avg_cg: per_mode.iter().map(|m| m.0).sum::<f64>() / n,
        avg_imi: per_mode.iter().map(|m| m.1).sum::<f64>() / n,
        per_mode,
    }
}

/// `SINR_u = CG_u E / (IMI_u E + σ²)`.
pub fn sinr(ch: &OamChannel, alloc: &PowerAllocation) -> Vec<f64> {
    sinr_from_powers(&ch.powers(), alloc)
}

pub(crate) fn sinr_from_powers(p: &Array2<f64>, alloc: &PowerAllocation) -> Vec<f64> {
    let e = alloc.symbol_power;
    gain_and_imi_from_powers(p)
        .per_mode
        .into_iter()
        .map(|(cg, imi)| cg * e / (imi * e + alloc.noise_power))
        .collect()
}

/// Noise-free limit `CG̃ E / (IMĨ E)`, `+∞` when a mode sees no interference.
pub fn sir_large_n(ch_normalized: &OamChannel, alloc: &PowerAllocation) -> Vec<f64> {
    let e = alloc.symbol_power;
    channel_gain_and_imi(ch_normalized)
        .per_mode
        .into_iter()
        .map(|(cg, imi)| if imi == 0.0 { f64::INFINITY } else { cg * e / (imi * e) })
        .collect()
}

/// `(1/P) Σ_p Σ_u log2(1 + SINR_u(p))` over `sinr[p][u]`.
pub fn spectral_efficiency(sinr: &[Vec<f64>]) -> f64 {
    if sinr.is_empty() {
        return 0.0;
    }
    let total: f64 = sinr.iter().flat_map(|row| row.iter()).map(|s| s.ln_1p() / std::f64::consts::LN_2).sum();
    total / sinr.len() as f64
}

pub fn link_metrics(channels: &[OamChannel], modes: &[i32], alloc: &PowerAllocation) -> Result<LinkMetrics> {
    let mut rows = Vec::with_capacity(channels.len());
    let (mut cg_sum, mut imi_sum) = (0.0, 0.0);
    for ch in channels {
        if ch.size() != modes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} modes for a {}x{} channel",
                modes.len(),
                ch.size(),
                ch.size()
            )));
        }
        let p = ch.powers();
        let g = gain_and_imi_from_powers(&p);
        let s = sinr_from_powers(&p, alloc);
        cg_sum += g.avg_cg;
        imi_sum += g.avg_imi;
        rows.push(
            modes
                .iter()
                .zip(g.per_mode)
                .zip(s)
                .map(|((&mode, (channel_gain, imi)), sinr)| ModeMetrics {
                    mode,
                    channel_gain,
                    imi,
                    sinr,
                })
                .collect::<Vec<_>>(),
        );
    }
    let sinrs: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|m| m.sinr).collect()).collect();
    let n = channels.len().max(1) as f64;
    Ok(LinkMetrics {
        avg_cg: cg_sum / n,
        avg_imi: imi_sum / n,
        spectral_efficiency: spectral_efficiency(&sinrs),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Constellation {
    /// Circularly symmetric complex Gaussian.
    #[default]
    Gaussian,
    Qpsk,
}

/// Which random sources drive the simulated link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Excitation {
    #[default]
    Full,
    SymbolsOnly,
    NoiseOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloSpec {
    pub symbols: usize,
    pub seed: u64,
    pub constellation: Constellation,
    pub excitation: Excitation,
}

impl MonteCarloSpec {
    pub fn new(symbols: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            symbols,
            seed,
            constellation: Constellation::Gaussian,
            excitation: Excitation::Full,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbols == 0 {
            return Err(Error::invalid("symbols", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    /// Useful power over everything else, per mode; `+∞` when the remainder
    /// is exactly zero.
    pub sinr: Vec<f64>,
    /// Mean `|h(u,u) x_u|²`.
    pub useful_power: Vec<f64>,
    /// Mean power of interference plus noise.
    pub residual_power: Vec<f64>,
    /// Mean `|y_u|²`.
    pub output_power: Vec<f64>,
}

/// Streams are keyed by (subcarrier, source) so that each one is independent
/// of evaluation order: symbols of mode `u` use source `u`, noise at element
/// `m` uses source `U + m`.
fn source_rng(seed: u64, subcarrier: u64, source: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((subcarrier << 20) | source);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng, power: f64) -> Complex64 {
    let s = (power / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn symbol(rng: &mut ChaCha8Rng, power: f64, constellation: Constellation) -> Complex64 {
    match constellation {
        Constellation::Gaussian => gaussian(rng, power),
        Constellation::Qpsk => {
            let s = (power / 2.0).sqrt();
            let bits: u8 = rng.random_range(0..4);
            Complex64::new(
                if bits & 1 == 0 { s } else { -s },
                if bits & 2 == 0 { s } else { -s },
            )
        }
    }
}

struct Simulator {
    heff: Array2<Complex64>,
    rows: Array2<Complex64>,
    symbol_rngs: Vec<ChaCha8Rng>,
    noise_rngs: Vec<ChaCha8Rng>,
    alloc: PowerAllocation,
    spec: MonteCarloSpec,
}

impl Simulator {
    fn new(
        h: &ChannelMatrix,
        f: &FourierMatrix,
        w: Option<&SteeringWeights>,
        alloc: &PowerAllocation,
        spec: &MonteCarloSpec,
    ) -> Result<Self> {
        alloc.validate()?;
        spec.validate()?;
        let (rows, tag) = match w {
            Some(w) => {
                if w.len() != f.elements() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} steering weights for {} elements",
                        w.len(),
                        f.elements()
                    )));
                }
                (steer_rows(&f.rows, &w.weights), w.scheme)
            }
            None => (f.rows.clone(), Steering::None),
        };
        let heff = despiralize(h, &rows, f, tag)?.entries;
        let sub = h.subcarrier.unwrap_or(0) as u64;
        let (u, n) = (f.mode_count(), f.elements());
        Ok(Self {
            heff,
            rows,
            symbol_rngs: (0..u).map(|i| source_rng(spec.seed, sub, i as u64)).collect(),
            noise_rngs: (0..n).map(|m| source_rng(spec.seed, sub, (u + m) as u64)).collect(),
            alloc: *alloc,
            spec: *spec,
        })
    }

    /// Draws one symbol vector and noise vector; returns `(x, y)`.
    fn step(&mut self, x: &mut [Complex64], z: &mut [Complex64], y: &mut [Complex64]) {
        let symbols_on = self.spec.excitation != Excitation::NoiseOnly;
        let noise_on = self.spec.excitation != Excitation::SymbolsOnly;
        for (xi, rng) in x.iter_mut().zip(&mut self.symbol_rngs) {
            *xi = if symbols_on {
                symbol(rng, self.alloc.symbol_power, self.spec.constellation)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        for (zi, rng) in z.iter_mut().zip(&mut self.noise_rngs) {
            *zi = if noise_on {
                gaussian(rng, self.alloc.noise_power)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        for (u, yu) in y.iter_mut().enumerate() {
            let hx: Complex64 = self.heff.row(u).iter().zip(x.iter()).map(|(h, x)| h * x).sum();
            let gz: Complex64 = self.rows.row(u).iter().zip(z.iter()).map(|(g, z)| g * z).sum();
            *yu = hx + gz;
        }
    }
}

/// Pushes random symbols and noise through `y = (w ⊙ F) (H Fᴴ x + z)` and
/// measures the useful-to-remainder power ratio of each mode.
pub fn monte_carlo_link(
    h: &ChannelMatrix,
    f: &FourierMatrix,
    w: Option<&SteeringWeights>,
    alloc: &PowerAllocation,
    spec: &MonteCarloSpec,
) -> Result<MonteCarloResult> {
    let mut sim = Simulator::new(h, f, w, alloc, spec)?;
    let (u_count, n) = (f.mode_count(), f.elements());
    let mut x = vec![Complex64::new(0.0, 0.0); u_count];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut y = vec![Complex64::new(0.0, 0.0); u_count];
    let mut useful = vec![0.0; u_count];
    let mut residual = vec![0.0; u_count];
    let mut output = vec![0.0; u_count];
    for _ in 0..spec.symbols {
        sim.step(&mut x, &mut z, &mut y);
        for u in 0..u_count {
            let s = sim.heff[[u, u]] * x[u];
            useful[u] += s.norm_sqr();
            residual[u] += (y[u] - s).norm_sqr();
            output[u] += y[u].norm_sqr();
        }
    }
    let count = spec.symbols as f64;
    let sinr = useful
        .iter()
        .zip(&residual)
        .map(|(&a, &b)| if b == 0.0 { f64::INFINITY } else { a / b })
        .collect();
    Ok(MonteCarloResult {
        sinr,
        useful_power: useful.into_iter().map(|v| v / count).collect(),
        residual_power: residual.into_iter().map(|v| v / count).collect(),
        output_power: output.into_iter().map(|v| v / count).collect(),
    })
}

/// Transmitted and received symbols, `symbols × U` each.
pub fn monte_carlo_trace(
    h: &ChannelMatrix,
    f: &FourierMatrix,
    w: Option<&SteeringWeights>,
    alloc: &PowerAllocation,
    spec: &MonteCarloSpec,
) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let mut sim = Simulator::new(h, f, w, alloc, spec)?;
    let (u_count, n) = (f.mode_count(), f.elements());
    let mut xs = Array2::zeros((spec.symbols, u_count));
    let mut ys = Array2::zeros((spec.symbols, u_count));
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut x = vec![Complex64::new(0.0, 0.0); u_count];
    let mut y = vec![Complex64::new(0.0, 0.0); u_count];
    for s in 0..spec.symbols {
        sim.step(&mut x, &mut z, &mut y);
        for u in 0..u_count {
            xs[[s, u]] = x[u];
            ys[[s, u]] = y[u];
        }
    }
    Ok((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_exact_at, ChannelParams};
    use crate::oam::{effective_oam_channel, make_fourier, ModeSet};
    use crate::scenario::{table1_grid, table1_params};
    use crate::steering::{abs_weights, dbs_weights};
    use proptest::prelude::*;

    fn tilted(deg: f64) -> ChannelParams {
        let mut p = table1_params();
        p.pose.alpha = deg.to_radians();
        p.pose.gamma = deg.to_radians();
        p
    }

    fn diag_channel(values: &[f64]) -> OamChannel {
        let n = values.len();
        OamChannel {
            entries: Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    values[i].into()
                } else {
                    0.0.into()
                }
            }),
            subcarrier: None,
            wavenumber: 1.0,
            steering: Steering::None,
        }
    }

    fn default_alloc() -> PowerAllocation {
        PowerAllocation::from_snr(20.0, 0.01, PowerMode::PerMode, 15).unwrap()
    }

    #[test]
    fn allocation_modes() {
        let a = default_alloc();
        assert!((a.symbol_power - 1.0).abs() < 1e-12);
        let t = PowerAllocation::from_snr(20.0, 0.01, PowerMode::Total, 15).unwrap();
        assert!((t.symbol_power - 1.0 / 15.0).abs() < 1e-12);
        assert!(PowerAllocation::from_snr(20.0, 0.0, PowerMode::PerMode, 15).is_err());
        assert!(PowerAllocation::from_snr(f64::NAN, 0.01, PowerMode::PerMode, 15).is_err());
    }

    #[test]
    fn identity_channel() {
        let g = channel_gain_and_imi(&diag_channel(&[1.0; 4]));
        for (cg, imi) in g.per_mode {
            assert_eq!((cg, imi), (1.0, 0.0));
        }
        assert_eq!((g.avg_cg, g.avg_imi), (1.0, 0.0));
    }

    #[test]
    fn interference_free_sinr() {
        let ch = diag_channel(&[0.5, 0.2, 0.9]);
        let alloc = default_alloc();
        for (s, cg) in sinr(&ch, &alloc).into_iter().zip([0.25, 0.04, 0.81]) {
            assert!((s - cg * alloc.symbol_power / alloc.noise_power).abs() < 1e-9);
        }
        assert!(sir_large_n(&ch, &alloc).iter().all(|s| s.is_infinite()));
    }

    #[test]
    fn uniform_coupling_sinr() {
        let u = 5;
        let ch = OamChannel {
            entries: Array2::from_elem((u, u), Complex64::new(0.3, 0.4)),
            subcarrier: None,
            wavenumber: 1.0,
            steering: Steering::None,
        };
        let alloc = default_alloc();
        let cg = 0.25;
        let want = cg / ((u as f64 - 1.0) * cg + alloc.noise_power / alloc.symbol_power);
        for s in sinr(&ch, &alloc) {
            assert!((s - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_efficiency_examples() {
        assert_eq!(spectral_efficiency(&[vec![0.0; 3], vec![0.0; 3]]), 0.0);
        assert_eq!(spectral_efficiency(&[vec![1.0]]), 1.0);
        assert_eq!(spectral_efficiency(&[vec![3.0, 1.0], vec![0.0, 7.0]]), 3.0);
    }

    #[test]
    fn table_row_misaligned_five_degrees() {
        let grid = table1_grid();
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let h = build_channel_exact_at(&tilted(5.0), grid.lowest_frequency()).unwrap();
        let g = channel_gain_and_imi(&effective_oam_channel(&h, &f).unwrap());
        let (cg, imi) = g.per_mode[modes.position(1).unwrap()];
        assert!((cg / 2.99e-2 - 1.0).abs() <= 0.10, "{cg}");
        assert!((imi / 4.29e-2 - 1.0).abs() <= 0.10, "{imi}");
    }

    #[test]
    fn averages_match_per_mode_lists() {
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let h = build_channel_exact_at(&tilted(8.0), 3.52e9).unwrap();
        let ch = effective_oam_channel(&h, &f).unwrap();
        let g = channel_gain_and_imi(&ch);
        let cg: f64 = g.per_mode.iter().map(|m| m.0).sum::<f64>() / 15.0;
        let imi: f64 = g.per_mode.iter().map(|m| m.1).sum::<f64>() / 15.0;
        assert!((cg - g.avg_cg).abs() <= 1e-12);
        assert!((imi - g.avg_imi).abs() <= 1e-12);
        let lm = link_metrics(&[ch.clone(), ch], modes.modes(), &default_alloc()).unwrap();
        assert!((lm.avg_cg - g.avg_cg).abs() <= 1e-12);
    }

    #[test]
    fn sir_is_scale_free() {
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let h = build_channel_exact_at(&tilted(10.0), 3.5e9).unwrap();
        let ch = effective_oam_channel(&h, &f).unwrap().scaled(15.0);
        let a = sir_large_n(&ch, &default_alloc());
        let b = sir_large_n(&ch, &PowerAllocation::from_snr(3.0, 7.0, PowerMode::PerMode, 15).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn noiseless_diagonal_link_passes_symbols_through() {
        let mut spec = MonteCarloSpec::new(64, 9).unwrap();
        spec.excitation = Excitation::SymbolsOnly;
        let alloc = default_alloc();
        let hu = Complex64::new(0.3, -0.4);
        let f = make_fourier(&ModeSet::symmetric(1), 1).unwrap();
        let h = ChannelMatrix {
            entries: Array2::from_elem((1, 1), hu),
            subcarrier: Some(2),
            wavenumber: 1.0,
        };
        let (xs, ys) = monte_carlo_trace(&h, &f, None, &alloc, &spec).unwrap();
        for s in 0..64 {
            assert_eq!(ys[[s, 0]], hu * xs[[s, 0]]);
        }
        let r = monte_carlo_link(&h, &f, None, &alloc, &spec).unwrap();
        assert!(r.sinr[0].is_infinite());

        // aligned array: leakage is at rounding level only
        let params = table1_params();
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        let h = build_channel_exact_at(&params, 3.5e9).unwrap();
        let heff = effective_oam_channel(&h, &f).unwrap();
        let (xs, ys) = monte_carlo_trace(&h, &f, None, &alloc, &spec).unwrap();
        for u in 0..15 {
            for s in 0..64 {
                let want = heff.entries[[u, u]] * xs[[s, u]];
                assert!((ys[[s, u]] - want).norm() <= 1e-9 * want.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn empirical_sinr_converges() {
        let params = tilted(10.0);
        let grid = table1_grid();
        let modes = ModeSet::symmetric(15);
        let f = make_fourier(&modes, 15).unwrap();
        let h = crate::channel::build_channel_exact(&params, &grid, 400).unwrap();
        let alloc = default_alloc();
        let spec = MonteCarloSpec::new(100_000, 2024).unwrap();
        let abs = abs_weights(&params.rx, &params.pose, &grid, 810).unwrap();
        let dbs = dbs_weights(&params.rx, &params.pose, &grid, 400).unwrap();
        for w in [None, Some(&abs), Some(&dbs)] {
            let ch = match w {
                Some(w) => crate::steering::steered_oam_channel(&h, &f, w).unwrap(),
                None => effective_oam_channel(&h, &f).unwrap(),
            };
            let want = sinr(&ch, &alloc);
            let got = monte_carlo_link(&h, &f, w, &alloc, &spec).unwrap();
            for (g, a) in got.sinr.iter().zip(&want) {
                assert!((g / a - 1.0).abs() <= 0.03, "{g} vs {a}");
            }
        }
    }

    #[test]
    fn noise_power_survives_despiralisation() {
        let params = tilted(13.0);
        let grid = table1_grid();
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        let h = crate::channel::build_channel_exact(&params, &grid, 77).unwrap();
        let w = dbs_weights(&params.rx, &params.pose, &grid, 77).unwrap();
        let mut spec = MonteCarloSpec::new(100_000, 5).unwrap();
        spec.excitation = Excitation::NoiseOnly;
        let alloc = default_alloc();
        let r = monte_carlo_link(&h, &f, Some(&w), &alloc, &spec).unwrap();
        for p in r.output_power {
            assert!((p / alloc.noise_power - 1.0).abs() <= 0.02, "{p}");
        }
    }

    #[test]
    fn qpsk_symbols_have_unit_modulus_power() {
        let params = tilted(4.0);
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        let h = build_channel_exact_at(&params, 3.5e9).unwrap();
        let spec = MonteCarloSpec {
            symbols: 32,
            seed: 1,
            constellation: Constellation::Qpsk,
            excitation: Excitation::SymbolsOnly,
        };
        let (xs, _) = monte_carlo_trace(&h, &f, None, &default_alloc(), &spec).unwrap();
        assert!(xs.iter().all(|x| (x.norm_sqr() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let params = tilted(6.0);
        let f = make_fourier(&ModeSet::symmetric(15), 15).unwrap();
        let h = build_channel_exact_at(&params, 3.5e9).unwrap();
        let spec = MonteCarloSpec::new(2_000, 77).unwrap();
        let a = monte_carlo_link(&h, &f, None, &default_alloc(), &spec).unwrap();
        let b = monte_carlo_link(&h, &f, None, &default_alloc(), &spec).unwrap();
        assert_eq!(a, b);
        let other = MonteCarloSpec::new(2_000, 78).unwrap();
        assert_ne!(a, monte_carlo_link(&h, &f, None, &default_alloc(), &other).unwrap());
        assert!(MonteCarloSpec::new(0, 1).is_err());
    }

    proptest! {
        #[test]
        fn metrics_are_nonnegative(re in prop::collection::vec(-2.0f64..2.0, 9), im in prop::collection::vec(-2.0f64..2.0, 9)) {
            let ch = OamChannel {
                entries: Array2::from_shape_fn((3, 3), |(i, j)| Complex64::new(re[3 * i + j], im[3 * i + j])),
                subcarrier: None,
                wavenumber: 1.0,
                steering: Steering::None,
            };
            let alloc = default_alloc();
            for (cg, imi) in channel_gain_and_imi(&ch).per_mode {
                prop_assert!(cg >= 0.0 && imi >= 0.0);
            }
            prop_assert!(sinr(&ch, &alloc).iter().all(|&s| s >= 0.0));
        }

        #[test]
        fn se_grows_with_snr(deg in 0.0f64..20.0, snr in 0.0f64..19.0) {
            let modes = ModeSet::symmetric(15);
            let f = make_fourier(&modes, 15).unwrap();
            let h = build_channel_exact_at(&tilted(deg), 3.5e9).unwrap();
            let ch = effective_oam_channel(&h, &f).unwrap();
            let lo = PowerAllocation::from_snr(snr, 0.01, PowerMode::PerMode, 15).unwrap();
            let hi = PowerAllocation::from_snr(snr + 1.0, 0.01, PowerMode::PerMode, 15).unwrap();
            prop_assert!(spectral_efficiency(&[sinr(&ch, &hi)]) >= spectral_efficiency(&[sinr(&ch, &lo)]));
        }
    }
}
