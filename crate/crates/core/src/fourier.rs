//! Position-to-momentum transform with the unitary convention
//! `psi~(p) = (2 pi hbar)^(-1/2) \int dx exp(-i p x / hbar) psi(x)`.
//!
//! Analytic Gaussians map to analytic Gaussians. Grid states are transformed with a
//! zero-padded FFT whose output is phase-shifted back to the continuum convention:
//! for `x_j = x_min + j dx` and `p_m = (m - N/2) dp`, `dp = 2 pi hbar / (N dx)`,
//!
//! ```text
//! psi~(p_m) = dx / sqrt(2 pi hbar) * exp(-i p_m x_min / hbar) * FFT[w_j (-1)^j psi_j]_m
//! ```
//!
//! with trapezoid weights `w_j` (one half at both ends).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::density::{self, Density, Domain};
use crate::error::{Error, Result};
use crate::states::{GridState, HbarConvention, QuantumState, Representation};

/// Grid densities must fall below this value at both ends of the position and
/// momentum windows for the transform to be trusted.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-14;

/// Zero-padding factor applied before the FFT; sets the momentum spacing.
pub const PAD_FACTOR: usize = 16;

/// Momentum nodes whose density is below this are trimmed from the output grid.
const TRIM_DENSITY: f64 = 1e-32;

/// A state in the momentum representation.
///
/// The wrapped [`QuantumState`] is indexed by momentum: its "x" axis is `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    inner: QuantumState,
    plancherel_defect: f64,
}

impl MomentumState {
    pub fn density_at(&self, p: f64) -> Result<f64> {
        self.inner.density_at(p)
    }

    pub fn amplitude_at(&self, p: f64) -> Result<Complex64> {
        self.inner.amplitude_at(p)
    }

    pub fn moment(&self, order: u32, domain: &Domain) -> Result<f64> {
        density::moment(&self.inner, order, domain)
    }

    pub fn hbar(&self) -> HbarConvention {
        self.inner.hbar()
    }

    /// The momentum-indexed carrier.
    pub fn as_state(&self) -> &QuantumState {
        &self.inner
    }

    /// `|1 - \int |psi~|^2 dp|` recorded when the transform was computed.
    pub fn plancherel_defect(&self) -> f64 {
        self.plancherel_defect
    }
}

impl Density for MomentumState {
    fn eval(&self, p: f64) -> f64 {
        self.inner.eval(p)
    }
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.inner.breakpoints_in(lo, hi)
    }
}

/// Largest momentum a grid with spacing `dx` represents without aliasing.
pub fn nyquist_momentum(dx: f64, hbar: f64) -> f64 {
    PI * hbar / dx
}

struct RawTransform {
    p_min: f64,
    dp: f64,
    values: Vec<Complex64>,
}

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

fn raw_transform(grid: &GridState, hbar: f64) -> RawTransform {
    let n = grid.len();
    let big_n = (PAD_FACTOR * n).next_power_of_two();
    let dx = grid.dx();
    let dp = 2.0 * PI * hbar / (big_n as f64 * dx);
    let mut buf: Vec<Complex64> = grid
        .samples()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *s * (sign * trapezoid_weight(j, n))
        })
        .collect();
    buf.resize(big_n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(big_n).process(&mut buf);

    let half = (big_n / 2) as f64;
    let prefactor = dx / (2.0 * PI * hbar).sqrt();
    let x_min = grid.x_min();
    for (m, v) in buf.iter_mut().enumerate() {
        let p = (m as f64 - half) * dp;
        *v *= Complex64::from_polar(prefactor, -p * x_min / hbar);
    }
    RawTransform {
        p_min: -half * dp,
        dp,
        values: buf,
    }
}

/// Momentum amplitude at a single `p` by direct summation of the same discretized
/// integral the FFT path evaluates. Intended for spot checks and short grids.
pub fn momentum_amplitude_direct(state: &QuantumState, p: f64) -> Complex64 {
    let hbar = state.hbar().value();
    match state.representation() {
        Representation::Gaussian(g) => g.fourier_dual(hbar).amplitude(p, hbar),
        Representation::Grid(grid) => {
            let n = grid.len();
            let sum: Complex64 = grid
                .samples()
                .iter()
                .enumerate()
                .map(|(j, s)| *s * Complex64::from_polar(trapezoid_weight(j, n), -p * grid.node(j) / hbar))
                .sum();
            sum * (grid.dx() / (2.0 * PI * hbar).sqrt())
        }
    }
}

/// Transform a normalized state to the momentum representation.
///
/// Grid inputs must vanish (density below [`EDGE_DENSITY_LIMIT`]) at both ends of the
/// position window and at the Nyquist edges of the momentum window; otherwise a
/// resolution error reports the largest momentum the grid can represent.
pub fn to_momentum(state: &QuantumState) -> Result<MomentumState> {
    let hbar = state.hbar();
    match state.representation() {
        Representation::Gaussian(g) => Ok(MomentumState {
            inner: QuantumState::gaussian(g.fourier_dual(hbar.value()), hbar),
            plancherel_defect: 0.0,
        }),
        Representation::Grid(grid) => {
            let p_max = nyquist_momentum(grid.dx(), hbar.value());
            let samples = grid.samples();
            let edge = samples[0].norm_sqr().max(samples[samples.len() - 1].norm_sqr());
            if edge > EDGE_DENSITY_LIMIT {
                return Err(Error::Resolution {
                    reason: format!("position density {edge:e} at the grid edge exceeds {EDGE_DENSITY_LIMIT:e}"),
                    max_faithful_p: p_max,
                });
            }
            let raw = raw_transform(grid, hbar.value());
            let vals = &raw.values;
            let p_edge = vals[0].norm_sqr().max(vals[vals.len() - 1].norm_sqr());
            if p_edge > EDGE_DENSITY_LIMIT {
                return Err(Error::Resolution {
                    reason: format!("momentum density {p_edge:e} at the Nyquist edge exceeds {EDGE_DENSITY_LIMIT:e}"),
                    max_faithful_p: p_max,
                });
            }
            let norm: f64 = vals.iter().map(|v| v.norm_sqr()).sum::<f64>() * raw.dp;
            let first = vals.iter().position(|v| v.norm_sqr() > TRIM_DENSITY).unwrap_or(0);
            let last = vals.iter().rposition(|v| v.norm_sqr() > TRIM_DENSITY).unwrap_or(vals.len() - 1);
            let lo = first.saturating_sub(8);
            let hi = (last + 8).min(vals.len() - 1);
            let kept = vals[lo..=hi].to_vec();
            let p_grid = GridState::unnormalized(kept, raw.p_min + lo as f64 * raw.dp, raw.dp)?;
            Ok(MomentumState {
                inner: QuantumState::grid(p_grid, hbar),
                plancherel_defect: (1.0 - norm).abs(),
            })
        }
    }
}

/// `|1 - \int |psi~(p)|^2 dp|`.
///
/// For grids this is evaluated on the padded momentum band without the edge checks of
/// [`to_momentum`], so it also reports on states the transform would refuse: a position
/// window that cuts the state off shows up as a norm deficit.
pub fn plancherel_check(state: &QuantumState) -> f64 {
    let hbar = state.hbar();
    match state.representation() {
        Representation::Gaussian(g) => {
            let dual = QuantumState::gaussian(g.fourier_dual(hbar.value()), hbar);
            match dual.moment(0, &Domain::full_line()) {
                Ok(m) => (1.0 - m).abs(),
                Err(_) => f64::INFINITY,
            }
        }
        Representation::Grid(grid) => {
            let raw = raw_transform(grid, hbar.value());
            let norm: f64 = raw.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * raw.dp;
            (1.0 - norm).abs()
        }
    }
}
