//! Coarse graining of a density into equal-width bins `[xi0 + k delta, xi0 + (k+1) delta)`.
//!
//! Two offsets matter in practice: the border convention `xi0 = 0`, where the origin
//! is a bin edge, and the midpoint convention `xi0 = -delta/2`, where the origin is the
//! centre of bin 0. Finite detector windows of `2M + 1` bins always use the midpoint
//! convention, so the uncovered region is `|x| >= (M + 1/2) delta`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{integrate_with, moment, Density, Domain};
use crate::error::{Error, Result};
use crate::quad::Tolerance;

/// Uncovered mass below which a full-line bin sum is considered closed.
pub const TRUNCATION_EPS: f64 = 1e-12;

/// Largest number of bins a full-line distribution may use.
pub const INDEX_CAP: usize = 1_000_000;

/// Bin probabilities below this are stored as exact zeros.
pub const UNDERFLOW: f64 = 1e-300;

const PARALLEL_MIN_BINS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Bins extend until the uncovered mass drops below [`TRUNCATION_EPS`].
    FullLine,
    /// Bins `k = -M..=M`.
    Finite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `xi0 = 0`.
    Border,
    /// `xi0 = -delta/2`.
    Midpoint,
}

impl Convention {
    pub fn offset(self, delta: f64) -> f64 {
        match self {
            Convention::Border => 0.0,
            Convention::Midpoint => -0.5 * delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    delta: f64,
    xi0: f64,
    window: Window,
}

impl BinGrid {
    pub fn new(delta: f64, xi0: f64, window: Window) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("bin width must be positive and finite, got {delta}")));
        }
        if !xi0.is_finite() {
            return Err(Error::Domain(format!("bin offset must be finite, got {xi0}")));
        }
        if let Window::Finite(m) = window {
            if (xi0 + 0.5 * delta).abs() > 1e-12 * delta {
                return Err(Error::Domain(format!(
                    "finite window M = {m} requires the midpoint offset -delta/2 = {}, got {xi0}",
                    -0.5 * delta
                )));
            }
        }
        Ok(BinGrid { delta, xi0, window })
    }

    pub fn full_line(delta: f64, convention: Convention) -> Result<Self> {
        BinGrid::new(delta, convention.offset(delta), Window::FullLine)
    }

    /// `2M + 1` midpoint-convention bins centred on the origin.
    pub fn finite(delta: f64, m: usize) -> Result<Self> {
        BinGrid::new(delta, -0.5 * delta, Window::Finite(m))
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Left edge of bin `k`.
    pub fn edge(&self, k: i64) -> f64 {
        self.xi0 + k as f64 * self.delta
    }

    pub fn bin(&self, k: i64) -> (f64, f64) {
        (self.edge(k), self.edge(k + 1))
    }

    /// `(M + 1/2) delta` for finite windows.
    pub fn window_edge(&self) -> Option<f64> {
        match self.window {
            Window::FullLine => None,
            Window::Finite(m) => Some((m as f64 + 0.5) * self.delta),
        }
    }

    fn require_finite(&self) -> Result<f64> {
        self.window_edge()
            .ok_or_else(|| Error::Domain("operation requires a finite detector window".into()))
    }
}

/// Bin probabilities `probs[i]` for `k = k_min + i`, plus the mass outside the bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    grid: BinGrid,
    k_min: i64,
    probs: Vec<f64>,
    covered_mass: f64,
    tail_mass: f64,
}

impl DiscreteDistribution {
    /// Wrap an explicit probability list (bins `0..n` of unit width). Used for
    /// distributions that do not come from a density.
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("empty probability list".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let covered: f64 = probs.iter().sum();
        if covered > 1.0 + 1e-10 {
            return Err(Error::Domain(format!("probabilities sum to {covered} > 1")));
        }
        Ok(DiscreteDistribution {
            grid: BinGrid::new(1.0, 0.0, Window::FullLine)?,
            k_min: 0,
            probs,
            covered_mass: covered,
            tail_mass: (1.0 - covered).max(0.0),
        })
    }

    pub fn grid(&self) -> &BinGrid {
        &self.grid
    }

    pub fn window(&self) -> Window {
        self.grid.window
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.probs.len() as i64 - 1
    }

    pub fn prob(&self, k: i64) -> f64 {
        if k < self.k_min || k > self.k_max() {
            0.0
        } else {
            self.probs[(k - self.k_min) as usize]
        }
    }

    pub fn covered_mass(&self) -> f64 {
        self.covered_mass
    }

    /// Mass outside the bins; `q_inf` for finite windows.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `(k, lower_edge, upper_edge, prob)` in index order.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64, f64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, p)| {
            let k = self.k_min + i as i64;
            let (lo, hi) = self.grid.bin(k);
            (k, lo, hi, *p)
        })
    }

    /// Shrink a finite window to `m <= M`; dropped bins move into the tail mass.
    pub fn narrowed(&self, m: usize) -> Result<Self> {
        let Window::Finite(big_m) = self.grid.window else {
            return Err(Error::Domain("only finite windows can be narrowed".into()));
        };
        if m > big_m {
            return Err(Error::Domain(format!("cannot widen window from {big_m} to {m}")));
        }
        let offset = big_m - m;
        let probs = self.probs[offset..offset + 2 * m + 1].to_vec();
        let dropped: f64 = self.probs[..offset].iter().chain(&self.probs[offset + 2 * m + 1..]).sum();
        let covered = probs.iter().sum();
        Ok(DiscreteDistribution {
            grid: BinGrid::finite(self.grid.delta, m)?,
            k_min: -(m as i64),
            probs,
            covered_mass: covered,
            tail_mass: self.tail_mass + dropped,
        })
    }

    /// CSV with header `k,lower_edge,upper_edge,prob`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lower_edge,upper_edge,prob\n");
        for (k, lo, hi, p) in self.rows() {
            let _ = writeln!(out, "{k},{lo:.16e},{hi:.16e},{p:.16e}");
        }
        out
    }
}

fn bin_mass<D: Density + ?Sized>(density: &D, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    let p = integrate_with(density, &Domain::interval(lo, hi)?, |_, r| r, tol)?.value;
    Ok(if p < UNDERFLOW { 0.0 } else { p.min(1.0) })
}

fn lower_tail<D: Density + ?Sized>(density: &D, a: f64, tol: &Tolerance) -> Result<f64> {
    Ok(integrate_with(density, &Domain::interval(f64::NEG_INFINITY, a)?, |_, r| r, tol)?.value)
}

fn upper_tail<D: Density + ?Sized>(density: &D, b: f64, tol: &Tolerance) -> Result<f64> {
    Ok(integrate_with(density, &Domain::interval(b, f64::INFINITY)?, |_, r| r, tol)?.value)
}

/// Find a cut `a` with `tail(a) <= target`, searching outward from `start` in direction `dir`.
fn find_cut<F: Fn(f64) -> Result<f64>>(tail: F, start: f64, dir: f64, resolution: f64, target: f64) -> Result<f64> {
    if tail(start)? <= target {
        return Ok(start);
    }
    let mut inner = start;
    let mut step = resolution.max(1e-3);
    let mut outer = start + dir * step;
    let mut iterations = 0;
    while tail(outer)? > target {
        inner = outer;
        step *= 2.0;
        outer = start + dir * step;
        iterations += 1;
        if iterations > 1100 || !outer.is_finite() {
            return Err(Error::Truncation {
                achieved_tail: tail(outer).unwrap_or(f64::NAN),
                bins: 0,
            });
        }
    }
    // Tighten to within one bin width.
    while (outer - inner).abs() > resolution {
        let mid = 0.5 * (inner + outer);
        if tail(mid)? > target {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Ok(outer)
}

/// Probabilities of each bin of `grid` under a density normalized on the full line.
pub fn bin_probabilities<D: Density + ?Sized>(density: &D, grid: &BinGrid) -> Result<DiscreteDistribution> {
    let tol = Tolerance::current();
    let (k_min, k_max, tail_mass) = match grid.window {
        Window::Finite(m) => {
            let edge = (m as f64 + 0.5) * grid.delta;
            let tail = integrate_with(density, &Domain::outside(edge)?, |_, r| r, &tol)?.value;
            (-(m as i64), m as i64, tail)
        }
        Window::FullLine => {
            let (s_lo, s_hi) = density.support();
            let half = 0.5 * TRUNCATION_EPS;
            let start = if s_lo.is_finite() && s_hi.is_finite() { 0.5 * (s_lo + s_hi) } else { 0.0 };
            let a = if s_lo.is_finite() {
                s_lo
            } else {
                find_cut(|a| lower_tail(density, a, &tol), start, -1.0, grid.delta, half)?
            };
            let b = if s_hi.is_finite() {
                s_hi
            } else {
                find_cut(|b| upper_tail(density, b, &tol), start.max(a), 1.0, grid.delta, half)?
            };
            let k_lo = ((a - grid.xi0) / grid.delta).floor() as i64;
            let mut k_hi = ((b - grid.xi0) / grid.delta).ceil() as i64 - 1;
            if k_hi < k_lo {
                k_hi = k_lo;
            }
            let count = (k_hi - k_lo + 1) as usize;
            let tail = lower_tail(density, grid.edge(k_lo), &tol)? + upper_tail(density, grid.edge(k_hi + 1), &tol)?;
            if count > INDEX_CAP {
                return Err(Error::Truncation {
                    achieved_tail: tail,
                    bins: INDEX_CAP,
                });
            }
            if tail >= TRUNCATION_EPS {
                return Err(Error::Truncation {
                    achieved_tail: tail,
                    bins: count,
                });
            }
            (k_lo, k_hi, tail)
        }
    };

    let ks: Vec<i64> = (k_min..=k_max).collect();
    let compute = |k: &i64| -> Result<f64> {
        let (lo, hi) = grid.bin(*k);
        bin_mass(density, lo, hi, &tol)
    };
    let probs: Vec<f64> = if ks.len() >= PARALLEL_MIN_BINS {
        ks.par_iter().map(compute).collect::<Result<_>>()?
    } else {
        ks.iter().map(compute).collect::<Result<_>>()?
    };
    let covered_mass = probs.iter().sum();
    Ok(DiscreteDistribution {
        grid: *grid,
        k_min,
        probs,
        covered_mass,
        tail_mass: if tail_mass < UNDERFLOW { 0.0 } else { tail_mass },
    })
}

/// Zeroth, first and second moments of a density over the region outside a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMoments {
    pub mass: f64,
    pub first: f64,
    pub second: f64,
}

pub fn tail_moments<D: Density + ?Sized>(density: &D, grid: &BinGrid) -> Result<TailMoments> {
    let edge = grid.require_finite()?;
    let omega = Domain::outside(edge)?;
    Ok(TailMoments {
        mass: moment(density, 0, &omega)?,
        first: moment(density, 1, &omega)?,
        second: moment(density, 2, &omega)?,
    })
}

/// `\int_{|x| >= (M+1/2) delta} x^2 rho(x) dx`; zero once the tail mass is below
/// [`TRUNCATION_EPS`].
pub fn tail_second_moment<D: Density + ?Sized>(density: &D, grid: &BinGrid) -> Result<f64> {
    let edge = grid.require_finite()?;
    let omega = Domain::outside(edge)?;
    if moment(density, 0, &omega)? < TRUNCATION_EPS {
        return Ok(0.0);
    }
    moment(density, 2, &omega)
}

/// Variance of the tail-conditioned density `rho / q_inf` on the region outside the window.
pub fn tail_variance<D: Density + ?Sized>(density: &D, grid: &BinGrid) -> Result<f64> {
    let t = tail_moments(density, grid)?;
    if t.mass <= TRUNCATION_EPS {
        return Err(Error::DegenerateTail { tail_mass: t.mass });
    }
    let mean = t.first / t.mass;
    Ok((t.second / t.mass - mean * mean).max(0.0))
}
