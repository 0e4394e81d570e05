//! Lower bounds on sums of position and momentum entropies.
//!
//! Everything here is a pure function of the detector accuracies `dx`, `dp`, of `hbar`,
//! and, for the finite-detector bound, of the tail moments that the windows ignore.
//! `gamma = dx dp / hbar` is the dimensionless accuracy product.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::binning::{bin_probabilities, tail_moments, tail_variance, BinGrid, TRUNCATION_EPS};
use crate::density::{moment, Density, Domain};
use crate::entropy::{continuous_entropy, discrete_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::specfun::radial_s1_at_one;
use crate::states::HbarConvention;

/// Absolute slack allowed on every inequality margin.
pub const TOL_REPORT: f64 = 1e-9;

/// Largest `gamma` for which the spheroidal bound is evaluated.
pub const MAX_GAMMA_R: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracies {
    pub dx: f64,
    pub dp: f64,
    pub hbar: HbarConvention,
}

impl Accuracies {
    pub fn new(dx: f64, dp: f64, hbar: HbarConvention) -> Result<Self> {
        for (name, v) in [("dx", dx), ("dp", dp)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { dx, dp, hbar })
    }

    /// Symmetric split `dx = dp = sqrt(gamma hbar)`.
    pub fn from_gamma(gamma: f64, hbar: HbarConvention) -> Result<Self> {
        Self::with_aspect(gamma, 1.0, hbar)
    }

    /// `dx = sqrt(gamma hbar aspect)`, `dp = sqrt(gamma hbar / aspect)`.
    pub fn with_aspect(gamma: f64, aspect: f64, hbar: HbarConvention) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !(aspect > 0.0 && aspect.is_finite()) {
            return Err(Error::Domain(format!("need gamma > 0 and aspect > 0, got {gamma}, {aspect}")));
        }
        let h = hbar.value();
        Self::new((gamma * h * aspect).sqrt(), (gamma * h / aspect).sqrt(), hbar)
    }

    pub fn gamma(&self) -> f64 {
        self.dx * self.dp / self.hbar.value()
    }
}

/// Tail mass and tail second moment outside the position and momentum windows.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailData {
    pub x2_tail: f64,
    pub p2_tail: f64,
    pub qx_tail: f64,
    pub qp_tail: f64,
}

impl TailData {
    pub fn new(x2_tail: f64, p2_tail: f64, qx_tail: f64, qp_tail: f64) -> Result<Self> {
        for (name, v) in [("x2_tail", x2_tail), ("p2_tail", p2_tail)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("qx_tail", qx_tail), ("qp_tail", qp_tail)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self {
            x2_tail,
            p2_tail,
            qx_tail,
            qp_tail,
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }
}

/// `1 + ln(pi hbar)`.
pub fn bound_bbm(hbar: f64) -> f64 {
    1.0 + (PI * hbar).ln()
}

/// `(hbar/2) exp(S_x + S_p - 1 - ln(pi hbar))`, a lower bound on `sigma_x sigma_p`.
pub fn strengthened_heisenberg_rhs(sx_entropy: f64, sp_entropy: f64, hbar: f64) -> f64 {
    0.5 * hbar * (sx_entropy + sp_entropy - bound_bbm(hbar)).exp()
}

/// `-ln(gamma / (e pi))`.
pub fn bound_b(acc: &Accuracies) -> f64 {
    1.0 + PI.ln() - acc.gamma().ln()
}

/// `-2 ln(sqrt(gamma / 2pi) R00(gamma/4, 1))`; positive for every admissible `gamma`.
pub fn bound_r(acc: &Accuracies) -> Result<f64> {
    let gamma = acc.gamma();
    if gamma > MAX_GAMMA_R * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "gamma = {gamma} exceeds {MAX_GAMMA_R}, the range of the spheroidal bound"
        )));
    }
    let r00 = radial_s1_at_one(gamma / 4.0)?;
    Ok(-(gamma / (2.0 * PI) * r00 * r00).ln())
}

pub fn bound_max_br(acc: &Accuracies) -> Result<f64> {
    Ok(bound_b(acc).max(bound_r(acc)?))
}

/// `(eta/2) ln(delta^2 eta^3 / (2 pi e lambda))`.
///
/// `eta = 0` gives 0. `lambda = 0` with `eta > 0` gives `+inf`; callers treat a vanishing
/// tail as contributing no correction.
pub fn r_correction(eta: f64, lambda: f64, delta: f64) -> f64 {
    if eta == 0.0 {
        return 0.0;
    }
    if lambda == 0.0 {
        return f64::INFINITY;
    }
    0.5 * eta * (delta * delta * eta.powi(3) / (2.0 * PI * E * lambda)).ln()
}

/// Minimizer of [`r_correction`] over `eta` in `[0, 1]`.
pub fn eta_min(lambda: f64, delta: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    ((2.0 * PI * lambda).sqrt() / (E * delta)).powf(2.0 / 3.0).min(1.0)
}

/// Tail second moment at which the minimizer reaches `eta = 1`: `(e delta)^2 / (2 pi)`.
pub fn tail_threshold(delta: f64) -> f64 {
    (E * delta).powi(2) / (2.0 * PI)
}

/// Correction below the threshold: `-3 (sqrt(pi lambda) / (2 e delta))^{2/3}`.
pub fn small_tail_correction(lambda: f64, delta: f64) -> f64 {
    -3.0 * ((PI * lambda).sqrt() / (2.0 * E * delta)).powf(2.0 / 3.0)
}

/// Correction at or above the threshold: `ln(delta / sqrt(2 pi e lambda))`.
pub fn large_tail_correction(lambda: f64, delta: f64) -> f64 {
    (delta / (2.0 * PI * E * lambda).sqrt()).ln()
}

/// Worst-case entropy correction for one variable given its tail mass and moment.
pub fn tail_correction(lambda: f64, tail_mass: f64, delta: f64) -> f64 {
    if tail_mass <= TRUNCATION_EPS || lambda == 0.0 {
        0.0
    } else if lambda < tail_threshold(delta) {
        small_tail_correction(lambda, delta)
    } else {
        large_tail_correction(lambda, delta)
    }
}

/// Which branch of the finite-detector bound applies, per variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCase {
    BothSmall,
    MomentumLarge,
    PositionLarge,
    BothLarge,
}

pub fn tail_case(acc: &Accuracies, tails: &TailData) -> TailCase {
    let big = |lambda: f64, q: f64, delta: f64| q > TRUNCATION_EPS && lambda >= tail_threshold(delta);
    match (big(tails.x2_tail, tails.qx_tail, acc.dx), big(tails.p2_tail, tails.qp_tail, acc.dp)) {
        (false, false) => TailCase::BothSmall,
        (false, true) => TailCase::MomentumLarge,
        (true, false) => TailCase::PositionLarge,
        (true, true) => TailCase::BothLarge,
    }
}

/// State-dependent lower bound on `H_M^(x) + H_N^(p)` for finite detector windows.
///
/// Equals `bound_b` plus one tail correction per variable. With both tails below
/// threshold this is `bound_b - 3(...)^{2/3} - 3(...)^{2/3} > bound_b - 3`; with both
/// above it is `-ln(2 sqrt(<x^2>_M <p^2>_N) / hbar)`.
pub fn bound_l(acc: &Accuracies, tails: &TailData) -> f64 {
    bound_b(acc)
        + tail_correction(tails.x2_tail, tails.qx_tail, acc.dx)
        + tail_correction(tails.p2_tail, tails.qp_tail, acc.dp)
}

/// `H_M - [B_x + q_inf ln delta + \int_tail rho ln rho]` for the midpoint window of
/// `2M + 1` bins of width `delta`, where `B_x = S - ln delta`. Nonnegative by Jensen.
pub fn jensen_diagnostic<D: Density + ?Sized>(density: &D, delta: f64, m: usize) -> Result<f64> {
    let grid = BinGrid::finite(delta, m)?;
    let dist = bin_probabilities(density, &grid)?;
    let h_m = discrete_entropy(&dist).value;
    let tail = Domain::outside(grid.window_edge().expect("finite window"))?;
    let s = continuous_entropy(density, &Domain::full_line())?;
    // Taken from the window bins so a slightly unnormalized density stays consistent.
    let q_inf = 1.0 - dist.covered_mass();
    let tail_rho_ln_rho = -continuous_entropy(density, &tail)?;
    let b_x = s - delta.ln();
    Ok(h_m - (b_x + q_inf * delta.ln() + tail_rho_ln_rho))
}

/// `\int_domain f ln f + (1/2) ln(2 pi e sigma^2)` for a density normalized on `domain`.
/// Nonnegative, and zero for a Gaussian on the full line.
pub fn reversed_log_sobolev_check<D: Density + ?Sized>(density: &D, domain: &Domain) -> Result<f64> {
    let m0 = moment(density, 0, domain)?;
    let mean = moment(density, 1, domain)? / m0;
    let var = moment(density, 2, domain)? / m0 - mean * mean;
    if !(var > 0.0) {
        return Err(Error::Degenerate(format!("variance {var:e} on the domain")));
    }
    let lhs = -continuous_entropy(density, domain)?;
    Ok(lhs + 0.5 * (2.0 * PI * E * var).ln())
}

/// `<x^2>_M / q_inf - sigma^2(Omega_M)` on the region outside the window; nonnegative,
/// and zero only when the tail mean vanishes.
pub fn tail_variance_slack<D: Density + ?Sized>(density: &D, delta: f64, m: usize) -> Result<f64> {
    let grid = BinGrid::finite(delta, m)?;
    let t = tail_moments(density, &grid)?;
    let var = tail_variance(density, &grid)?;
    Ok(t.second / t.mass - var)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin >= -TOL_REPORT {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }
}

/// Everything evaluated for one state at one set of accuracies and windows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundReport {
    pub state: String,
    pub dx: f64,
    pub dp: f64,
    pub hbar: f64,
    pub gamma: f64,
    pub convention: String,
    pub window: Option<(usize, usize)>,
    pub entropies: BTreeMap<String, EntropyValue>,
    #[serde(rename = "bound_BBM")]
    pub bound_bbm: Option<f64>,
    #[serde(rename = "bound_B")]
    pub bound_b: Option<f64>,
    #[serde(rename = "bound_R")]
    pub bound_r: Option<f64>,
    #[serde(rename = "bound_L")]
    pub bound_l: Option<f64>,
    pub margins: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub diagnostics: Vec<String>,
    pub error: Option<String>,
}

impl BoundReport {
    /// Store `lhs - rhs` under `name` and the matching verdict.
    pub fn record(&mut self, name: &str, lhs: f64, rhs: f64) {
        let margin = lhs - rhs;
        let verdict = if margin.is_nan() {
            Verdict::Violated
        } else {
            Verdict::from_margin(margin)
        };
        self.margins.insert(name.to_string(), margin);
        self.verdicts.insert(name.to_string(), verdict);
    }

    pub fn not_applicable(&mut self, name: &str, reason: impl Into<String>) {
        self.verdicts.insert(name.to_string(), Verdict::NotApplicable);
        self.diagnostics.push(format!("{name}: {}", reason.into()));
    }

    pub fn any_violated(&self) -> bool {
        self.verdicts.values().any(|v| *v == Verdict::Violated)
    }

    /// True when no verdict is violated and no error was attached.
    pub fn is_clean(&self) -> bool {
        self.error.is_none() && !self.any_violated()
    }
}
