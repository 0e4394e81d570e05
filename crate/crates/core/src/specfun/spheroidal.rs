//! Prolate spheroidal functions of order `m = n = 0`.
//!
//! The angular function is expanded in even Legendre polynomials,
//! `S00(c, eta) = sum'_r d_r P_r(eta)`, where the coefficients solve the three-term
//! recurrence
//!
//! ```text
//! alpha_r d_{r+2} + (beta_r - lambda) d_r + gamma_r d_{r-2} = 0,
//! alpha_r = (r+2)(r+1) c^2 / ((2r+3)(2r+5))
//! beta_r  = r(r+1) + c^2 (2r(r+1) - 1) / ((2r-1)(2r+3))
//! gamma_r = r(r-1) c^2 / ((2r-3)(2r-1))
//! ```
//!
//! `lambda = lambda_00(c)` is the smallest eigenvalue of the truncated recurrence, which
//! is symmetrized into a tridiagonal matrix and solved by Sturm-sequence bisection.
//! The coefficients then follow from the downward continued-fraction ratios
//! `d_r / d_{r-2}`, which pick out the minimal (decaying) solution.
//!
//! Coefficients are normalized so that `S00(c, 0) = sum' d_r P_r(0) = 1`. With that
//! normalization the radial function of the first kind at the focal point,
//! `R00(c, 1) = sum' (-1)^{r/2} d_r j_r(c) / sum' d_r`, equals `d_0`: the Fourier
//! eigen-relation `\int_{-1}^{1} e^{icxt} S00(c,t) dt = 2 R00(c,1) S00(c,x)` at `x = 0`
//! gives `2 d_0 = 2 R00(c,1) S00(c,0)`. Both `sum' d_r P_r(0)` terms and `d_0` are free
//! of cancellation, unlike the Bessel series, whose numerator and denominator both
//! collapse to `O(e^{-c})` for large `c`.

use serde::Serialize;

use super::bessel::spherical_jn_all;
use crate::error::{Error, Result};

/// Largest supported spheroidicity.
pub const MAX_C: f64 = 50.0;

/// Residual and eigenvalue-stability target for the automatic truncation.
pub const RESIDUAL_TOL: f64 = 1e-12;

const MAX_TERMS: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpheroidalSolution {
    pub c: f64,
    /// Separation constant `lambda_00(c)`; zero at `c = 0`.
    pub eigenvalue: f64,
    /// `coeffs[i] = d_{2i}`, normalized so that `S00(c, 0) = 1`.
    pub coeffs: Vec<f64>,
    /// Number of even Legendre terms kept.
    pub truncation: usize,
    /// Largest of the backward row residual and the size of the last kept coefficient.
    pub residual: f64,
}

impl SpheroidalSolution {
    /// `d_r`; zero for odd `r` and beyond the truncation.
    pub fn coeff(&self, r: usize) -> f64 {
        if r % 2 == 1 {
            0.0
        } else {
            self.coeffs.get(r / 2).copied().unwrap_or(0.0)
        }
    }

    /// `R00(c, 1)`.
    pub fn radial_at_one(&self) -> f64 {
        self.coeffs[0]
    }

    /// `R00(c, 1)` from its defining spherical-Bessel series.
    ///
    /// Loses roughly `log10(max|d_r| / |sum' d_r|)` digits to cancellation, which grows
    /// linearly in `c`; kept as an independent route for moderate `c`.
    pub fn radial_at_one_bessel_series(&self) -> f64 {
        if self.c == 0.0 {
            return 1.0;
        }
        let j = spherical_jn_all(2 * (self.coeffs.len() - 1), self.c);
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, d) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            num += sign * d * j[2 * i];
            den += d;
        }
        num / den
    }

    /// Angular function `S00(c, eta)` for `eta` in `[-1, 1]`.
    pub fn angular(&self, eta: f64) -> f64 {
        // (p_prev, p) = (P_{l-1}, P_l); two steps bring the next even order into p_prev.
        let mut p_prev = 1.0;
        let mut p = eta;
        let mut l = 1usize;
        let mut sum = self.coeffs[0];
        for d in &self.coeffs[1..] {
            for _ in 0..2 {
                let lf = l as f64;
                let next = ((2.0 * lf + 1.0) * eta * p - lf * p_prev) / (lf + 1.0);
                p_prev = p;
                p = next;
                l += 1;
            }
            sum += d * p_prev;
        }
        sum
    }
}

struct Recurrence {
    c2: f64,
}

impl Recurrence {
    fn alpha(&self, i: usize) -> f64 {
        let r = (2 * i) as f64;
        (r + 2.0) * (r + 1.0) * self.c2 / ((2.0 * r + 3.0) * (2.0 * r + 5.0))
    }
    fn beta(&self, i: usize) -> f64 {
        let r = (2 * i) as f64;
        r * (r + 1.0) + self.c2 * (2.0 * r * (r + 1.0) - 1.0) / ((2.0 * r - 1.0) * (2.0 * r + 3.0))
    }
    fn gamma(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let r = (2 * i) as f64;
        r * (r - 1.0) * self.c2 / ((2.0 * r - 3.0) * (2.0 * r - 1.0))
    }
    /// Off-diagonal of the symmetrized matrix, coupling rows `i` and `i + 1`.
    fn sym_off(&self, i: usize) -> f64 {
        (self.alpha(i) * self.gamma(i + 1)).sqrt()
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let q_safe = if q == 0.0 { f64::EPSILON * (diag[i - 1].abs() + off[i - 1].abs()).max(f64::MIN_POSITIVE) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by bisection.
pub(crate) fn smallest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let radius = |i: usize| -> f64 {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve with a fixed number of even Legendre terms, no convergence loop.
pub fn spheroidal_eigensystem_with_terms(c: f64, terms: usize) -> Result<SpheroidalSolution> {
    check_c(c)?;
    if terms < 2 {
        return Err(Error::Domain(format!("need at least 2 Legendre terms, got {terms}")));
    }
    if c == 0.0 {
        let mut coeffs = vec![0.0; terms];
        coeffs[0] = 1.0;
        return Ok(SpheroidalSolution {
            c,
            eigenvalue: 0.0,
            coeffs,
            truncation: terms,
            residual: 0.0,
        });
    }
    let rec = Recurrence { c2: c * c };
    let diag: Vec<f64> = (0..terms).map(|i| rec.beta(i)).collect();
    let off: Vec<f64> = (0..terms - 1).map(|i| rec.sym_off(i)).collect();
    let lambda = smallest_eigenvalue(&diag, &off);

    // ratio[i] = d_{2i} / d_{2i-2}, from the top down.
    let mut ratio = vec![0.0; terms];
    let mut above = 0.0;
    for i in (1..terms).rev() {
        let denom = rec.beta(i) - lambda + rec.alpha(i) * above;
        ratio[i] = -rec.gamma(i) / denom;
        above = ratio[i];
    }
    let mut d = vec![0.0; terms];
    d[0] = 1.0;
    for i in 1..terms {
        d[i] = d[i - 1] * ratio[i];
    }

    // Normalize to S00(c, 0) = sum d_{2i} P_{2i}(0); all terms share a sign.
    let mut p0 = 1.0;
    let mut s0 = d[0];
    for (i, di) in d.iter().enumerate().skip(1) {
        p0 *= -((2 * i - 1) as f64) / ((2 * i) as f64);
        s0 += di * p0;
    }
    for di in d.iter_mut() {
        *di /= s0;
    }

    let d_max = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut residual = d[terms - 1].abs() / d_max;
    for i in 0..terms {
        let below = if i > 0 { rec.gamma(i) * d[i - 1] } else { 0.0 };
        let here = (rec.beta(i) - lambda) * d[i];
        let up = if i + 1 < terms { rec.alpha(i) * d[i + 1] } else { 0.0 };
        let scale = below.abs() + (rec.beta(i).abs() + lambda.abs()) * d[i].abs() + up.abs();
        if scale > 1e-280 {
            residual = residual.max((below + here + up).abs() / scale);
        }
    }

    Ok(SpheroidalSolution {
        c,
        eigenvalue: lambda,
        coeffs: d,
        truncation: terms,
        residual,
    })
}

fn check_c(c: f64) -> Result<()> {
    if !(0.0..=MAX_C).contains(&c) {
        return Err(Error::Domain(format!("spheroidicity c = {c} outside supported range [0, {MAX_C}]")));
    }
    Ok(())
}

/// Initial truncation: `2c + 30` even terms.
pub fn initial_terms(c: f64) -> usize {
    (2.0 * c).ceil() as usize + 30
}

/// Eigenvalue and Legendre coefficients for `m = n = 0`, doubling the truncation from
/// `2c + 30` terms until the residual and the eigenvalue change are below `1e-12`.
pub fn spheroidal_eigensystem(c: f64) -> Result<SpheroidalSolution> {
    check_c(c)?;
    let mut terms = initial_terms(c);
    let mut prev = spheroidal_eigensystem_with_terms(c, terms)?;
    while terms < MAX_TERMS {
        terms *= 2;
        let next = spheroidal_eigensystem_with_terms(c, terms)?;
        let shift = (next.eigenvalue - prev.eigenvalue).abs();
        if next.residual < RESIDUAL_TOL && shift < RESIDUAL_TOL * next.eigenvalue.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numeric {
        what: format!("spheroidal expansion for c = {c} did not converge within {MAX_TERMS} terms"),
        residual: prev.residual,
    })
}

/// Radial prolate spheroidal function of the first kind `R00(c, 1)`.
pub fn radial_s1_at_one(c: f64) -> Result<f64> {
    Ok(spheroidal_eigensystem(c)?.radial_at_one())
}
