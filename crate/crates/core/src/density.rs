//! Integrable one-dimensional densities and the interval unions they are integrated over.

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, Tolerance};

/// A nonnegative function on the real line that can be integrated.
///
/// Implementors report where they vanish identically (`support`) and where
/// they are not smooth or have structure worth splitting at (`breakpoints_in`),
/// which lets the adaptive integrator stay on smooth panels.
pub trait Density: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Sorted breakpoints strictly inside `(lo, hi)`.
    fn breakpoints_in(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        (**self).breakpoints_in(lo, hi)
    }
}

/// Closed interval; either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A finite union of disjoint intervals, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    intervals: Vec<Interval>,
}

impl Domain {
    pub fn full_line() -> Self {
        Domain {
            intervals: vec![Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Domain {
            intervals: vec![Interval::new(lo, hi)?],
        })
    }

    /// `(-inf, -edge] U [edge, inf)`, the region outside a symmetric detector window.
    pub fn outside(edge: f64) -> Result<Self> {
        if !(edge >= 0.0) || edge.is_infinite() {
            return Err(Error::Domain(format!("window edge must be finite and >= 0, got {edge}")));
        }
        Domain::union(vec![
            Interval::new(f64::NEG_INFINITY, -edge)?,
            Interval::new(edge, f64::INFINITY)?,
        ])
    }

    /// Union of intervals that may touch at endpoints but must not overlap.
    pub fn union(mut intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Domain("empty domain".into()));
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in intervals.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Domain(format!(
                    "overlapping intervals [{}, {}] and [{}, {}]",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Domain { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn is_full_line(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].lo == f64::NEG_INFINITY
            && self.intervals[0].hi == f64::INFINITY
    }
}

/// `\int_domain g(x, rho(x)) dx`, clipped to the density's support.
pub fn integrate_with<D, G>(density: &D, domain: &Domain, g: G, tol: &Tolerance) -> Result<Estimate>
where
    D: Density + ?Sized,
    G: Fn(f64, f64) -> f64,
{
    let (s_lo, s_hi) = density.support();
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
    };
    for iv in domain.intervals() {
        let lo = iv.lo.max(s_lo);
        let hi = iv.hi.min(s_hi);
        if lo >= hi {
            continue;
        }
        let breaks = density.breakpoints_in(lo, hi);
        let e = quad::integrate(|x| g(x, density.eval(x)), lo, hi, &breaks, tol)?;
        total.value += e.value;
        total.error += e.error;
    }
    Ok(total)
}

/// `\int_domain x^order rho(x) dx`.
pub fn moment<D: Density + ?Sized>(density: &D, order: u32, domain: &Domain) -> Result<f64> {
    if order > 2 {
        return Err(Error::Domain(format!("moment order {order} not in {{0, 1, 2}}")));
    }
    let tol = Tolerance::current();
    let e = match order {
        0 => integrate_with(density, domain, |_, r| r, &tol)?,
        1 => integrate_with(density, domain, |x, r| x * r, &tol)?,
        _ => integrate_with(density, domain, |x, r| x * x * r, &tol)?,
    };
    Ok(e.value)
}

/// Mean and variance of a normalized density over the full line.
pub fn mean_and_variance<D: Density + ?Sized>(density: &D) -> Result<(f64, f64)> {
    let full = Domain::full_line();
    let mass = moment(density, 0, &full)?;
    let m1 = moment(density, 1, &full)? / mass;
    let m2 = moment(density, 2, &full)? / mass;
    Ok((m1, (m2 - m1 * m1).max(0.0)))
}

/// Uniform density on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    lo: f64,
    hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("uniform density needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Uniform { lo, hi })
    }
}

impl Density for Uniform {
    fn eval(&self, x: f64) -> f64 {
        if x >= self.lo && x <= self.hi {
            1.0 / (self.hi - self.lo)
        } else {
            0.0
        }
    }
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// The restriction of a density to a domain, rescaled to unit mass there.
///
/// This is the conditional density `rho / q` used for tail statistics.
pub struct Restricted<'a, D: Density + ?Sized> {
    inner: &'a D,
    domain: Domain,
    mass: f64,
}

impl<'a, D: Density + ?Sized> Restricted<'a, D> {
    pub fn new(inner: &'a D, domain: Domain) -> Result<Self> {
        let mass = moment(inner, 0, &domain)?;
        if !(mass > 0.0) {
            return Err(Error::DegenerateTail { tail_mass: mass });
        }
        Ok(Restricted {
            inner,
            domain,
            mass,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

impl<D: Density + ?Sized> Density for Restricted<'_, D> {
    fn eval(&self, x: f64) -> f64 {
        if self.domain.contains(x) {
            self.inner.eval(x) / self.mass
        } else {
            0.0
        }
    }
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        let ivs = self.domain.intervals();
        (lo.max(ivs[0].lo), hi.min(ivs[ivs.len() - 1].hi))
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut b = self.inner.breakpoints_in(lo, hi);
        for iv in self.domain.intervals() {
            for e in [iv.lo, iv.hi] {
                if e > lo && e < hi {
                    b.push(e);
                }
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}
