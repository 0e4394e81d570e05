//! Normalized one-dimensional pure states in the position representation.
//!
//! Two carriers exist: the analytic displaced Gaussian
//!
//! ```text
//! psi(x) = (1/(pi sigma^2))^(1/4) exp(i p0 (x - x0/2)/hbar) exp(-(x - x0)^2 / (2 sigma^2))
//! ```
//!
//! and a uniformly sampled grid of complex amplitudes. Grid amplitudes are
//! interpolated by a natural cubic spline (real and imaginary parts
//! separately), so `|psi|^2` stays smooth and nonnegative between nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{self, Density, Domain};
use crate::error::{Error, Result};

/// Value of the reduced Planck constant in the caller's unit system.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HbarConvention(f64);

impl HbarConvention {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar > 0.0 && hbar.is_finite() {
            Ok(HbarConvention(hbar))
        } else {
            Err(Error::Domain(format!("hbar must be positive and finite, got {hbar}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for HbarConvention {
    fn default() -> Self {
        HbarConvention(1.0)
    }
}

impl TryFrom<f64> for HbarConvention {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        HbarConvention::new(v)
    }
}

impl From<HbarConvention> for f64 {
    fn from(h: HbarConvention) -> f64 {
        h.0
    }
}

/// Displaced minimum-uncertainty Gaussian with width `sigma`, centroids `x0` and `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    sigma: f64,
    x0: f64,
    p0: f64,
}

/// Offsets (in units of `sigma`) at which Gaussian integrals are split.
const GAUSS_SPLITS: [f64; 11] = [-12.0, -8.0, -5.0, -3.0, -1.5, 0.0, 1.5, 3.0, 5.0, 8.0, 12.0];

impl GaussianState {
    pub fn new(sigma: f64, x0: f64, p0: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !x0.is_finite() || !p0.is_finite() {
            return Err(Error::Domain("Gaussian centroids must be finite".into()));
        }
        Ok(GaussianState { sigma, x0, p0 })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn amplitude(&self, x: f64, hbar: f64) -> Complex64 {
        let norm = (PI * self.sigma * self.sigma).powf(-0.25);
        let d = x - self.x0;
        let envelope = norm * (-d * d / (2.0 * self.sigma * self.sigma)).exp();
        let phase = self.p0 * (x - 0.5 * self.x0) / hbar;
        Complex64::from_polar(envelope, phase)
    }

    pub fn density(&self, x: f64) -> f64 {
        let d = (x - self.x0) / self.sigma;
        (-d * d).exp() / (PI.sqrt() * self.sigma)
    }

    /// The same Gaussian in the momentum representation, written in the same family:
    /// width `hbar/sigma`, centre `p0`, and "conjugate centroid" `-x0`.
    pub fn fourier_dual(&self, hbar: f64) -> GaussianState {
        GaussianState {
            sigma: hbar / self.sigma,
            x0: self.p0,
            p0: -self.x0,
        }
    }
}

impl Density for GaussianState {
    fn eval(&self, x: f64) -> f64 {
        self.density(x)
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        GAUSS_SPLITS
            .iter()
            .map(|k| self.x0 + k * self.sigma)
            .filter(|b| *b > lo && *b < hi)
            .collect()
    }
}

/// Uniformly sampled complex amplitudes with natural-cubic-spline interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    samples: Vec<Complex64>,
    x_min: f64,
    dx: f64,
    /// Spline second derivatives at the nodes.
    curvature: Vec<Complex64>,
    pre_norm: f64,
}

impl GridState {
    /// Build a grid state and normalize it so that `sum |psi_j|^2 dx = 1`.
    pub fn new(samples: Vec<Complex64>, x_min: f64, dx: f64) -> Result<Self> {
        let mut g = GridState::unnormalized(samples, x_min, dx)?;
        if !(g.pre_norm > 0.0) || !g.pre_norm.is_finite() {
            return Err(Error::Domain(format!("grid state has norm {}", g.pre_norm)));
        }
        let scale = 1.0 / g.pre_norm.sqrt();
        for s in &mut g.samples {
            *s *= scale;
        }
        for c in &mut g.curvature {
            *c *= scale;
        }
        Ok(g)
    }

    /// Build without rescaling; `pre_norm` still records the Riemann norm.
    pub(crate) fn unnormalized(samples: Vec<Complex64>, x_min: f64, dx: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 samples, got {}", samples.len())));
        }
        if !(dx > 0.0) || !dx.is_finite() || !x_min.is_finite() {
            return Err(Error::Domain(format!("invalid grid origin {x_min} / spacing {dx}")));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Domain("grid samples must be finite".into()));
        }
        let pre_norm = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * dx;
        let curvature = natural_spline_curvature(&samples, dx);
        Ok(GridState {
            samples,
            x_min,
            dx,
            curvature,
            pre_norm,
        })
    }

    /// Sample `f` at `n` equally spaced points covering `[x_min, x_max]`, then normalize.
    pub fn from_fn<F: Fn(f64) -> Complex64>(f: F, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(x_max > x_min) {
            return Err(Error::Domain(format!("need n >= 2 and x_max > x_min (n = {n}, [{x_min}, {x_max}])")));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        let samples = (0..n).map(|j| f(x_min + j as f64 * dx)).collect();
        GridState::new(samples, x_min, dx)
    }

    /// Parse whitespace-separated `x Re[psi] [Im[psi]]` rows. Lines starting with `#`
    /// and blank lines are skipped; `x` must increase with uniform spacing.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut amps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let amp = match cols.len() {
                2 => Complex64::new(cols[1], 0.0),
                3 => Complex64::new(cols[1], cols[2]),
                k => {
                    return Err(Error::Parse(format!(
                        "line {}: expected 2 or 3 columns, found {k}",
                        lineno + 1
                    )))
                }
            };
            xs.push(cols[0]);
            amps.push(amp);
        }
        if xs.len() < 2 {
            return Err(Error::Parse(format!("need at least 2 rows, found {}", xs.len())));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (j, w) in xs.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Parse(format!("x not increasing at row {}", j + 2)));
            }
            let step = w[1] - w[0];
            if (step - dx).abs() > 1e-6 * dx {
                return Err(Error::Parse(format!(
                    "non-uniform spacing at row {}: step {step} vs mean {dx}",
                    j + 2
                )));
            }
        }
        GridState::new(amps, xs[0], dx)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.samples.len() - 1) as f64 * self.dx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    /// Riemann norm of the samples before normalization.
    pub fn pre_normalization_norm(&self) -> f64 {
        self.pre_norm
    }

    pub fn riemann_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn amplitude_at(&self, x: f64) -> Result<Complex64> {
        let (lo, hi) = (self.x_min, self.x_max());
        if !(x >= lo && x <= hi) {
            return Err(Error::Range { x, lo, hi });
        }
        Ok(self.interpolate(x))
    }

    fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.samples.len();
        let u = (x - self.x_min) / self.dx;
        let j = (u.floor() as isize).clamp(0, n as isize - 2) as usize;
        let t = u - j as f64;
        let s = 1.0 - t;
        let h2 = self.dx * self.dx / 6.0;
        self.samples[j] * s
            + self.samples[j + 1] * t
            + (self.curvature[j] * (s * s * s - s) + self.curvature[j + 1] * (t * t * t - t)) * h2
    }
}

fn natural_spline_curvature(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut m = vec![Complex64::new(0.0, 0.0); n];
    if n < 3 {
        return m;
    }
    // Interior rows: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2.
    let k = n - 2;
    let mut c_prime = vec![0.0; k];
    let mut d_prime = vec![Complex64::new(0.0, 0.0); k];
    let scale = 6.0 / (h * h);
    for i in 0..k {
        let rhs = (y[i + 2] - y[i + 1] * 2.0 + y[i]) * scale;
        if i == 0 {
            c_prime[0] = 1.0 / 4.0;
            d_prime[0] = rhs / 4.0;
        } else {
            let denom = 4.0 - c_prime[i - 1];
            c_prime[i] = 1.0 / denom;
            d_prime[i] = (rhs - d_prime[i - 1]) / denom;
        }
    }
    m[k] = d_prime[k - 1];
    for i in (0..k - 1).rev() {
        m[i + 1] = d_prime[i] - m[i + 2] * c_prime[i];
    }
    m
}

impl Density for GridState {
    fn eval(&self, x: f64) -> f64 {
        if x < self.x_min || x > self.x_max() {
            0.0
        } else {
            self.interpolate(x).norm_sqr()
        }
    }
    fn support(&self) -> (f64, f64) {
        (self.x_min, self.x_max())
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.samples.len();
        let first = ((lo - self.x_min) / self.dx).floor().max(0.0) as usize;
        let last = (((hi - self.x_min) / self.dx).ceil().max(0.0) as usize).min(n - 1);
        (first..=last)
            .map(|j| self.node(j))
            .filter(|x| *x > lo && *x < hi)
            .collect()
    }
}

/// Carrier of a [`QuantumState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Gaussian(GaussianState),
    Grid(GridState),
}

/// A normalized pure state together with the value of hbar it is expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    repr: Representation,
    hbar: HbarConvention,
}

/// Displaced Gaussian state with position density `exp(-(x-x0)^2/sigma^2) / (sqrt(pi) sigma)`.
pub fn make_gaussian(sigma: f64, x0: f64, p0: f64, hbar: f64) -> Result<QuantumState> {
    Ok(QuantumState {
        repr: Representation::Gaussian(GaussianState::new(sigma, x0, p0)?),
        hbar: HbarConvention::new(hbar)?,
    })
}

impl QuantumState {
    pub fn gaussian(g: GaussianState, hbar: HbarConvention) -> Self {
        QuantumState {
            repr: Representation::Gaussian(g),
            hbar,
        }
    }

    pub fn grid(g: GridState, hbar: HbarConvention) -> Self {
        QuantumState {
            repr: Representation::Grid(g),
            hbar,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn hbar(&self) -> HbarConvention {
        self.hbar
    }

    pub fn amplitude_at(&self, x: f64) -> Result<Complex64> {
        match &self.repr {
            Representation::Gaussian(g) => Ok(g.amplitude(x, self.hbar.value())),
            Representation::Grid(g) => g.amplitude_at(x),
        }
    }

    /// `|psi(x)|^2`. Grid states reject points outside their sampled range.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        match &self.repr {
            Representation::Gaussian(g) => Ok(g.density(x)),
            Representation::Grid(g) => Ok(g.amplitude_at(x)?.norm_sqr()),
        }
    }

    /// `\int_domain x^order rho(x) dx` for `order` in `{0, 1, 2}`.
    pub fn moment(&self, order: u32, domain: &Domain) -> Result<f64> {
        density::moment(self, order, domain)
    }
}

impl Density for QuantumState {
    fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Gaussian(g) => g.eval(x),
            Representation::Grid(g) => g.eval(x),
        }
    }
    fn support(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Gaussian(g) => g.support(),
            Representation::Grid(g) => g.support(),
        }
    }
    fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.repr {
            Representation::Gaussian(g) => g.breakpoints_in(lo, hi),
            Representation::Grid(g) => g.breakpoints_in(lo, hi),
        }
    }
}

/// Spacing used when sampling the non-Gaussian test families, in units of their length scale.
const FAMILY_STEP: f64 = 1.0 / 256.0;

fn sample_family<F: Fn(f64) -> f64>(f: F, half_extent: f64, step: f64, hbar: f64) -> Result<QuantumState> {
    let n = (2.0 * half_extent / step).ceil() as usize + 1;
    let grid = GridState::from_fn(|x| Complex64::new(f(x), 0.0), -half_extent, half_extent, n)?;
    Ok(QuantumState::grid(grid, HbarConvention::new(hbar)?))
}

/// Even superposition of two real Gaussians of width `sigma` centred at `±separation/2`.
pub fn even_two_gaussian(sigma: f64, separation: f64, hbar: f64) -> Result<QuantumState> {
    if !(sigma > 0.0) || !(separation >= 0.0) {
        return Err(Error::Domain(format!("need sigma > 0 and separation >= 0, got {sigma}, {separation}")));
    }
    let a = 0.5 * separation;
    let lobe = |x: f64| (-(x * x) / (2.0 * sigma * sigma)).exp();
    sample_family(|x| lobe(x - a) + lobe(x + a), a + 12.0 * sigma, sigma * FAMILY_STEP, hbar)
}

/// Smooth compactly supported bump `exp(-1/(1 - (x/w)^2))` on `(-w, w)`.
pub fn smooth_bump(half_width: f64, hbar: f64) -> Result<QuantumState> {
    if !(half_width > 0.0) {
        return Err(Error::Domain(format!("bump half-width must be positive, got {half_width}")));
    }
    let bump = move |x: f64| {
        let u = x / half_width;
        if u.abs() < 1.0 {
            (-1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        }
    };
    sample_family(bump, 1.25 * half_width, half_width * FAMILY_STEP / 4.0, hbar)
}

/// Even non-Gaussian state `exp(-(x/scale)^4 / 2)`.
pub fn quartic(scale: f64, hbar: f64) -> Result<QuantumState> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("quartic scale must be positive, got {scale}")));
    }
    sample_family(|x| (-0.5 * (x / scale).powi(4)).exp(), 3.5 * scale, scale * FAMILY_STEP, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian_grid(sigma: f64, lo: f64, hi: f64, n: usize) -> GridState {
        let g = GaussianState::new(sigma, 0.0, 0.0).unwrap();
        GridState::from_fn(|x| g.amplitude(x, 1.0), lo, hi, n).unwrap()
    }

    #[test]
    fn gaussian_density_at_origin() {
        let s = make_gaussian(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.density_at(0.0).unwrap(), 1.0 / PI.sqrt(), max_relative = 1e-15);
        assert_eq!(s.density_at(1.0).unwrap(), s.density_at(-1.0).unwrap());
    }

    #[test]
    fn invalid_parameters_are_domain_errors() {
        assert!(matches!(make_gaussian(0.0, 0.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(make_gaussian(-1.0, 0.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(make_gaussian(1.0, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(make_gaussian(1.0, 0.0, 0.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gaussian_moments() {
        let full = Domain::full_line();
        let s = make_gaussian(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.moment(0, &full).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.moment(2, &full).unwrap(), 0.5, max_relative = 1e-12);
        let left = Domain::interval(f64::NEG_INFINITY, 0.0).unwrap();
        assert_relative_eq!(s.moment(0, &left).unwrap(), 0.5, max_relative = 1e-12);
        let shifted = make_gaussian(1.0, 5.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(shifted.moment(1, &full).unwrap(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn grid_interpolation_matches_closed_form() {
        let grid = gaussian_grid(1.0, -10.0, 10.0, 2001);
        let exact = (-0.25f64).exp() / PI.sqrt();
        let got = grid.amplitude_at(0.5).unwrap().norm_sqr();
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
        // Between nodes as well.
        let x = 0.123_456;
        let got = grid.amplitude_at(x).unwrap().norm_sqr();
        assert!((got - (-x * x).exp() / PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn grid_out_of_range_is_range_error() {
        let grid = gaussian_grid(1.0, -5.0, 5.0, 101);
        let s = QuantumState::grid(grid, HbarConvention::default());
        assert!(matches!(s.density_at(5.5), Err(Error::Range { .. })));
        assert!(s.density_at(5.0).is_ok());
    }

    #[test]
    fn grid_normalization_is_recorded() {
        let samples = vec![Complex64::new(2.0, 0.0); 5];
        let g = GridState::new(samples, 0.0, 0.5).unwrap();
        assert_relative_eq!(g.pre_normalization_norm(), 10.0, max_relative = 1e-15);
        assert!((g.riemann_norm() - 1.0).abs() < 1e-12);
        assert!(matches!(GridState::new(vec![Complex64::new(0.0, 0.0); 3], 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(GridState::new(vec![Complex64::new(1.0, 0.0)], 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_two_and_three_columns() {
        let text = "# x re im\n0.0 1.0 0.0\n0.5 1.0 1.0\n1.0 0.0 1.0\n";
        let g = GridState::parse(text).unwrap();
        assert_eq!(g.len(), 3);
        assert_relative_eq!(g.dx(), 0.5);
        let two = GridState::parse("0 1\n1 2\n2 1\n").unwrap();
        assert_eq!(two.samples()[1].im, 0.0);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(GridState::parse("0 1\n0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(GridState::parse("0 1\n1 1\n3 1\n"), Err(Error::Parse(_))));
        assert!(matches!(GridState::parse("0 1 2 3\n1 1 1 1\n"), Err(Error::Parse(_))));
        assert!(matches!(GridState::parse("0 a\n1 1\n"), Err(Error::Parse(_))));
        assert!(matches!(GridState::parse("0 1\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn fourier_dual_of_displaced_gaussian() {
        let g = GaussianState::new(2.0, 1.0, 3.0).unwrap();
        let d = g.fourier_dual(0.5);
        assert_relative_eq!(d.sigma(), 0.25);
        assert_eq!(d.x0(), 3.0);
        assert_eq!(d.p0(), -1.0);
    }

    #[test]
    fn test_families_are_normalized() {
        let full = Domain::full_line();
        for s in [
            even_two_gaussian(1.0, 3.0, 1.0).unwrap(),
            smooth_bump(1.0, 1.0).unwrap(),
            quartic(1.0, 1.0).unwrap(),
        ] {
            let m0 = s.moment(0, &full).unwrap();
            assert!((m0 - 1.0).abs() < 1e-10, "norm {m0}");
        }
    }
}
