//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite and infinite intervals.
//!
//! Semi-infinite pieces are mapped onto `[0, 1)` with `x = a + t/(1 - t)` (or its mirror),
//! whose Jacobian is `1/(1 - t)^2`. Kronrod nodes never touch the open endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Environment variable overriding the default relative tolerance (diagnostic use only).
pub const RTOL_ENV: &str = "ENTROPIC_QUAD_RTOL";

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Extra bisections allowed beyond the initial panels.
    pub max_bisections: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-14,
            max_bisections: 20_000,
        }
    }
}

impl Tolerance {
    /// The process-wide tolerance: the default, with the relative part optionally
    /// overridden through [`RTOL_ENV`].
    pub fn current() -> Tolerance {
        static CURRENT: OnceLock<Tolerance> = OnceLock::new();
        *CURRENT.get_or_init(|| {
            let mut tol = Tolerance::default();
            if let Some(rel) = std::env::var(RTOL_ENV)
                .ok()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|r| *r > 0.0 && r.is_finite())
            {
                tol.rel = rel;
            }
            tol
        })
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Finite,
    /// `x = origin + t/(1-t)`
    Upper(f64),
    /// `x = origin - t/(1-t)`
    Lower(f64),
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    map: Map,
    value: f64,
    error: f64,
    /// Integral of `|f|` over the panel.
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, map: Map) -> (f64, f64, f64) {
    let g = |t: f64| -> f64 {
        match map {
            Map::Finite => f(t),
            Map::Upper(a) => {
                let s = 1.0 - t;
                let v = f(a + t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            }
            Map::Lower(b) => {
                let s = 1.0 - t;
                let v = f(b - t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            }
        }
    };
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let err = rescale_error((res_k - res_g) * h, res_abs * h, res_asc * h);
    (res_k * half, err, res_abs * h)
}

fn make_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, map: Map) -> Panel {
    let (value, error, magnitude) = gk15(f, lo, hi, map);
    Panel {
        lo,
        hi,
        map,
        value,
        error,
        magnitude,
    }
}

/// Integrate `f` over `[lo, hi]` (either end may be infinite), splitting first at
/// every breakpoint strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<Estimate> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("NaN integration limit".into()));
    }
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if lo > hi {
        let e = integrate(f, hi, lo, breaks, tol)?;
        return Ok(Estimate {
            value: -e.value,
            error: e.error,
        });
    }

    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    if lo.is_infinite() && hi.is_infinite() && cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::with_capacity(edges.len() * 2);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let panel = match (a.is_infinite(), b.is_infinite()) {
            (false, false) => make_panel(&f, a, b, Map::Finite),
            (false, true) => make_panel(&f, 0.0, 1.0, Map::Upper(a)),
            (true, false) => make_panel(&f, 0.0, 1.0, Map::Lower(b)),
            (true, true) => unreachable!("full line is always split"),
        };
        heap.push(panel);
    }

    let totals = |heap: &BinaryHeap<Panel>| -> (f64, f64) {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    // Each panel's error estimate is floored at 50 eps times its |f| integral, so an
    // integral that cancels to nearly zero cannot get below 100 eps \int|f|.
    let magnitude = |heap: &BinaryHeap<Panel>| -> f64 { heap.iter().map(|p| p.magnitude).sum() };

    let (mut value, mut error) = totals(&heap);
    let mut floor = 100.0 * f64::EPSILON * magnitude(&heap);
    let mut bisections = 0usize;
    while error > tol.abs.max(tol.rel * value.abs()).max(floor) {
        if bisections >= tol.max_bisections {
            return Err(Error::Numeric {
                what: format!("adaptive quadrature on [{lo}, {hi}] did not converge"),
                residual: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel can no longer be split in floating point; accept it as is.
            let frozen = Panel { error: 0.0, ..worst };
            heap.push(frozen);
            let t = totals(&heap);
            value = t.0;
            error = t.1;
            floor = 100.0 * f64::EPSILON * magnitude(&heap);
            continue;
        }
        let left = make_panel(&f, worst.lo, mid, worst.map);
        let right = make_panel(&f, mid, worst.hi, worst.map);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += 100.0 * f64::EPSILON * (left.magnitude + right.magnitude - worst.magnitude);
        heap.push(left);
        heap.push(right);
        bisections += 1;
        // Refresh running sums periodically to stop drift from incremental updates.
        if bisections.is_multiple_of(256) {
            let t = totals(&heap);
            value = t.0;
            error = t.1;
        }
    }
    let (value, error) = totals(&heap);
    Ok(Estimate { value, error })
}
