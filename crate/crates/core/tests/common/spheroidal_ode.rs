//! Direct solution of the prolate angular equation
//! `(1 - eta^2) S'' - 2 eta S' + (lambda - c^2 eta^2) S = 0` for the even ground state,
//! independent of any Legendre expansion.
//!
//! The solution regular at `eta = 0` (`S = 1, S' = 0`) is integrated outward with RK4;
//! the solution regular at `eta = 1` comes from its Frobenius series in `t = 1 - eta`
//! and is integrated inward. `lambda` is the first root of their Wronskian.
//!
//! The radial value follows from the Fourier eigen-relation
//! `\int_{-1}^{1} exp(i c x t) S(t) dt = 2 R00(c, 1) S(x)` at `x = 0` and at `x = 1`.
//! The `x = 1` form integrates `cos(c t) S(t)`, which cancels down to `S(1)`, a value
//! that falls like `exp(-c)` relative to `S(0)`; it is only well conditioned for small `c`.

const MATCH_AT: f64 = 0.3;
const SERIES_T: f64 = 0.05;
const STEP: f64 = 5e-5;
/// Below this eta the coefficients stay moderate; above it a finer step is used.
const FINE_FROM: f64 = 0.8;

/// State (S, S', \int cos(c eta) S, \int S) along eta.
type Y = [f64; 4];

fn rhs(c: f64, lambda: f64, eta: f64, y: &Y) -> Y {
    let s2 = (2.0 * eta * y[1] - (lambda - c * c * eta * eta) * y[0]) / (1.0 - eta * eta);
    [y[1], s2, (c * eta).cos() * y[0], y[0]]
}

fn rk4(c: f64, lambda: f64, from: f64, to: f64, step: f64, mut y: Y) -> Y {
    let n = ((to - from).abs() / step).ceil() as usize;
    let h = (to - from) / n as f64;
    for i in 0..n {
        let e = from + i as f64 * h;
        let k1 = rhs(c, lambda, e, &y);
        let a = |k: &Y, f: f64| [y[0] + f * k[0], y[1] + f * k[1], y[2] + f * k[2], y[3] + f * k[3]];
        let k2 = rhs(c, lambda, e + 0.5 * h, &a(&k1, 0.5 * h));
        let k3 = rhs(c, lambda, e + 0.5 * h, &a(&k2, 0.5 * h));
        let k4 = rhs(c, lambda, e + h, &a(&k3, h));
        for j in 0..4 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y
}

/// Frobenius coefficients of the solution regular at eta = 1, with a_0 = 1.
fn series(c: f64, lambda: f64) -> Vec<f64> {
    let c2 = c * c;
    let mut a = vec![1.0];
    for j in 0..400usize {
        let jf = j as f64;
        let am1 = if j >= 1 { a[j - 1] } else { 0.0 };
        let am2 = if j >= 2 { a[j - 2] } else { 0.0 };
        let next = ((jf * (jf + 1.0) - lambda + c2) * a[j] - 2.0 * c2 * am1 + c2 * am2) / (2.0 * (jf + 1.0) * (jf + 1.0));
        a.push(next);
        if j > 20 && (next * SERIES_T.powi(j as i32 + 1)).abs() < 1e-20 {
            break;
        }
    }
    a
}

/// (S, dS/d eta) of the right solution at t = 1 - eta.
fn series_eval(a: &[f64], t: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut ds = 0.0;
    for (j, aj) in a.iter().enumerate().rev() {
        s = s * t + aj;
        if j > 0 {
            ds = ds * t + j as f64 * aj;
        }
    }
    (s, -ds)
}

struct Pieces {
    left: Y,
    right: Y,
    /// \int_{1 - SERIES_T}^{1} of cos(c eta) S_right and of S_right.
    right_tail: [f64; 2],
}

fn pieces(c: f64, lambda: f64) -> Pieces {
    let left = rk4(c, lambda, 0.0, MATCH_AT, STEP, [1.0, 0.0, 0.0, 0.0]);
    let a = series(c, lambda);
    let (s, ds) = series_eval(&a, SERIES_T);
    // Integral over [1 - SERIES_T, 1] by composite Simpson on the series.
    let n = 400;
    let h = SERIES_T / n as f64;
    let mut tail = [0.0; 2];
    for i in 0..=n {
        let t = i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let v = series_eval(&a, t).0;
        tail[0] += w * (c * (1.0 - t)).cos() * v;
        tail[1] += w * v;
    }
    tail[0] *= h / 3.0;
    tail[1] *= h / 3.0;
    // Inward integration accumulates \int_{0.95}^{eta} which is minus the forward integral.
    let mid = rk4(c, lambda, 1.0 - SERIES_T, FINE_FROM, STEP / 5.0, [s, ds, 0.0, 0.0]);
    let right = rk4(c, lambda, FINE_FROM, MATCH_AT, STEP, mid);
    Pieces {
        left,
        right,
        right_tail: tail,
    }
}

fn wronskian(c: f64, lambda: f64) -> f64 {
    let p = pieces(c, lambda);
    let (l, r) = (p.left, p.right);
    let w = l[0] * r[1] - l[1] * r[0];
    w / ((l[0] * l[0] + l[1] * l[1]).sqrt() * (r[0] * r[0] + r[1] * r[1]).sqrt())
}

/// Smallest eigenvalue lambda_00(c), found as the first sign change of the Wronskian.
pub fn eigenvalue(c: f64) -> f64 {
    let step = 0.5;
    let mut lo = 0.0;
    let mut w_lo = wronskian(c, lo);
    let mut hi = step;
    let mut w_hi = wronskian(c, hi);
    while w_lo.signum() == w_hi.signum() {
        lo = hi;
        w_lo = w_hi;
        hi += step;
        w_hi = wronskian(c, hi);
        assert!(hi < c * c + 10.0, "no eigenvalue found for c = {c}");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let wm = wronskian(c, mid);
        if wm.signum() == w_lo.signum() {
            lo = mid;
            w_lo = wm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solution of the angular equation at one `c`.
pub struct OdeSolution {
    pub lambda: f64,
    /// `\int_0^1 S / S(0)`: the `x = 0` form of the eigen-relation.
    pub radial_from_origin: f64,
    /// `\int_0^1 cos(c t) S / S(1)`: the `x = 1` form.
    pub radial_from_edge: f64,
}

pub fn solve(c: f64) -> OdeSolution {
    let lambda = eigenvalue(c);
    let p = pieces(c, lambda);
    // Scale the right solution to meet the left one (S(0) = 1) at the matching point;
    // then S(1) = alpha a_0 = alpha.
    let alpha = p.left[0] / p.right[0];
    let cos_integral = p.left[2] + alpha * (-p.right[2] + p.right_tail[0]);
    let plain_integral = p.left[3] + alpha * (-p.right[3] + p.right_tail[1]);
    OdeSolution {
        lambda,
        radial_from_origin: plain_integral,
        radial_from_edge: cos_integral / alpha,
    }
}
