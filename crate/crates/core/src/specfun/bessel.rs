//! Spherical Bessel functions of the first kind for a run of orders at one argument.

/// `j_0(x), ..., j_{n_max}(x)` for `x >= 0`.
///
/// Orders up to `floor(x)` come from upward recurrence, which is stable there. Higher
/// orders come from Miller's downward recurrence, rescaled to agree with the upward
/// value at the switch-over order (or with `j_0` when `x < 1`).
pub fn spherical_jn_all(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "spherical_jn_all needs finite x >= 0, got {x}");
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let j0 = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    out[0] = j0;
    if n_max == 0 {
        return out;
    }

    let n_up = (x.floor() as usize).min(n_max);
    if n_up >= 1 {
        out[1] = x.sin() / (x * x) - x.cos() / x;
        for r in 1..n_up {
            out[r + 1] = (2 * r + 1) as f64 / x * out[r] - out[r - 1];
        }
    }
    if n_up == n_max {
        return out;
    }

    // Miller: start well above n_max, recur down to the anchor order.
    let anchor = n_up;
    let start = n_max + 20 + (x.ceil() as usize) + (4.0 * (n_max as f64).sqrt()) as usize;
    let mut f_next = 0.0;
    let mut f = 1e-280;
    let mut tmp = vec![0.0; n_max + 1];
    for r in (anchor + 1..=start).rev() {
        // f = f_r, f_next = f_{r+1}; produce f_{r-1}.
        let f_prev = (2 * r + 1) as f64 / x * f - f_next;
        f_next = f;
        f = f_prev;
        if r - 1 <= n_max {
            tmp[r - 1] = f;
        }
        if f.abs() > 1e250 {
            let s = 1e-250;
            f *= s;
            f_next *= s;
            for v in tmp.iter_mut() {
                *v *= s;
            }
        }
    }
    let scale = out[anchor] / tmp[anchor];
    for r in anchor + 1..=n_max {
        out[r] = tmp[r] * scale;
    }
    out
}
