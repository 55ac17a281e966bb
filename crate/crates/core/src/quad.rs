//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    if hi == lo {
        return 0.0;
    }
    if hi < lo {
        return -adaptive_simpson(f, hi, lo, tol);
    }
    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (f(lo), f(mid), f(hi));
    let whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    recurse(&f, lo, hi, f_lo, f_mid, f_hi, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left_mid = 0.5 * (lo + mid);
    let right_mid = 0.5 * (mid + hi);
    let f_lm = f(left_mid);
    let f_rm = f(right_mid);
    let left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    let right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
    let delta = left + right - whole;
    // Do not accept the first level blindly: a symmetric integrand can fool
    // the error estimate on a coarse split.
    if depth == 0 || (depth < MAX_DEPTH - 2 && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    recurse(f, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1)
        + recurse(f, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1)
}
