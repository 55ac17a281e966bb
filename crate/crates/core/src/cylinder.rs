//! The oscillating warp f(t) = t⁶(sin(2π/t) + 1) + 1 on R × Sⁿ and its
//! critical slices.
//!
//! Slices {t} × Sⁿ are totally geodesic exactly where f′(t) = 0. Writing
//! S = sin(2π/t), C = cos(2π/t):
//!
//! ```text
//! f′ = t⁴(6t(S + 1) − 2πC)
//! f″ = 30t⁴(S + 1) − 20πt³C − 4π²t²S
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bisection stops once the bracket is this narrow.
pub const ROOT_TOL: f64 = 1e-12;

/// |f″| above this counts as nondegenerate.
pub const NONDEGENERACY_TOL: f64 = 1e-8;

/// (f, f′, f″) with the limits (1, 0, 0) at t = 0.
pub fn oscillating_eval(t: f64) -> (f64, f64, f64) {
    if t == 0.0 {
        return (1.0, 0.0, 0.0);
    }
    let theta = 2.0 * std::f64::consts::PI / t;
    let (s, c) = theta.sin_cos();
    let pi = std::f64::consts::PI;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t2 * t2;
    let f = t4 * t2 * (s + 1.0) + 1.0;
    let f1 = t4 * (6.0 * t * (s + 1.0) - 2.0 * pi * c);
    let f2 = 30.0 * t4 * (s + 1.0) - 20.0 * pi * t3 * c - 4.0 * pi * pi * t2 * s;
    (f, f1, f2)
}

fn derivative(t: f64) -> f64 {
    oscillating_eval(t).1
}

/// Mean-curvature proxy |f′(t)| of the slice at t.
pub fn slice_minimality_check(t: f64) -> f64 {
    derivative(t).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t_star: f64,
    pub f_second: f64,
    pub nondegenerate: bool,
    pub sin_value: f64,
}

impl CriticalPoint {
    fn at(t: f64) -> Self {
        let (_, _, f2) = oscillating_eval(t);
        Self {
            t_star: t,
            f_second: f2,
            nondegenerate: f2.abs() > NONDEGENERACY_TOL,
            sin_value: (2.0 * std::f64::consts::PI / t).sin(),
        }
    }
}

fn bisect(mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = derivative(lo);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = derivative(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scan(lo: f64, hi: f64, resolution: f64, out: &mut Vec<f64>) {
    if hi <= lo {
        return;
    }
    let steps = ((hi - lo) / resolution).ceil() as usize;
    let node = |i: usize| if i == steps { hi } else { lo + i as f64 * resolution };
    let mut prev_t = node(0);
    let mut prev = derivative(prev_t);
    if prev == 0.0 {
        out.push(prev_t);
    }
    for i in 1..=steps {
        let t = node(i);
        let value = derivative(t);
        if value == 0.0 {
            out.push(t);
        } else if prev != 0.0 && (value < 0.0) != (prev < 0.0) {
            out.push(bisect(prev_t, t));
        }
        prev_t = t;
        prev = value;
    }
}

/// All sign changes of f′ on [t_lo, t_hi] at the given sampling step,
/// polished by bisection. A range containing 0 is cut at ±resolution.
/// Results are ordered by decreasing |t|, so each sign gives a sequence
/// approaching 0.
pub fn critical_points(range: (f64, f64), resolution: f64) -> Result<Vec<CriticalPoint>> {
    let (lo, hi) = range;
    if !(resolution > 0.0) || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidOptions(format!("bad range [{lo}, {hi}] or resolution {resolution}")));
    }
    // adjacent critical points near t sit about t²/2 apart
    let nearest = if lo <= 0.0 && hi >= 0.0 { resolution } else { lo.abs().min(hi.abs()) };
    if nearest * nearest / 2.0 < 2.0 * resolution {
        return Err(Error::ResolutionTooCoarse { t: nearest });
    }

    let mut roots = Vec::new();
    if hi <= 0.0 || lo >= 0.0 {
        scan(lo, hi, resolution, &mut roots);
    } else {
        scan(lo, -resolution, resolution, &mut roots);
        scan(resolution, hi, resolution, &mut roots);
    }
    roots.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
    roots.dedup_by(|x, y| (*x - *y).abs() <= ROOT_TOL);
    for pair in roots.windows(2) {
        if pair[0].signum() == pair[1].signum() && (pair[0] - pair[1]).abs() < 2.0 * resolution {
            return Err(Error::ResolutionTooCoarse { t: pair[1] });
        }
    }
    Ok(roots.into_iter().map(CriticalPoint::at).collect())
}
