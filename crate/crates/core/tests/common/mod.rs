#![allow(dead_code)]

use std::sync::Arc;

use capcyl::geometry::{SphereMetric, WarpFunction};

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss–Legendre with `panels` equal panels of 20 points.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let width = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let mid = a + 0.5 * width;
        for (xi, wi) in x.iter().zip(&w) {
            total += wi * f(mid + 0.5 * width * xi);
        }
    }
    0.5 * width * total
}

pub fn bump(x: f64, a: f64) -> f64 {
    if x >= a { 0.0 } else { (-x * x / (a * a - x * x)).exp() }
}

pub fn warp() -> WarpFunction {
    WarpFunction::standard().unwrap()
}

pub fn metric(dim: usize, r: f64, nodes: usize) -> Arc<SphereMetric> {
    Arc::new(SphereMetric::new(dim, r, nodes, warp()).unwrap())
}

/// Ratio of successive differences of a quantity computed on three grids.
pub fn richardson(coarse: f64, mid: f64, fine: f64) -> f64 {
    (coarse - mid) / (mid - fine)
}
