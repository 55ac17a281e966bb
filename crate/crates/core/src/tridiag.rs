//! Tridiagonal linear algebra: banded solves, Sturm-sequence bisection for
//! symmetric tridiagonal eigenvalues, and inverse iteration for eigenvectors.

use crate::error::{Error, Result};

/// A general tridiagonal matrix. `lower[i]` sits at `(i+1, i)`, `upper[i]`
/// at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len() + 1, diag.len());
        debug_assert_eq!(upper.len() + 1, diag.len());
        Self { lower, diag, upper }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Solves `A x = rhs` by Gaussian elimination with partial pivoting
    /// (the LAPACK `gtsv` scheme, one extra superdiagonal of fill).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Dimension(format!("rhs has {} rows, matrix {}", rhs.len(), n)));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = self.lower.clone();
        let mut b = rhs.to_vec();

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularJacobian { row: i });
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = fact;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - fact * tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                du[i] = tmp;
                b.swap(i, i + 1);
                b[i + 1] -= fact * b[i];
                dl[i] = fact;
            }
        }
        if d[n - 1] == 0.0 || !d[n - 1].is_finite() {
            return Err(Error::SingularJacobian { row: n - 1 });
        }

        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian { row: 0 });
        }
        Ok(b)
    }
}

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        debug_assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = if i == 0 { self.diag[0] - lambda } else { self.diag[i] - lambda - coupling / q };
            if q == 0.0 {
                // Perturb an exact zero pivot; eigenvalues are continuous in
                // the shift so the count is unaffected.
                q = -f64::EPSILON * (self.diag[i].abs() + lambda.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// The `count` smallest eigenvalues in nondecreasing order, each located
    /// by bisection on the Sturm count.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.len());
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        (0..count)
            .map(|j| {
                let (mut a, mut b) = (lo - 1e-12 * scale, hi + 1e-12 * scale);
                // invariant: sturm_count(a) <= j < sturm_count(b)
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if self.sturm_count(mid) > j {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    /// Eigenvector for a computed eigenvalue by inverse iteration, normalized
    /// to unit Euclidean length with a positive first significant entry.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let shift = lambda + 64.0 * f64::EPSILON * scale;
        let lower = self.off.clone();
        let upper = self.off.clone();
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let shifted = Tridiagonal::new(lower, diag, upper);

        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64 / 13.0).collect();
        normalize(&mut x);
        for _ in 0..4 {
            let mut y = shifted.solve(&x)?;
            normalize(&mut y);
            x = y;
        }
        // orient: largest-magnitude entry positive
        let imax = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(x)
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
