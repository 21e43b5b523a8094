//! Symmetric tridiagonal eigenvalues (Sturm bisection) and the Thomas solver.

use crate::error::{Error, Result};

/// Number of eigenvalues of the symmetric tridiagonal matrix `(diag, off)`
/// strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let rad = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - rad);
        hi = hi.max(diag[i] + rad);
    }
    (lo, hi)
}

/// The `k` smallest eigenvalues in ascending order, each to absolute
/// accuracy `tol`, or a few ulps of the spectral radius if that is larger.
pub fn smallest_eigenvalues(diag: &[f64], off: &[f64], k: usize, tol: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Eigen(format!(
            "tridiagonal shape mismatch: {n} diagonal, {} off-diagonal entries",
            off.len()
        )));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let (lo0, hi0) = gershgorin(diag, off);
    let scale = lo0.abs().max(hi0.abs()).max(f64::MIN_POSITIVE);
    let abs_tol = tol.max(4.0 * f64::EPSILON * scale);
    (0..k.min(n))
        .map(|j| {
            let (mut lo, mut hi) = (lo0, hi0);
            while hi - lo > abs_tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(diag, off, mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

/// Solves `A x = rhs` for tridiagonal `A` with sub-diagonal `lower`,
/// diagonal `diag` and super-diagonal `upper` (no pivoting).
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut denom = diag[0];
    c[0] = if n > 1 { upper[0] / denom } else { 0.0 };
    x[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let ev = smallest_eigenvalues(&diag, &off, 5, 1e-14).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-12, "{k}: {v} vs {want}");
        }
    }

    #[test]
    fn sturm_counts_diagonal() {
        assert_eq!(sturm_count(&[3.0, 1.0, 2.0], &[0.0, 0.0], 2.5), 2);
    }

    #[test]
    fn thomas_matches_product() {
        let lower = [1.0, -0.5, 0.25];
        let diag = [4.0, 5.0, 3.0, 6.0];
        let upper = [0.5, 1.0, -1.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += lower[i - 1] * x[i - 1];
            }
            if i < 3 {
                b[i] += upper[i] * x[i + 1];
            }
        }
        let got = thomas_solve(&lower, &diag, &upper, &b);
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(smallest_eigenvalues(&[1.0, 2.0], &[], 1, 1e-10).is_err());
        assert!(smallest_eigenvalues(&[f64::NAN], &[], 1, 1e-10).is_err());
    }
}
