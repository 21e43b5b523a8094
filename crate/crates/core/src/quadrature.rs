//! Quadrature rules: adaptive Romberg for radial integrals, Gauss–Legendre,
//! and product rules on the unit sphere.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_LEVELS: usize = 12;
const MIN_LEVELS: usize = 3;
const MAX_DEPTH: usize = 40;

/// Adaptive Romberg integration (composite trapezoid + Richardson
/// extrapolation). Intervals that fail to converge within `MAX_LEVELS`
/// halvings are bisected.
pub fn romberg<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // a rough whole-interval estimate sets an absolute floor, shared out
    // among subintervals, so near-zero pieces do not demand relative accuracy
    let (rough, _, scale) = romberg_table(f, lo, hi, rel_tol, 0.0);
    let abs_tol = rel_tol * rough.abs().max(1e-15 * scale);
    romberg_rec(f, lo, hi, rel_tol, abs_tol, 0).map(|v| sign * v)
}

fn romberg_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, abs_tol: f64, depth: usize) -> Result<f64> {
    let (value, err, scale) = romberg_table(f, a, b, tol, abs_tol);
    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            achieved: f64::INFINITY,
        });
    }
    if converged(value, err, scale, tol, abs_tol) {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature {
            a,
            b,
            achieved: err / value.abs().max(f64::MIN_POSITIVE),
        });
    }
    let m = 0.5 * (a + b);
    Ok(romberg_rec(f, a, m, tol, 0.5 * abs_tol, depth + 1)? + romberg_rec(f, m, b, tol, 0.5 * abs_tol, depth + 1)?)
}

fn converged(value: f64, err: f64, scale: f64, tol: f64, abs_tol: f64) -> bool {
    err <= tol * value.abs() || err <= abs_tol || err <= 1e-15 * scale
}

/// Returns (best estimate, last correction, |f|-scale of the interval).
fn romberg_table<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, abs_tol: f64) -> (f64, f64, f64) {
    let mut prev = [0.0f64; MAX_LEVELS + 1];
    let mut cur = [0.0f64; MAX_LEVELS + 1];
    let fa = f(a);
    let fb = f(b);
    let mut fmax = fa.abs().max(fb.abs());
    let mut h = b - a;
    prev[0] = 0.5 * h * (fa + fb);
    let mut n = 1usize;
    let mut err = f64::INFINITY;
    for k in 1..=MAX_LEVELS {
        h *= 0.5;
        let mut sum = 0.0;
        for i in 0..n {
            let v = f(a + (2 * i + 1) as f64 * h);
            fmax = fmax.max(v.abs());
            sum += v;
        }
        n *= 2;
        cur[0] = 0.5 * prev[0] + h * sum;
        let mut pow4 = 1.0;
        for j in 1..=k {
            pow4 *= 4.0;
            cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (pow4 - 1.0);
        }
        err = (cur[k] - prev[k - 1]).abs();
        let scale = fmax * (b - a);
        if k >= MIN_LEVELS && converged(cur[k], err, scale, tol, abs_tol) {
            return (cur[k], err, scale);
        }
        std::mem::swap(&mut prev, &mut cur);
        if !prev[k].is_finite() {
            return (prev[k], f64::INFINITY, fmax * (b - a));
        }
    }
    (prev[MAX_LEVELS], err, fmax * (b - a))
}

/// Composite trapezoid over tabulated values on a uniform grid.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Surface area of the unit sphere S^{d-1} in R^d.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d - 2) as f64 * sphere_area(d - 2),
    }
}

/// Product quadrature on S^{d-1} with weights summing to one (uniform
/// probability measure).
///
/// Hyperspherical angles: the azimuth uses the periodic trapezoid rule, every
/// polar angle Gauss–Legendre with the `sin^k` Jacobian folded into the weight.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, order: usize) -> Self {
        assert!(dim >= 1, "sphere dimension must be at least 1");
        let (points, mut weights) = match dim {
            1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
            _ => Self::build(dim, order.max(2)),
        };
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self {
            dim,
            points,
            weights,
        }
    }

    fn build(dim: usize, order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        if dim == 2 {
            let m = 2 * order;
            let pts = (0..m)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / m as f64;
                    vec![phi.cos(), phi.sin()]
                })
                .collect();
            return (pts, vec![1.0; m]);
        }
        let (inner_pts, inner_w) = Self::build(dim - 1, order);
        let (gx, gw) = gauss_legendre(order);
        let mut pts = Vec::with_capacity(order * inner_pts.len());
        let mut wts = Vec::with_capacity(order * inner_pts.len());
        for (x, w) in gx.iter().zip(&gw) {
            let angle = 0.5 * PI * (x + 1.0);
            let (s, c) = angle.sin_cos();
            let jac = w * s.powi(dim as i32 - 2);
            for (p, pw) in inner_pts.iter().zip(&inner_w) {
                let mut q = Vec::with_capacity(dim);
                q.push(c);
                q.extend(p.iter().map(|v| s * v));
                pts.push(q);
                wts.push(jac * pw);
            }
        }
        (pts, wts)
    }

    /// Mean of `f` over the sphere.
    pub fn average<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn romberg_polynomial_and_exponential() {
        let v = romberg(&|x: f64| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert_relative_eq!(v, 9.0, max_relative = 1e-12);
        let v = romberg(&|x: f64| (-x).exp(), 0.0, 20.0, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 - (-20.0f64).exp(), max_relative = 1e-11);
    }

    #[test]
    fn romberg_reversed_limits_and_zero_integrand() {
        let v = romberg(&|x: f64| x, 2.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(v, -2.0, max_relative = 1e-12);
        assert_eq!(romberg(&|_x: f64| 0.0, 0.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn romberg_handles_kink_by_bisection() {
        let v = romberg(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 0.5 * (0.09 + 0.49), max_relative = 1e-9);
    }

    #[test]
    fn romberg_reports_non_finite() {
        let r = romberg(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn gauss_legendre_exact_for_high_degree() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(s, 2.0 / 15.0, max_relative = 1e-13);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn sphere_rule_moments() {
        for d in 1..=4 {
            let rule = SphereRule::new(d, 12);
            for p in &rule.points {
                let n: f64 = p.iter().map(|v| v * v).sum();
                assert_relative_eq!(n, 1.0, epsilon = 1e-13);
            }
            for k in 0..d {
                assert!(rule.average(|p| p[k]).abs() < 1e-13);
                // E[theta_k^2] = 1/d
                assert_relative_eq!(rule.average(|p| p[k] * p[k]), 1.0 / d as f64, epsilon = 1e-12);
            }
        }
    }
}
