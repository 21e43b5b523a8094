use serde::Serialize;

use crate::defaults;
use crate::error::{invalid, Error, Result};
use crate::grid::RadialGrid;
use crate::model::CoefficientSet;

const GAMMA_PAD: f64 = 1e-12;

/// Box searched for the exponent `c` and ball radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovSearch {
    pub c_range: (f64, f64),
    pub r_range: (f64, f64),
    pub steps: usize,
}

impl LyapunovSearch {
    /// `c` up to a fraction of `beta eps / 2`, `R` from the tail start to the
    /// grid edge.
    pub fn for_model(coeffs: &CoefficientSet, tail_start: f64, grid: &RadialGrid) -> Self {
        Self {
            c_range: (
                0.0,
                defaults::LYAPUNOV_C_FRACTION * 0.5 * coeffs.beta * coeffs.epsilon,
            ),
            r_range: (tail_start, grid.r_max),
            steps: defaults::LYAPUNOV_SEARCH_STEPS,
        }
    }
}

/// Drift certificate `L W <= -alpha W + gamma 1_{B(0,R)}` for
/// `W(p) = exp(c sqrt(delta² + |p|²))`.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovCertificate {
    pub c: f64,
    #[serde(rename = "R")]
    pub r_ball: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// `max_r L W + alpha W - gamma 1_{r <= R}` over the grid.
    pub worst_residual: f64,
    /// `min_r (gamma 1_{r <= R} - L W) / (alpha W)`; at least 1 when the
    /// drift inequality holds.
    pub drift_ratio_min: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub grid: RadialGrid,
}

/// `L W / W` at radius `r` for the surrogate with exponent `c`:
/// `sigma²/(2 beta) c [c r²/s² + delta²/s³ + (d-1)/s - r V'(r)/s]`,
/// `s = sqrt(delta² + r²)`.
pub fn lyapunov_generator_ratio(coeffs: &CoefficientSet, c: f64, delta: f64, r: f64) -> f64 {
    let s = delta.hypot(r);
    let bracket = c * r * r / (s * s) + delta * delta / (s * s * s) + (coeffs.d - 1) as f64 / s
        - coeffs.r_times_potential_slope(r) / s;
    coeffs.diffusivity(r) * c * bracket
}

fn evaluate(coeffs: &CoefficientSet, c: f64, r_ball: f64, grid: &RadialGrid) -> Result<LyapunovCertificate> {
    let delta = defaults::LYAPUNOV_DELTA;
    let alpha = c * coeffs.epsilon.powi(3) / 4.0;
    let pts = grid.points();
    let mut lw = Vec::with_capacity(pts.len());
    let mut w = Vec::with_capacity(pts.len());
    for &r in &pts {
        let wr = (c * delta.hypot(r)).exp();
        let v = lyapunov_generator_ratio(coeffs, c, delta, r) * wr;
        if !v.is_finite() || !wr.is_finite() {
            return Err(Error::NonFinite {
                what: "generator of the Lyapunov function",
                r,
            });
        }
        lw.push(v);
        w.push(wr);
    }
    let inside = |r: f64| r <= r_ball;
    // padded so the divided form of the inequality survives rounding at
    // the node where the maximum is attained
    let gamma = pts
        .iter()
        .zip(lw.iter().zip(&w))
        .filter(|(&r, _)| inside(r))
        .map(|(_, (l, wr))| l + alpha * wr)
        .fold(0.0, f64::max)
        * (1.0 + GAMMA_PAD);
    let mut worst = f64::NEG_INFINITY;
    let mut ratio_min = f64::INFINITY;
    for (i, &r) in pts.iter().enumerate() {
        let ind = if inside(r) { gamma } else { 0.0 };
        worst = worst.max(lw[i] + alpha * w[i] - ind);
        ratio_min = ratio_min.min((ind - lw[i]) / (alpha * w[i]));
    }
    Ok(LyapunovCertificate {
        c,
        r_ball,
        alpha,
        gamma,
        worst_residual: worst,
        drift_ratio_min: ratio_min,
        epsilon: coeffs.epsilon,
        delta,
        grid: *grid,
    })
}

/// Largest `c` in the search box that admits some `R >= r_range.0` with
/// `(d-1)/R + c <= beta eps / 2` (taking the smallest such `R`), verified on
/// `grid`. Smaller `c` are tried if the grid check fails.
pub fn lyapunov_certificate(
    coeffs: &CoefficientSet,
    search: &LyapunovSearch,
    grid: &RadialGrid,
) -> Result<LyapunovCertificate> {
    coeffs.validate()?;
    let (c_lo, c_hi) = search.c_range;
    let (r_lo, r_hi) = search.r_range;
    if !(c_lo >= 0.0 && c_lo < c_hi && r_lo > 0.0 && r_lo <= r_hi && search.steps >= 1) {
        return Err(invalid(format!("empty Lyapunov search box {search:?}")));
    }
    let bound = 0.5 * coeffs.beta * coeffs.epsilon;
    let dm1 = (coeffs.d - 1) as f64;
    let radii: Vec<f64> = (0..=search.steps)
        .map(|j| r_lo + (r_hi - r_lo) * j as f64 / search.steps as f64)
        .collect();
    let mut last_violation = None;
    for k in (1..=search.steps).rev() {
        let c = c_lo + (c_hi - c_lo) * k as f64 / search.steps as f64;
        let Some(&r_ball) = radii.iter().find(|&&r| dm1 / r + c <= bound) else {
            continue;
        };
        let cert = evaluate(coeffs, c, r_ball, grid)?;
        if cert.worst_residual <= 0.0 {
            return Ok(cert);
        }
        last_violation.get_or_insert(cert.worst_residual);
    }
    match last_violation {
        Some(v) => Err(Error::LyapunovViolated(v)),
        None => Err(Error::NoLyapunovCandidate { bound }),
    }
}
