use serde::Serialize;

use super::operator::RadialOperator;
use super::poincare::PoincareBound;
use crate::defaults;
use crate::equilibrium::EquilibriumMeasure;
use crate::error::{invalid, Error, Result};
use crate::stats::linear_fit;
use crate::tridiag::thomas_solve;

/// Relative densities `h_t = d(law of p_t)/dnu` at the checkpoints, on the
/// cell centers of the operator.
#[derive(Debug, Clone, Serialize)]
pub struct DensityPath {
    pub times: Vec<f64>,
    pub densities: Vec<Vec<f64>>,
    /// `max_t |∫ h_t dnu - 1|`.
    pub mass_drift: f64,
}

/// Evolves `h0` by `dh/dt = L h` with the implicit trapezoid rule,
/// recording every `checkpoint_every` steps (and the first and last).
///
/// The first `RANNACHER_STEPS` steps are each replaced by two backward Euler
/// half steps, which share the trapezoid rule's matrix. The trapezoid rule
/// alone barely damps the stiff modes near `r = 0`, whose amplification factor
/// is close to -1.
pub fn evolve_density(
    op0: &RadialOperator,
    h0: &[f64],
    t_end: f64,
    dt: f64,
    checkpoint_every: usize,
) -> Result<DensityPath> {
    let n = op0.len();
    if op0.sector != 0 {
        return Err(invalid("densities evolve in the radial sector l = 0"));
    }
    if h0.len() != n {
        return Err(invalid(format!("initial density has {} entries, operator has {n}", h0.len())));
    }
    if !(dt > 0.0 && t_end > 0.0 && dt <= t_end) || checkpoint_every == 0 {
        return Err(invalid(format!("need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}")));
    }
    if h0.iter().any(|&h| !(h >= 0.0)) {
        return Err(invalid("initial density must be nonnegative"));
    }
    let mass = |h: &[f64]| op0.weights.iter().zip(h).map(|(w, v)| w * v).sum::<f64>();
    let m0 = mass(h0);
    if (m0 - 1.0).abs() > 1e-8 {
        return Err(invalid(format!("initial density has nu-mass {m0}, expected 1")));
    }

    let steps = (t_end / dt).round() as usize;
    let half = 0.5 * dt;
    let lower: Vec<f64> = op0.lower.iter().map(|v| -half * v).collect();
    let upper: Vec<f64> = op0.upper.iter().map(|v| -half * v).collect();
    let diag: Vec<f64> = op0.diag.iter().map(|v| 1.0 - half * v).collect();

    let mut h = h0.to_vec();
    let mut path = DensityPath {
        times: vec![0.0],
        densities: vec![h.clone()],
        mass_drift: 0.0,
    };
    for k in 1..=steps {
        if k <= defaults::RANNACHER_STEPS {
            h = thomas_solve(&lower, &diag, &upper, &h);
            h = thomas_solve(&lower, &diag, &upper, &h);
        } else {
            let lh = op0.apply(&h);
            let rhs: Vec<f64> = h.iter().zip(&lh).map(|(a, b)| a + half * b).collect();
            h = thomas_solve(&lower, &diag, &upper, &rhs);
        }
        let min = h.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min >= -defaults::DENSITY_NEG_TOL) {
            return Err(Error::TimeStepTooLarge {
                dt,
                min,
                suggested: dt / 4.0,
            });
        }
        if k % checkpoint_every == 0 || k == steps {
            path.mass_drift = path.mass_drift.max((mass(&h) - 1.0).abs());
            path.times.push(k as f64 * dt);
            path.densities.push(h.clone());
        }
    }
    Ok(path)
}

/// Relative density of a centered Gaussian law with per-coordinate
/// `variance`, averaged over each cell of `op`.
pub fn gaussian_bump(measure: &EquilibriumMeasure, op: &RadialOperator, variance: f64) -> Result<Vec<f64>> {
    if !(variance > 0.0) {
        return Err(invalid(format!("bump variance must be positive, got {variance}")));
    }
    let d = measure.d() as i32;
    let pdf = |r: f64| r.powi(d - 1) * (-r * r / (2.0 * variance)).exp();
    let masses: Vec<f64> = (0..op.len())
        .map(|i| {
            let (a, b) = (measure.r[i], measure.r[i + 1]);
            (b - a) / 6.0 * (pdf(a) + 4.0 * pdf(measure.mid[i]) + pdf(b))
        })
        .collect();
    let total: f64 = masses.iter().sum();
    Ok(masses.iter().zip(&op.weights).map(|(m, w)| m / total / w).collect())
}

/// Default bump: variance `BUMP_VARIANCE_FRACTION * E_nu|p|² / d`.
pub fn default_bump_variance(measure: &EquilibriumMeasure) -> f64 {
    defaults::BUMP_VARIANCE_FRACTION * measure.radial_moment(2) / measure.d() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub l2_distances: Vec<f64>,
    pub tv_distances: Vec<f64>,
    pub fitted_rate_l2: Option<f64>,
    pub fitted_rate_tv: Option<f64>,
    pub fit_window_l2: Option<(f64, f64)>,
    /// `1 / (2 c2)`.
    pub certified_rate: f64,
    pub c2: f64,
    /// Failed checks; empty when every bound holds.
    pub violations: Vec<String>,
}

/// `-slope` of `ln(dist)` on the checkpoints where
/// `dist / dist_0` lies in `FIT_WINDOW`, with the time window used.
pub fn fit_decay_rate(times: &[f64], dist: &[f64]) -> Option<(f64, (f64, f64))> {
    let (lo, hi) = defaults::FIT_WINDOW;
    let d0 = *dist.first()?;
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(dist)
        .filter(|(_, &v)| v >= lo * d0 && v <= hi * d0 && v > 0.0)
        .map(|(&t, &v)| (t, v.ln()))
        .unzip();
    if t.len() < defaults::MIN_FIT_POINTS {
        return None;
    }
    let (slope, _) = linear_fit(&t, &y);
    Some((-slope, (t[0], *t.last().unwrap())))
}

/// Distances `‖h_t - 1‖` in `L²(nu)` and `L¹(nu)`, fitted rates, and the
/// checks implied by `c2`: `‖h_t - 1‖₂ <= exp(-t/(2 c2)) ‖h_0 - 1‖₂`, both
/// fitted rates at least `1/(2 c2)`, `L¹ <= L²` and monotone `L²`.
pub fn decay_report(path: &DensityPath, op: &RadialOperator, bound: &PoincareBound) -> Result<DecayReport> {
    if path.times.len() < defaults::MIN_FIT_POINTS {
        return Err(invalid(format!(
            "need at least {} checkpoints, got {}",
            defaults::MIN_FIT_POINTS,
            path.times.len()
        )));
    }
    let t_last = *path.times.last().unwrap();
    if t_last * bound.lambda1 < 1.0 {
        return Err(invalid(format!(
            "checkpoints end at t = {t_last}, before one relaxation time 1/lambda1 = {}",
            1.0 / bound.lambda1
        )));
    }
    let mut l2 = Vec::with_capacity(path.times.len());
    let mut tv = Vec::with_capacity(path.times.len());
    for h in &path.densities {
        let (mut a, mut b) = (0.0, 0.0);
        for (w, v) in op.weights.iter().zip(h) {
            a += w * (v - 1.0).powi(2);
            b += w * (v - 1.0).abs();
        }
        l2.push(a.sqrt());
        tv.push(b);
    }
    let certified_rate = 1.0 / (2.0 * bound.c2);
    let fit_l2 = fit_decay_rate(&path.times, &l2);
    let fit_tv = fit_decay_rate(&path.times, &tv);

    let mut violations = Vec::new();
    for (k, &t) in path.times.iter().enumerate() {
        let cap = (-t * certified_rate).exp() * l2[0];
        if l2[k] > cap * (1.0 + 1e-12) {
            violations.push(format!("L2 distance {} above exp(-t/(2 c2)) bound {cap} at t = {t}", l2[k]));
        }
        if tv[k] > l2[k] * (1.0 + 1e-12) {
            violations.push(format!("TV distance {} above L2 distance {} at t = {t}", tv[k], l2[k]));
        }
        if k > 0 && l2[k] > l2[k - 1] * (1.0 + 1e-12) + defaults::MONOTONE_FLOOR * l2[0] {
            violations.push(format!("L2 distance increased at t = {t}"));
        }
    }
    let floor = certified_rate * (1.0 - defaults::POINCARE_TOL);
    for (label, fit) in [("L2", fit_l2), ("TV", fit_tv)] {
        match fit {
            Some((rate, _)) if rate < floor => {
                violations.push(format!("fitted {label} rate {rate} below 1/(2 c2) = {certified_rate}"))
            }
            None => log::warn!("no clean exponential window for the {label} distance; rate not asserted"),
            _ => {}
        }
    }
    Ok(DecayReport {
        times: path.times.clone(),
        l2_distances: l2,
        tv_distances: tv,
        fitted_rate_l2: fit_l2.map(|f| f.0),
        fitted_rate_tv: fit_tv.map(|f| f.0),
        fit_window_l2: fit_l2.map(|f| f.1),
        certified_rate,
        c2: bound.c2,
        violations,
    })
}
