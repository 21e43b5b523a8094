use std::f64::consts::PI;

use serde::Serialize;

use super::lyapunov::LyapunovCertificate;
use crate::defaults;
use crate::equilibrium::{potentials, EquilibriumMeasure};
use crate::error::{invalid, Error, Result};
use crate::model::CoefficientSet;

#[derive(Debug, Clone, Serialize)]
pub struct PoincareBound {
    #[serde(rename = "kappa_R")]
    pub kappa_r: f64,
    /// Oscillation of `log(dnu/dp)` over the ball.
    pub oscillation: f64,
    pub c2: f64,
    pub lambda1: f64,
    pub consistent: bool,
}

/// `c2 = (1/alpha) (1 + 2 beta gamma kappa_R / eps²)`.
pub fn c2_formula(alpha: f64, gamma: f64, kappa_r: f64, beta: f64, epsilon: f64) -> f64 {
    (1.0 / alpha) * (1.0 + 2.0 * beta * gamma * kappa_r / (epsilon * epsilon))
}

/// Poincaré constant of `nu` restricted to `B(0, R)`: the convex-domain
/// bound `diam²/pi²` for the uniform measure, times `exp(osc)` for the
/// bounded perturbation of the density. Returns `(kappa_R, osc)`.
pub fn local_poincare_constant(
    coeffs: &CoefficientSet,
    measure: &EquilibriumMeasure,
    r_ball: f64,
) -> Result<(f64, f64)> {
    let log_density = |r: f64, v: f64| -v - 2.0 * coeffs.sigma.eval(r).ln();
    let edge = potentials(coeffs, r_ball)?;
    let mut lo = log_density(r_ball, edge.v);
    let mut hi = lo;
    for (&r, &v) in measure.r.iter().zip(&measure.v) {
        if r > r_ball {
            break;
        }
        let l = log_density(r, v);
        if !l.is_finite() {
            return Err(Error::NonFinite {
                what: "log equilibrium density",
                r,
            });
        }
        lo = lo.min(l);
        hi = hi.max(l);
    }
    let osc = hi - lo;
    Ok(((2.0 * r_ball).powi(2) / (PI * PI) * osc.exp(), osc))
}

/// Assembles `c2` from the certificate and checks `1/c2 <= lambda1`.
pub fn poincare_constant(
    cert: &LyapunovCertificate,
    coeffs: &CoefficientSet,
    measure: &EquilibriumMeasure,
    lambda1: f64,
) -> Result<PoincareBound> {
    if cert.worst_residual > 0.0 {
        return Err(Error::LyapunovViolated(cert.worst_residual));
    }
    if !(lambda1 > 0.0) {
        return Err(invalid(format!("spectral gap must be positive, got {lambda1}")));
    }
    let (kappa_r, oscillation) = local_poincare_constant(coeffs, measure, cert.r_ball)?;
    let c2 = if cert.gamma == 0.0 {
        1.0 / cert.alpha
    } else {
        c2_formula(cert.alpha, cert.gamma, kappa_r, coeffs.beta, cert.epsilon)
    };
    let consistent = 1.0 / c2 <= lambda1 * (1.0 + defaults::POINCARE_TOL);
    if !consistent {
        return Err(Error::InconsistentPoincare {
            inv_c2: 1.0 / c2,
            lambda1,
        });
    }
    Ok(PoincareBound {
        kappa_r,
        oscillation,
        c2,
        lambda1,
        consistent,
    })
}
