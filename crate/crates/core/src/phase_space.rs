//! Minkowski kinematics with unit mass: lifting spatial momenta to the
//! positive unit tangent bundle and spherical coordinates of momenta.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Energy component `p0 = sqrt(1 + |p|^2)`.
#[inline]
pub fn energy(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// A spatial momentum with cached magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub p: Vec<f64>,
    pub r: f64,
}

impl MomentumState {
    pub fn new(p: Vec<f64>) -> Self {
        let r = norm(&p);
        Self { p, r }
    }

    /// Direction `p / r`, or the first basis vector at the origin.
    pub fn theta(&self) -> Vec<f64> {
        to_spherical(&self.p).theta
    }
}

/// A point of the phase space together with its accumulated proper time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub p0: f64,
    pub p: Vec<f64>,
    pub s: f64,
}

impl PhasePoint {
    /// Particle at the spatial origin at `t = s = 0` with momentum `p`.
    pub fn at_rest_origin(p: Vec<f64>) -> Result<Self> {
        let lifted = lift(&p)?;
        Ok(Self {
            t: 0.0,
            x: vec![0.0; p.len()],
            p0: lifted.p0,
            p,
            s: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// `p0^2 - |p|^2 - 1`.
    pub fn mass_shell_defect(&self) -> f64 {
        let r2: f64 = self.p.iter().map(|v| v * v).sum();
        (self.p0 - r2.sqrt()) * (self.p0 + r2.sqrt()) - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lifted {
    pub p0: f64,
    pub velocity: Vec<f64>,
}

/// `p0 = sqrt(1 + |p|^2)` and `v = p / p0`.
pub fn lift(p: &[f64]) -> Result<Lifted> {
    if p.iter().any(|v| !v.is_finite()) {
        return Err(invalid("momentum has non-finite components"));
    }
    let p0 = energy(norm(p));
    Ok(Lifted {
        p0,
        velocity: p.iter().map(|v| v / p0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spherical {
    pub r: f64,
    pub theta: Vec<f64>,
    /// Set when `r = 0` and `theta` is the conventional `e_1`.
    pub degenerate: bool,
}

pub fn to_spherical(p: &[f64]) -> Spherical {
    let r = norm(p);
    if r > 0.0 {
        Spherical {
            r,
            theta: p.iter().map(|v| v / r).collect(),
            degenerate: false,
        }
    } else {
        let mut theta = vec![0.0; p.len()];
        if let Some(t) = theta.first_mut() {
            *t = 1.0;
        }
        Spherical {
            r,
            theta,
            degenerate: true,
        }
    }
}

pub fn from_spherical(sph: &Spherical) -> Vec<f64> {
    sph.theta.iter().map(|t| sph.r * t).collect()
}
