use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform grid of nodes on `[0, r_max]`, both endpoints included.
///
/// A uniform grid keeps the finite-volume generator second order and lets
/// node-based trapezoid sums inherit the even symmetry of radial densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub nodes: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, nodes: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(invalid(format!("grid r_max must be positive, got {r_max}")));
        }
        if nodes < 3 {
            return Err(invalid(format!("grid needs at least 3 nodes, got {nodes}")));
        }
        Ok(Self { r_max, nodes })
    }

    pub fn step(&self) -> f64 {
        self.r_max / (self.nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.r_max
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.node(i)).collect()
    }

    /// Midpoints of the `nodes - 1` intervals.
    pub fn midpoints(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.nodes - 1).map(|i| (i as f64 + 0.5) * h).collect()
    }

    /// Same span, `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            r_max: self.r_max,
            nodes: (self.nodes - 1) * factor + 1,
        }
    }

    pub fn with_r_max(&self, r_max: f64) -> Self {
        Self {
            r_max,
            nodes: self.nodes,
        }
    }
}
