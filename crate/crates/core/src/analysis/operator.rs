use serde::Serialize;

use crate::defaults;
use crate::equilibrium::EquilibriumMeasure;
use crate::error::{invalid, Error, Result};
use crate::grid::RadialGrid;
use crate::model::CoefficientSet;

/// `L_l` discretized by finite volumes: unknowns live at the cell centers
/// (midpoints of the measure's grid), fluxes at the grid nodes.
///
/// With `q = pdf * sigma²` at the nodes and `w` the `nu`-mass of each cell,
/// `(L u)_i = (F_{i+1/2} - F_{i-1/2}) / (2 beta w_i)` where
/// `F = q (u_{i+1} - u_i) / h`. The outer face carries no flux. At `r = 0` the
/// face is reflecting for `l = 0` and absorbing for `l >= 1` (which matters
/// only for `d = 1`, where `q(0) > 0`).
#[derive(Debug, Clone, Serialize)]
pub struct RadialOperator {
    pub grid: RadialGrid,
    pub sector: usize,
    pub beta: f64,
    pub centers: Vec<f64>,
    /// `nu`-mass of each cell.
    pub weights: Vec<f64>,
    /// Rows of `L`: `lower[i]` couples `i+1` to `i`, `upper[i]` couples `i` to `i+1`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    /// Off-diagonal of `W^{1/2} L W^{-1/2}`, computed directly so it is
    /// exactly symmetric.
    pub sym_off: Vec<f64>,
    /// Cells dropped because their weight underflowed.
    pub truncated: usize,
}

pub fn discretize_generator(
    coeffs: &CoefficientSet,
    measure: &EquilibriumMeasure,
    sector: usize,
) -> Result<RadialOperator> {
    let d = coeffs.d;
    if d == 1 && sector > 1 {
        return Err(invalid("in d = 1 only the sectors 0 (even) and 1 (odd) exist"));
    }
    if coeffs.d != measure.d() || coeffs.beta != measure.coeffs.beta {
        return Err(invalid("measure was built for a different coefficient set"));
    }
    let h = measure.grid.step();
    let beta = coeffs.beta;
    let wmax = measure.cell_mass.iter().copied().fold(0.0, f64::max);
    let cutoff = defaults::WEIGHT_UNDERFLOW * wmax;
    let n = measure.cell_mass.iter().rposition(|&w| w >= cutoff).map_or(0, |k| k + 1);
    if n < 2 {
        return Err(Error::Eigen("fewer than two cells carry weight".into()));
    }
    let truncated = measure.cell_mass.len() - n;
    if truncated > 0 {
        log::warn!(
            "generator truncated at r = {:.4} ({truncated} cells with underflowing weight)",
            measure.r[n]
        );
    }
    let weights = measure.cell_mass[..n].to_vec();
    if let Some(i) = weights.iter().position(|&w| w <= 0.0) {
        return Err(Error::NonFinite {
            what: "cell weight",
            r: measure.mid[i],
        });
    }
    let centers = measure.mid[..n].to_vec();
    let q: Vec<f64> = (0..=n)
        .map(|j| {
            let s = coeffs.sigma.eval(measure.r[j]);
            measure.radial_pdf[j] * s * s
        })
        .collect();

    let mut lower = vec![0.0; n - 1];
    let mut upper = vec![0.0; n - 1];
    let mut sym_off = vec![0.0; n - 1];
    let mut diag = vec![0.0; n];
    for i in 0..n - 1 {
        let f = q[i + 1] / h;
        upper[i] = f / (2.0 * beta * weights[i]);
        lower[i] = f / (2.0 * beta * weights[i + 1]);
        diag[i] -= upper[i];
        diag[i + 1] -= lower[i];
        sym_off[i] = f / (2.0 * beta * weights[i].sqrt() * weights[i + 1].sqrt());
    }
    if sector >= 1 {
        diag[0] -= q[0] / centers[0] / (2.0 * beta * weights[0]);
        let ang = (sector * (sector + d - 2)) as f64;
        for i in 0..n {
            let s = coeffs.sigma.eval(centers[i]);
            diag[i] -= s * s * ang / (2.0 * beta * centers[i] * centers[i]);
        }
    }
    let op = RadialOperator {
        grid: measure.grid,
        sector,
        beta,
        centers,
        weights,
        lower,
        diag,
        upper,
        sym_off,
        truncated,
    };
    if op.diag.iter().chain(&op.sym_off).any(|v| !v.is_finite()) {
        return Err(Error::Eigen("generator matrix has non-finite entries".into()));
    }
    Ok(op)
}

impl RadialOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `L u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.lower[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * u[i + 1];
                }
                v
            })
            .collect()
    }

    /// `<u, v>` in `L²(nu)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).sum()
    }

    /// `-L` as a symmetric tridiagonal matrix `(diag, off)`.
    pub fn negated_symmetric(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.diag.iter().map(|v| -v).collect(),
            self.sym_off.iter().map(|v| -v).collect(),
        )
    }

    /// The same operator multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| k * x).collect();
        Self {
            lower: s(&self.lower),
            diag: s(&self.diag),
            upper: s(&self.upper),
            sym_off: s(&self.sym_off),
            ..self.clone()
        }
    }
}
