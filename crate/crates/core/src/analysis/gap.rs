use serde::Serialize;

use super::operator::discretize_generator;
use crate::defaults;
use crate::equilibrium::{build_measure, EquilibriumMeasure};
use crate::error::Result;
use crate::grid::RadialGrid;
use crate::model::CoefficientSet;
use crate::tridiag::smallest_eigenvalues;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralGap {
    pub lambda1: f64,
    /// First nonzero eigenvalue of `-L_0`.
    pub radial_gap: f64,
    /// Ground eigenvalue of `-L_1`.
    pub sector1_gap: f64,
    pub nodes: usize,
    /// `lambda1` recomputed with twice the nodes.
    pub refined_lambda1: f64,
    pub refined_nodes: usize,
    pub relative_change: f64,
    pub converged: bool,
}

/// The `k` smallest eigenvalues of `-L_l`.
pub fn sector_eigenvalues(
    coeffs: &CoefficientSet,
    measure: &EquilibriumMeasure,
    sector: usize,
    k: usize,
) -> Result<Vec<f64>> {
    let op = discretize_generator(coeffs, measure, sector)?;
    let (diag, off) = op.negated_symmetric();
    smallest_eigenvalues(&diag, &off, k, defaults::EIG_TOL)
}

fn gaps(coeffs: &CoefficientSet, measure: &EquilibriumMeasure) -> Result<(f64, f64)> {
    let (s0, s1) = rayon::join(
        || sector_eigenvalues(coeffs, measure, 0, 2),
        || sector_eigenvalues(coeffs, measure, 1, 1),
    );
    Ok((s0?[1], s1?[0]))
}

/// Gap on the measure's grid, without the refinement check.
pub fn spectral_gap_at(coeffs: &CoefficientSet, measure: &EquilibriumMeasure) -> Result<(f64, f64)> {
    gaps(coeffs, measure)
}

/// `lambda1 = min(radial gap, sector-1 ground state)`, checked against the
/// same computation on a grid with twice the nodes.
pub fn spectral_gap(coeffs: &CoefficientSet, measure: &EquilibriumMeasure) -> Result<SpectralGap> {
    let fine_grid = RadialGrid::new(measure.grid.r_max, 2 * measure.grid.nodes)?;
    let (coarse, fine) = rayon::join(
        || gaps(coeffs, measure),
        || build_measure(coeffs, &fine_grid).and_then(|m| gaps(coeffs, &m).map(|g| (g, m.grid.nodes))),
    );
    let (radial_gap, sector1_gap) = coarse?;
    let ((f0, f1), refined_nodes) = fine?;
    let lambda1 = radial_gap.min(sector1_gap);
    let refined_lambda1 = f0.min(f1);
    let relative_change = ((refined_lambda1 - lambda1) / refined_lambda1).abs();
    let converged = relative_change <= defaults::GAP_REFINE_TOL;
    if !converged {
        log::warn!("spectral gap not converged under refinement: {lambda1} vs {refined_lambda1}");
    }
    Ok(SpectralGap {
        lambda1,
        radial_gap,
        sector1_gap,
        nodes: measure.grid.nodes,
        refined_lambda1,
        refined_nodes,
        relative_change,
        converged,
    })
}
