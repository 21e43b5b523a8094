//! Shared fixtures for the benchmarks.

use reldiff_core::{build_measure, builtin_model, CoefficientSet, EquilibriumMeasure, RadialGrid};

pub fn fixture(name: &str, d: usize, nodes: usize) -> (CoefficientSet, EquilibriumMeasure) {
    let m = builtin_model(name, d, 1.0).expect("builtin model");
    let grid = RadialGrid::new(50.0, nodes).expect("grid");
    let nu = build_measure(&m, &grid).expect("equilibrium measure");
    (m, nu)
}
