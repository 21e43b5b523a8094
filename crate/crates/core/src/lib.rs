//! Relativistic diffusions with radial coefficients: model definitions,
//! phase-space utilities, Euler–Maruyama simulation, the equilibrium measure
//! and quantitative convergence estimates.

pub mod analysis;
pub mod defaults;
pub mod equilibrium;
pub mod error;
pub mod expr;
pub mod grid;
pub mod interp;
pub mod model;
pub mod phase_space;
pub mod quadrature;
pub mod rng;
pub mod sde;
pub mod stats;
pub mod tridiag;

pub use analysis::{
    decay_report, discretize_generator, lyapunov_certificate, poincare_constant, spectral_gap, DecayReport,
    LyapunovCertificate, LyapunovSearch, PoincareBound, RadialOperator, SpectralGap,
};
pub use equilibrium::{
    build_measure, potentials, sample_equilibrium, stationarity_residual, EquilibriumMeasure, Potentials,
    StationarityResidual, TestFn,
};
pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use model::{
    builtin_model, check_hypotheses, classical_ou, Builtin, CoefficientSet, HypothesisFailure, HypothesisReport,
    ModelFile, RadialFn,
};
pub use phase_space::{lift, MomentumState, PhasePoint};
pub use sde::{
    em_step, simulate_ensemble, simulate_ensemble_on_streams, simulate_trajectory, Ensemble, EnsembleSnapshot, NoiseIncrement,
    SimConfig, Trajectory,
};
