//! Quantitative convergence to equilibrium: the discretized generator, its
//! spectral gap, the Lyapunov certificate and resulting Poincaré constant,
//! and measured decay of densities under the Fokker–Planck flow.
//!
//! The carré du champ is taken as `Γ(f, f) = sigma²/(2 beta) |∇f|²`, so that
//! `<-L f, f>_nu = ∫ Γ(f, f) dnu`.
//!
//! The full generator commutes with rotations, so it splits into sectors of
//! spherical-harmonic degree `l`, each acting on radial profiles as
//! `L_l = L_r - sigma²/(2 beta r²) l(l+d-2)`. The angular penalty increases
//! with `l` pointwise, so every sector `l >= 2` lies above `l = 1` and the
//! gap is the smaller of the first nonzero eigenvalue for `l = 0` and the
//! ground eigenvalue for `l = 1`. For `d = 1` the two sectors are the even
//! and odd functions.

mod decay;
mod gap;
mod lyapunov;
mod operator;
mod poincare;

pub use decay::{decay_report, default_bump_variance, evolve_density, fit_decay_rate, gaussian_bump, DecayReport, DensityPath};
pub use gap::{sector_eigenvalues, spectral_gap, spectral_gap_at, SpectralGap};
pub use lyapunov::{lyapunov_certificate, lyapunov_generator_ratio, LyapunovCertificate, LyapunovSearch};
pub use operator::{discretize_generator, RadialOperator};
pub use poincare::{c2_formula, local_poincare_constant, poincare_constant, PoincareBound};
