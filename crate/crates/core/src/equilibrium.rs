//! The invariant measure of the momentum process,
//!
//! ```text
//! nu(dp) = exp(-U(p)) / (Z sigma(|p|)^2) dp,   U(p) = V(|p|),
//! ```
//!
//! tabulated on a radial grid, with sampling and a numerical check of the
//! stationarity identity `∫ L f dnu = 0`.
//!
//! Potentials use the integral base points of their definitions:
//! `mu(r) = exp ∫_1^r dρ / (ρ (1 + eta²))`, `G(r) = ∫_0^r g`, and
//! `V(r) = (d-1) ∫_1^r eta²/(ρ(1+eta²)) dρ + beta G(r)`. The radial density is
//! evaluated as `mu^{d-1} exp(-beta G) / sigma²`, which equals
//! `r^{d-1} exp(-V) / sigma²` exactly.
//!
//! `Z` is the normalizing constant on `R^d` (it includes the area of the unit
//! sphere); the direction is uniform with respect to the probability measure
//! on the sphere.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::defaults;
use crate::error::{invalid, Error, Result};
use crate::grid::RadialGrid;
use crate::interp::MonotoneCubic;
use crate::model::CoefficientSet;
use crate::quadrature::{romberg, sphere_area, SphereRule};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Potentials {
    pub mu: f64,
    pub g_int: f64,
    pub v: f64,
    /// `U(p)` for any `p` with `|p| = r`.
    pub u: f64,
}

fn angular_integrand(coeffs: &CoefficientSet, rho: f64) -> f64 {
    if rho == 0.0 {
        if coeffs.eta.eval(0.0) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        coeffs.eta_fraction(rho) / rho
    }
}

/// `∫_a^b eta²/(ρ(1+eta²)) dρ`, `-inf`/`+inf` when it diverges at 0.
fn angular_integral(coeffs: &CoefficientSet, a: f64, b: f64) -> Result<f64> {
    if (a == 0.0 || b == 0.0) && a != b && coeffs.eta.eval(0.0) != 0.0 {
        return Ok(if a == 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
    }
    romberg(&|rho| angular_integrand(coeffs, rho), a, b, defaults::QUAD_TOL)
}

fn g_integral(coeffs: &CoefficientSet, a: f64, b: f64) -> Result<f64> {
    romberg(&|rho| coeffs.g(rho), a, b, defaults::QUAD_TOL)
}

fn assemble(coeffs: &CoefficientSet, r: f64, ang: f64, g_int: f64) -> Potentials {
    let mu = if r == 0.0 { 0.0 } else { (r.ln() - ang).exp() };
    let v = if coeffs.d > 1 {
        (coeffs.d - 1) as f64 * ang + coeffs.beta * g_int
    } else {
        coeffs.beta * g_int
    };
    Potentials { mu, g_int, v, u: v }
}

/// `mu(r)`, `G(r)`, `V(r)` and `U` at radius `r` by adaptive Romberg quadrature.
pub fn potentials(coeffs: &CoefficientSet, r: f64) -> Result<Potentials> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("radius must be finite and nonnegative, got {r}")));
    }
    let ang = angular_integral(coeffs, 1.0, r)?;
    let g_int = g_integral(coeffs, 0.0, r)?;
    Ok(assemble(coeffs, r, ang, g_int))
}

#[derive(Debug, Clone)]
pub struct EquilibriumMeasure {
    pub coeffs: CoefficientSet,
    pub grid: RadialGrid,
    pub r: Vec<f64>,
    pub mu: Vec<f64>,
    pub g_int: Vec<f64>,
    pub v: Vec<f64>,
    /// Normalizing constant of `exp(-U)/sigma²` on `R^d`.
    pub z: f64,
    pub ln_z: f64,
    /// Density of `|p|` under `nu` at the nodes.
    pub radial_pdf: Vec<f64>,
    pub radial_cdf: Vec<f64>,
    /// Interval midpoints and the density there.
    pub mid: Vec<f64>,
    pub mid_pdf: Vec<f64>,
    /// `nu`-mass of each grid interval.
    pub cell_mass: Vec<f64>,
    /// Times `r_max` was doubled to capture the tail.
    pub extensions: usize,
    cdf_interp: MonotoneCubic,
}

/// Builds the measure on `grid`, doubling `r_max` until the radial density
/// at the outer edge is below `TAIL_REL` of its maximum.
pub fn build_measure(coeffs: &CoefficientSet, grid: &RadialGrid) -> Result<EquilibriumMeasure> {
    coeffs.validate()?;
    let mut grid = *grid;
    let mut prev_tail = f64::INFINITY;
    for extensions in 0..=defaults::MAX_EXTENSIONS {
        let table = Tabulation::compute(coeffs, &grid)?;
        let tail = table.edge_log_ratio();
        if tail <= defaults::TAIL_REL.ln() {
            if extensions > 0 {
                log::warn!("equilibrium grid extended to r_max = {}", grid.r_max);
            }
            return Ok(table.into_measure(coeffs, grid, extensions));
        }
        if tail >= prev_tail {
            return Err(Error::NonIntegrableTail(format!(
                "density at r = {} is not decreasing relative to its maximum",
                grid.r_max
            )));
        }
        prev_tail = tail;
        grid = grid.with_r_max(2.0 * grid.r_max);
    }
    Err(Error::NonIntegrableTail(format!(
        "tail still above {:e} of the maximum at r = {}",
        defaults::TAIL_REL,
        grid.r_max / 2.0
    )))
}

/// Potentials at nodes and midpoints, interleaved: `s_k = k h / 2`.
struct Tabulation {
    s: Vec<f64>,
    ang: Vec<f64>,
    g_int: Vec<f64>,
    log_rho: Vec<f64>,
}

impl Tabulation {
    fn compute(coeffs: &CoefficientSet, grid: &RadialGrid) -> Result<Self> {
        let n = 2 * grid.nodes - 1;
        let half = 0.5 * grid.step();
        let s: Vec<f64> = (0..n)
            .map(|k| if k + 1 == n { grid.r_max } else { k as f64 * half })
            .collect();

        let pieces_g: Vec<f64> = (0..n - 1)
            .into_par_iter()
            .map(|k| g_integral(coeffs, s[k], s[k + 1]))
            .collect::<Result<_>>()?;
        let mut g_int = vec![0.0; n];
        for k in 1..n {
            g_int[k] = g_int[k - 1] + pieces_g[k - 1];
        }

        // angular part: accumulate from s_1 > 0, then shift to base point 1
        let pieces_a: Vec<f64> = (1..n - 1)
            .into_par_iter()
            .map(|k| angular_integral(coeffs, s[k], s[k + 1]))
            .collect::<Result<_>>()?;
        let mut acc = vec![0.0; n];
        for k in 2..n {
            acc[k] = acc[k - 1] + pieces_a[k - 2];
        }
        let j = s.partition_point(|&v| v <= 1.0).saturating_sub(1).max(1);
        let at_one = acc[j] + angular_integral(coeffs, s[j], 1.0)?;
        let mut ang: Vec<f64> = acc.iter().map(|a| a - at_one).collect();
        ang[0] = angular_integral(coeffs, s[1], 0.0)? + ang[1];

        let dm1 = (coeffs.d - 1) as f64;
        let mut log_rho = Vec::with_capacity(n);
        for k in 0..n {
            let r = s[k];
            let sigma = coeffs.sigma.eval(r);
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(Error::NonFinite { what: "sigma", r });
            }
            let log_mu = if r == 0.0 { f64::NEG_INFINITY } else { r.ln() - ang[k] };
            let lm = if coeffs.d == 1 { 0.0 } else { dm1 * log_mu };
            let lr = lm - coeffs.beta * g_int[k] - 2.0 * sigma.ln();
            if lr.is_nan() || lr == f64::INFINITY {
                return Err(Error::NonFinite {
                    what: "equilibrium density",
                    r,
                });
            }
            log_rho.push(lr);
        }
        Ok(Self {
            s,
            ang,
            g_int,
            log_rho,
        })
    }

    fn log_max(&self) -> f64 {
        self.log_rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn edge_log_ratio(&self) -> f64 {
        self.log_rho.last().unwrap() - self.log_max()
    }

    fn into_measure(self, coeffs: &CoefficientSet, grid: RadialGrid, extensions: usize) -> EquilibriumMeasure {
        let lmax = self.log_max();
        let shifted: Vec<f64> = self.log_rho.iter().map(|l| (l - lmax).exp()).collect();
        let h = grid.step();
        let nodes = grid.nodes;
        // Simpson per interval with the midpoint
        let cell: Vec<f64> = (0..nodes - 1)
            .map(|i| {
                let (a, m, b) = (shifted[2 * i], shifted[2 * i + 1], shifted[2 * i + 2]);
                let w = self.s[2 * i + 2] - self.s[2 * i];
                w / 6.0 * (a + 4.0 * m + b)
            })
            .collect();
        let total: f64 = cell.iter().sum();
        let mut cdf = Vec::with_capacity(nodes);
        cdf.push(0.0);
        let mut run = 0.0;
        for c in &cell {
            run += c;
            cdf.push(run / total);
        }
        *cdf.last_mut().unwrap() = 1.0;

        let ln_z = sphere_area(coeffs.d).ln() + lmax + total.ln();
        let pick = |v: &Vec<f64>, off: usize| -> Vec<f64> { (0..nodes - off).map(|i| v[2 * i + off]).collect() };
        let potentials: Vec<Potentials> = (0..nodes)
            .map(|i| assemble(coeffs, self.s[2 * i], self.ang[2 * i], self.g_int[2 * i]))
            .collect();
        let r = pick(&self.s, 0);
        let cdf_interp = MonotoneCubic::new(r.clone(), cdf.clone());
        let _ = h;
        EquilibriumMeasure {
            coeffs: coeffs.clone(),
            grid,
            mu: potentials.iter().map(|p| p.mu).collect(),
            g_int: potentials.iter().map(|p| p.g_int).collect(),
            v: potentials.iter().map(|p| p.v).collect(),
            z: ln_z.exp(),
            ln_z,
            radial_pdf: pick(&shifted, 0).iter().map(|x| x / total).collect(),
            radial_cdf: cdf,
            mid: pick(&self.s, 1),
            mid_pdf: pick(&shifted, 1).iter().map(|x| x / total).collect(),
            cell_mass: cell.iter().map(|c| c / total).collect(),
            r,
            extensions,
            cdf_interp,
        }
    }
}

impl EquilibriumMeasure {
    pub fn d(&self) -> usize {
        self.coeffs.d
    }

    /// `P(|p| <= r)` under `nu`, by monotone cubic interpolation.
    pub fn radial_cdf_at(&self, r: f64) -> f64 {
        self.cdf_interp.eval(r)
    }

    /// `r` with `P(|p| <= r) = u`.
    pub fn radial_quantile(&self, u: f64) -> f64 {
        self.cdf_interp.invert(u)
    }

    /// `log` of the Lebesgue density `exp(-U)/sigma²` at the nodes, up to the
    /// constant `-ln Z`.
    pub fn log_density_unnormalized(&self) -> Vec<f64> {
        self.r
            .iter()
            .zip(&self.v)
            .map(|(&r, v)| -v - 2.0 * self.coeffs.sigma.eval(r).ln())
            .collect()
    }

    /// `E_nu[|p|^k]` by Simpson's rule over the grid.
    pub fn radial_moment(&self, k: i32) -> f64 {
        let h = self.grid.step();
        (0..self.mid.len())
            .map(|i| {
                let (a, b) = (self.r[i], self.r[i + 1]);
                h / 6.0
                    * (self.radial_pdf[i] * a.powi(k)
                        + 4.0 * self.mid_pdf[i] * self.mid[i].powi(k)
                        + self.radial_pdf[i + 1] * b.powi(k))
            })
            .sum()
    }
}

const SAMPLE_BLOCK: usize = 4096;
const SAMPLE_STREAM_BASE: u64 = 1 << 63;

/// Draws `n` momenta from `nu`: radius by inverse CDF, direction uniform.
/// Blocks of `SAMPLE_BLOCK` samples use their own substream of `seed`.
pub fn sample_equilibrium(measure: &EquilibriumMeasure, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let d = measure.d();
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let out: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, SAMPLE_STREAM_BASE | b as u64);
            let len = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
            (0..len)
                .map(|_| {
                    let r = measure.radial_quantile(rng.random::<f64>());
                    let mut dir = random_direction(&mut rng, d);
                    dir.iter_mut().for_each(|v| *v *= r);
                    dir
                })
                .collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

fn random_direction<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

type RadialProfile = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type CartesianFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type CartesianGrad = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Test function for the stationarity identity. Missing derivatives are
/// replaced by central differences.
pub enum TestFn {
    /// `f(p) = phi(|p|)`, with optional `phi'` and `phi''`.
    Radial {
        value: RadialProfile,
        d1: Option<RadialProfile>,
        d2: Option<RadialProfile>,
    },
    Cartesian {
        value: CartesianFn,
        grad: Option<CartesianGrad>,
        laplacian: Option<CartesianFn>,
    },
}

impl TestFn {
    pub fn radial<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        TestFn::Radial {
            value: Box::new(f),
            d1: None,
            d2: None,
        }
    }

    pub fn cartesian<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        TestFn::Cartesian {
            value: Box::new(f),
            grad: None,
            laplacian: None,
        }
    }

    fn radial_derivs(&self, r: f64) -> (f64, f64) {
        let TestFn::Radial { value, d1, d2 } = self else {
            unreachable!()
        };
        let h = defaults::FD_STEP;
        let first = match d1 {
            Some(f) => f(r),
            None => (value(r + h) - value(r - h)) / (2.0 * h),
        };
        let h2 = defaults::FD_STEP_SECOND;
        let second = match d2 {
            Some(f) => f(r),
            None => (value(r + h2) - 2.0 * value(r) + value(r - h2)) / (h2 * h2),
        };
        (first, second)
    }

    fn cartesian_derivs(&self, p: &[f64], grad_out: &mut [f64]) -> f64 {
        let TestFn::Cartesian { value, grad, laplacian } = self else {
            unreachable!()
        };
        let mut q = p.to_vec();
        match grad {
            Some(g) => g(p, grad_out),
            None => {
                let h = defaults::FD_STEP;
                for i in 0..p.len() {
                    q[i] = p[i] + h;
                    let up = value(&q);
                    q[i] = p[i] - h;
                    let dn = value(&q);
                    q[i] = p[i];
                    grad_out[i] = (up - dn) / (2.0 * h);
                }
            }
        }
        match laplacian {
            Some(l) => l(p),
            None => {
                let h = defaults::FD_STEP_SECOND;
                let f0 = value(p);
                let mut lap = 0.0;
                for i in 0..p.len() {
                    q[i] = p[i] + h;
                    let up = value(&q);
                    q[i] = p[i] - h;
                    let dn = value(&q);
                    q[i] = p[i];
                    lap += (up - 2.0 * f0 + dn) / (h * h);
                }
                lap
            }
        }
    }
}

/// Below this the Simpson/trapezoid gap is rounding noise (odd integrands).
const STATIONARITY_ABS_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityResidual {
    /// `∫ L_{sigma²} f dnu` (Simpson over nodes and midpoints).
    pub value: f64,
    /// Difference to the plain trapezoid sum over nodes and midpoints.
    pub richardson_gap: f64,
    /// `∫ |L_{sigma²} f| dnu`.
    pub scale: f64,
}

/// `∫ L_{sigma²} f dnu` over the measure's grid: the radial form of the
/// generator for radial test functions, `sigma²/(2 beta) (Δf - ∇U·∇f)` with a
/// product rule on the sphere otherwise.
pub fn stationarity_residual(measure: &EquilibriumMeasure, testfn: &TestFn) -> Result<StationarityResidual> {
    let coeffs = &measure.coeffs;
    let d = coeffs.d;
    let sphere = match testfn {
        TestFn::Cartesian { .. } => Some(SphereRule::new(d, defaults::SPHERE_ORDER)),
        TestFn::Radial { .. } => None,
    };
    let generator_at = |r: f64| -> f64 {
        let diff = coeffs.diffusivity(r);
        match &sphere {
            None => {
                let (f1, f2) = testfn.radial_derivs(r);
                let drift = if r > 0.0 {
                    ((d - 1) as f64 - coeffs.r_times_potential_slope(r)) / r
                } else {
                    // (d-1)/r f' -> (d-1) f''(0); only reached with weight when d = 1
                    return diff * (d as f64 * f2 - coeffs.potential_slope(0.0) * f1);
                };
                diff * (f2 + drift * f1)
            }
            Some(rule) => {
                let slope = coeffs.potential_slope(r);
                let mut grad = vec![0.0; d];
                let mut p = vec![0.0; d];
                rule.average(|theta| {
                    p.iter_mut().zip(theta).for_each(|(pi, t)| *pi = r * t);
                    let lap = testfn.cartesian_derivs(&p, &mut grad);
                    let radial_deriv: f64 = grad.iter().zip(theta).map(|(g, t)| g * t).sum();
                    diff * (lap - slope * radial_deriv)
                })
            }
        }
    };

    let mut fine = Vec::with_capacity(2 * measure.r.len() - 1);
    for i in 0..measure.r.len() {
        fine.push((measure.r[i], measure.radial_pdf[i]));
        if i < measure.mid.len() {
            fine.push((measure.mid[i], measure.mid_pdf[i]));
        }
    }
    let vals: Vec<f64> = fine
        .iter()
        .map(|&(r, w)| if w == 0.0 { 0.0 } else { w * generator_at(r) })
        .collect();
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "generator of the test function",
            r: fine[k].0,
        });
    }

    let mut simpson = 0.0;
    let mut trap = 0.0;
    let mut scale = 0.0;
    for i in 0..measure.mid.len() {
        let w = measure.r[i + 1] - measure.r[i];
        let (a, m, b) = (vals[2 * i], vals[2 * i + 1], vals[2 * i + 2]);
        simpson += w / 6.0 * (a + 4.0 * m + b);
        trap += w / 4.0 * (a + 2.0 * m + b);
        scale += w / 6.0 * (a.abs() + 4.0 * m.abs() + b.abs());
    }
    let gap = (simpson - trap).abs();
    if gap > 1e-3 * scale && gap > STATIONARITY_ABS_FLOOR {
        return Err(Error::Quadrature {
            a: 0.0,
            b: measure.grid.r_max,
            achieved: gap / scale,
        });
    }
    Ok(StationarityResidual {
        value: simpson,
        richardson_gap: gap,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_model, classical_ou};
    use crate::stats::{ks_critical_value, ks_statistic};
    use approx::assert_relative_eq;

    fn grid() -> RadialGrid {
        RadialGrid::new(50.0, 4096).unwrap()
    }

    #[test]
    fn mu_is_identity_without_eta() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        for r in [0.1, 1.0, 2.5, 30.0] {
            assert_relative_eq!(potentials(&m, r).unwrap().mu, r, max_relative = 1e-12);
        }
    }

    #[test]
    fn base_points() {
        let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
        let one = potentials(&m, 1.0).unwrap();
        assert_eq!(one.mu, 1.0);
        // the angular integral vanishes at its base point, leaving beta G(1)
        assert_eq!(one.v, m.beta * one.g_int);
        assert_eq!(potentials(&m, 0.0).unwrap().g_int, 0.0);
    }

    #[test]
    fn dunkel_hanggi_mu_closed_form() {
        let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
        for r in [0.05f64, 0.7, 1.0, 4.0, 45.0] {
            let want = 2f64.sqrt() * r / (1.0 + r * r).sqrt();
            assert_relative_eq!(potentials(&m, r).unwrap().mu, want, max_relative = 1e-11);
        }
    }

    #[test]
    fn roup_g_closed_form() {
        let m = builtin_model("roup", 3, 2.0).unwrap();
        for r in [0.3f64, 3.0, 20.0] {
            let p = potentials(&m, r).unwrap();
            assert_relative_eq!(p.g_int, (1.0 + r * r).sqrt() - 1.0, max_relative = 1e-11);
            assert_relative_eq!(p.v, 2.0 * p.g_int, max_relative = 1e-15);
        }
    }

    #[test]
    fn potentials_reject_bad_radius() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        assert!(potentials(&m, -1.0).is_err());
        assert!(potentials(&m, f64::NAN).is_err());
    }

    #[test]
    fn measure_invariants() {
        for name in ["roup", "dunkel_hanggi", "classical_ou"] {
            let m = builtin_model(name, 3, 1.0).unwrap();
            let nu = build_measure(&m, &grid()).unwrap();
            assert!(nu.radial_pdf.iter().all(|&p| p >= 0.0));
            assert!(nu.radial_cdf.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(nu.radial_cdf[0], 0.0);
            assert_eq!(*nu.radial_cdf.last().unwrap(), 1.0);
            let trap = crate::quadrature::trapezoid_uniform(&nu.radial_pdf, nu.grid.step());
            assert!((trap - 1.0).abs() < 1e-8, "{name}: {trap}");
            let mass: f64 = nu.cell_mass.iter().sum();
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_bracket_and_g_growth() {
        for name in ["roup", "dunkel_hanggi"] {
            let m = builtin_model(name, 3, 1.0).unwrap();
            let nu = build_measure(&m, &grid()).unwrap();
            for (i, &r) in nu.r.iter().enumerate() {
                let mu = nu.mu[i];
                assert!(mu >= r.min(1.0) * (1.0 - 1e-12) && mu <= r.max(1.0) * (1.0 + 1e-12));
            }
            // G(r) >= eps r / 2 on the outer part of the tail window
            for (i, &r) in nu.r.iter().enumerate().filter(|(_, &r)| r >= 25.0) {
                assert!(nu.g_int[i] >= m.epsilon * r / 2.0, "{name} at r = {r}");
            }
        }
    }

    #[test]
    fn ou_radial_density_is_chi() {
        // |p| for N(0, I_3) has density sqrt(2/pi) r^2 exp(-r^2/2)
        let m = classical_ou(3, 1.0, 1.0, 2f64.sqrt()).unwrap();
        let nu = build_measure(&m, &RadialGrid::new(20.0, 2001).unwrap()).unwrap();
        let c = (2.0 / std::f64::consts::PI).sqrt();
        for (i, &r) in nu.r.iter().enumerate().step_by(50) {
            let want = c * r * r * (-0.5 * r * r).exp();
            assert!((nu.radial_pdf[i] - want).abs() < 1e-10);
        }
        // Z = (2 pi)^{3/2} / sigma^2 with sigma^2 = 2, times exp(beta G) base: G(0) = 0
        let z_want = (2.0 * std::f64::consts::PI).powf(1.5) / 2.0;
        assert_relative_eq!(nu.z, z_want, max_relative = 1e-9);
    }

    #[test]
    fn tail_extension_and_non_integrable() {
        let m = classical_ou(1, 1.0, 0.01, 2f64.sqrt()).unwrap();
        // stationary variance 100: needs r_max well beyond 50
        let nu = build_measure(&m, &RadialGrid::new(50.0, 4096).unwrap()).unwrap();
        assert!(nu.extensions >= 1);
        assert!(nu.grid.r_max > 50.0);

        let mut bad = builtin_model("roup", 3, 1.0).unwrap();
        bad.b = crate::model::RadialFn::new(|r| -1.0 / (1.0 + r));
        assert!(matches!(
            build_measure(&bad, &RadialGrid::new(10.0, 512).unwrap()),
            Err(Error::NonIntegrableTail(_))
        ));
    }

    #[test]
    fn sampler_matches_cdf_and_is_deterministic() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        let nu = build_measure(&m, &grid()).unwrap();
        let n = 100_000;
        let xs = sample_equilibrium(&nu, n, 11).unwrap();
        assert_eq!(xs, sample_equilibrium(&nu, n, 11).unwrap());
        let radii: Vec<f64> = xs.iter().map(|p| crate::phase_space::norm(p)).collect();
        let ks = ks_statistic(&radii, |r| nu.radial_cdf_at(r));
        assert!(ks < ks_critical_value(n, 0.01), "ks = {ks}");
        for k in 0..3 {
            let mean_theta: f64 =
                xs.iter().map(|p| p[k] / crate::phase_space::norm(p)).sum::<f64>() / n as f64;
            assert!(mean_theta.abs() < 3.0 / (n as f64).sqrt());
        }
        assert!(sample_equilibrium(&nu, 0, 1).is_err());
    }

    #[test]
    fn constant_testfn_has_zero_residual() {
        let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
        let nu = build_measure(&m, &grid()).unwrap();
        let res = stationarity_residual(&nu, &TestFn::radial(|_| 1.0)).unwrap();
        assert_eq!(res.value, 0.0);
        let res = stationarity_residual(&nu, &TestFn::cartesian(|_| 1.0)).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn finite_difference_residuals_are_small() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        let nu = build_measure(&m, &grid()).unwrap();
        let first = stationarity_residual(&nu, &TestFn::cartesian(|p| p[0])).unwrap();
        assert!(first.value.abs() < 1e-6, "{first:?}");
        let gauss = stationarity_residual(&nu, &TestFn::radial(|r| (-r * r).exp())).unwrap();
        assert!(gauss.value.abs() < 1e-6, "{gauss:?}");
        assert!(gauss.scale > 1e-2);
    }
}
