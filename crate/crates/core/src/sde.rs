//! Euler–Maruyama integration of the position/momentum system
//!
//! ```text
//! dx^i = f(r) p^i dt
//! dp^i = -b(r) p^i dt + sigma(r) (beta (1 + eta(r)^2))^{-1/2} (dW^i + eta(r) theta^i dw)
//! ```
//!
//! in the Itô sense, with coefficients frozen at the pre-step state. The
//! energy `p0` is recomputed from `p` after every step, never integrated.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults::THETA_DEGENERATE_R;
use crate::error::{invalid, Result};
use crate::model::CoefficientSet;
use crate::phase_space::{energy, norm, PhasePoint};
use crate::rng::{substream, StreamRng};

/// Brownian increments over one step: `dw_vec ~ N(0, dt I_d)`, `dw ~ N(0, dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    pub dw_vec: Vec<f64>,
    pub dw: f64,
}

impl NoiseIncrement {
    pub fn zero(d: usize) -> Self {
        Self {
            dw_vec: vec![0.0; d],
            dw: 0.0,
        }
    }

    /// Draws `d` components for `W`, then one for `w` unless `skip_scalar`.
    pub fn draw_into<R: Rng>(rng: &mut R, sqrt_dt: f64, skip_scalar: bool, out: &mut NoiseIncrement) {
        for v in out.dw_vec.iter_mut() {
            *v = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        }
        out.dw = if skip_scalar {
            0.0
        } else {
            sqrt_dt * rng.sample::<f64, _>(StandardNormal)
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub checkpoint_times: Vec<f64>,
    #[serde(default)]
    pub record_positions: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be positive"));
        }
        if self.checkpoint_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("checkpoint times must be sorted"));
        }
        for &t in &self.checkpoint_times {
            if !(0.0..=self.t_end * (1.0 + 1e-12)).contains(&t) {
                return Err(invalid(format!("checkpoint {t} outside [0, {}]", self.t_end)));
            }
            let k = t / self.dt;
            if (k - k.round()).abs() > 1e-6 * k.max(1.0) {
                return Err(invalid(format!("checkpoint {t} is not a multiple of dt = {}", self.dt)));
            }
        }
        Ok(())
    }

    /// Step indices at which each checkpoint is recorded.
    fn checkpoint_steps(&self) -> Vec<u64> {
        self.checkpoint_times
            .iter()
            .map(|t| (t / self.dt).round() as u64)
            .collect()
    }
}

/// A step produced a non-finite state; carries the state before the step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRejected {
    pub state: PhasePoint,
}

impl std::fmt::Display for StepRejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Euler–Maruyama step blew up after t = {}", self.state.t)
    }
}

impl std::error::Error for StepRejected {}

/// One Euler–Maruyama step.
pub fn em_step(
    state: &PhasePoint,
    coeffs: &CoefficientSet,
    dt: f64,
    noise: &NoiseIncrement,
) -> std::result::Result<PhasePoint, StepRejected> {
    let mut next = state.clone();
    next.p0 = energy(norm(&next.p));
    let mut scratch = vec![0.0; state.p.len()];
    if advance(&mut next, coeffs, dt, noise, &mut scratch, true) {
        Ok(next)
    } else {
        Err(StepRejected { state: state.clone() })
    }
}

/// In-place step; returns `false` (leaving `state` untouched) on blow-up.
/// `scratch` must have length `d`. Positions do not feed back into momenta,
/// so `track_x = false` leaves them unchanged.
fn advance(
    state: &mut PhasePoint,
    coeffs: &CoefficientSet,
    dt: f64,
    noise: &NoiseIncrement,
    scratch: &mut [f64],
    track_x: bool,
) -> bool {
    let r = norm(&state.p);
    let b = coeffs.b.eval(r);
    let sigma = coeffs.sigma.eval(r);
    let eta = coeffs.eta.eval(r);
    let inv_sqrt_beta = 1.0 / coeffs.beta.sqrt();
    let amp = if eta == 0.0 {
        sigma * inv_sqrt_beta
    } else {
        sigma * inv_sqrt_beta / (1.0 + eta * eta).sqrt()
    };
    let radial_kick = eta * noise.dw;

    let mut new_r2 = 0.0;
    for (i, np) in scratch.iter_mut().enumerate() {
        let pi = state.p[i];
        let theta = if r < THETA_DEGENERATE_R {
            if i == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            pi / r
        };
        *np = pi - b * pi * dt + amp * (noise.dw_vec[i] + theta * radial_kick);
        new_r2 += *np * *np;
    }
    if !new_r2.is_finite() {
        return false;
    }
    if track_x {
        let fr = coeffs.f.eval(r);
        if !state.x.iter().zip(&state.p).all(|(x, p)| (x + fr * p * dt).is_finite()) {
            return false;
        }
        for (x, p) in state.x.iter_mut().zip(&state.p) {
            *x += fr * p * dt;
        }
    }
    state.p.copy_from_slice(scratch);
    state.t += dt;
    // p0 is kept equal to energy(r) for the pre-step state
    state.s += dt / state.p0;
    state.p0 = (1.0 + new_r2).sqrt();
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUp {
    pub path: usize,
    /// Time of the last finite state.
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// States at the checkpoint times reached before any blow-up.
    pub points: Vec<PhasePoint>,
    pub blow_up: Option<BlowUp>,
}

/// Simulates one path on stream 0 of `cfg.seed`.
pub fn simulate_trajectory(init: &PhasePoint, coeffs: &CoefficientSet, cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_init(init, coeffs)?;
    Ok(run_path(init, coeffs, cfg, 0, true))
}

fn check_init(init: &PhasePoint, coeffs: &CoefficientSet) -> Result<()> {
    if init.p.len() != coeffs.d || init.x.len() != coeffs.d {
        return Err(invalid(format!(
            "initial state has dimension {} but the model has d = {}",
            init.p.len(),
            coeffs.d
        )));
    }
    if init.p.iter().chain(&init.x).any(|v| !v.is_finite()) {
        return Err(invalid("initial state is not finite"));
    }
    Ok(())
}

fn run_path(init: &PhasePoint, coeffs: &CoefficientSet, cfg: &SimConfig, stream: u64, track_x: bool) -> Trajectory {
    let mut rng: StreamRng = substream(cfg.seed, stream);
    let mut state = init.clone();
    state.p0 = energy(norm(&state.p));
    let t0 = state.t;
    let steps = cfg.checkpoint_steps();
    let total = (cfg.t_end / cfg.dt).round() as u64;
    let last = steps.last().copied().unwrap_or(total).min(total);
    let sqrt_dt = cfg.dt.sqrt();
    let skip_scalar = coeffs.eta.is_zero();
    let mut noise = NoiseIncrement::zero(coeffs.d);
    let mut scratch = vec![0.0; coeffs.d];
    let mut points = Vec::with_capacity(steps.len());
    let mut next_cp = 0;

    let record = |n: u64, state: &PhasePoint, points: &mut Vec<PhasePoint>, next_cp: &mut usize| {
        while *next_cp < steps.len() && steps[*next_cp] == n {
            let mut p = state.clone();
            p.t = t0 + cfg.checkpoint_times[*next_cp];
            points.push(p);
            *next_cp += 1;
        }
    };
    record(0, &state, &mut points, &mut next_cp);
    for n in 1..=last {
        NoiseIncrement::draw_into(&mut rng, sqrt_dt, skip_scalar, &mut noise);
        if !advance(&mut state, coeffs, cfg.dt, &noise, &mut scratch, track_x) {
            return Trajectory {
                points,
                blow_up: Some(BlowUp {
                    path: 0,
                    time: state.t,
                }),
            };
        }
        state.t = t0 + n as f64 * cfg.dt;
        record(n, &state, &mut points, &mut next_cp);
    }
    Trajectory { points, blow_up: None }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSnapshot {
    pub time: f64,
    /// `n_paths` rows of `d` momenta; NaN rows for paths that blew up earlier.
    pub momenta: Vec<Vec<f64>>,
    pub positions: Option<Vec<Vec<f64>>>,
    /// Energy components, one per path.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub snapshots: Vec<EnsembleSnapshot>,
    pub failed: Vec<BlowUp>,
}

/// Simulates `cfg.n_paths` independent paths. Path `k` starts from
/// `inits[k]` (or `inits[0]` when a single initial state is given) and uses
/// stream `k` of `cfg.seed`.
pub fn simulate_ensemble(inits: &[PhasePoint], coeffs: &CoefficientSet, cfg: &SimConfig) -> Result<Ensemble> {
    let streams: Vec<u64> = (0..cfg.n_paths as u64).collect();
    simulate_ensemble_on_streams(inits, &streams, coeffs, cfg)
}

/// As [`simulate_ensemble`], with path `k` on stream `streams[k]`.
pub fn simulate_ensemble_on_streams(
    inits: &[PhasePoint],
    streams: &[u64],
    coeffs: &CoefficientSet,
    cfg: &SimConfig,
) -> Result<Ensemble> {
    cfg.validate()?;
    if inits.is_empty() {
        return Err(invalid("ensemble needs at least one initial state"));
    }
    if inits.len() != 1 && inits.len() != cfg.n_paths {
        return Err(invalid(format!(
            "{} initial states for {} paths",
            inits.len(),
            cfg.n_paths
        )));
    }
    if streams.len() != cfg.n_paths {
        return Err(invalid(format!("{} streams for {} paths", streams.len(), cfg.n_paths)));
    }
    for init in inits {
        check_init(init, coeffs)?;
    }
    let paths: Vec<Trajectory> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|k| {
            let init = if inits.len() == 1 { &inits[0] } else { &inits[k] };
            let mut t = run_path(init, coeffs, cfg, streams[k], cfg.record_positions);
            if let Some(b) = t.blow_up.as_mut() {
                b.path = k;
            }
            t
        })
        .collect();

    let d = coeffs.d;
    let nan_row = vec![f64::NAN; d];
    let snapshots = cfg
        .checkpoint_times
        .iter()
        .enumerate()
        .map(|(j, &time)| {
            let row = |k: usize, pick: &dyn Fn(&PhasePoint) -> Vec<f64>| {
                paths[k].points.get(j).map(pick).unwrap_or_else(|| nan_row.clone())
            };
            EnsembleSnapshot {
                time,
                momenta: (0..cfg.n_paths).map(|k| row(k, &|p| p.p.clone())).collect(),
                positions: cfg
                    .record_positions
                    .then(|| (0..cfg.n_paths).map(|k| row(k, &|p| p.x.clone())).collect()),
                energies: (0..cfg.n_paths)
                    .map(|k| paths[k].points.get(j).map_or(f64::NAN, |p| p.p0))
                    .collect(),
            }
        })
        .collect();
    let failed = paths.iter().filter_map(|t| t.blow_up.clone()).collect();
    Ok(Ensemble { snapshots, failed })
}
