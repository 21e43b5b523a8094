use std::fs;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use reldiff_core::analysis::{default_bump_variance, evolve_density, gaussian_bump};
use reldiff_core::model::default_tail_window;
use reldiff_core::{
    build_measure, builtin_model, check_hypotheses, classical_ou, decay_report, defaults, discretize_generator,
    lyapunov_certificate, poincare_constant, sample_equilibrium, simulate_ensemble, simulate_trajectory,
    spectral_gap, CoefficientSet, Error, HypothesisReport, LyapunovCertificate, LyapunovSearch, ModelFile,
    PhasePoint, PoincareBound, RadialGrid, SimConfig, SpectralGap,
};

use crate::args::{Command, Common, DecayArgs, SampleArgs, SimulateArgs};
use crate::output::{header, CliError, CliResult, Outputs};

/// How a command that produced its outputs ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Validation failure reported in the outputs (exit 1).
    Rejected,
    /// A numerical check failed (exit 2).
    CheckFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Rejected => 1,
            Status::CheckFailed => 2,
        }
    }
}

pub struct Finished {
    pub status: Status,
    pub model: String,
    pub params: Value,
    pub seed: Option<u64>,
}

/// A model with its effective epsilon and the hypothesis report on the
/// effective tail window.
pub struct Resolved {
    pub coeffs: CoefficientSet,
    pub source: String,
    pub grid: RadialGrid,
    pub window: (f64, f64),
    pub report: HypothesisReport,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidInput(msg.into()))
}

pub fn resolve(c: &Common) -> CliResult<Resolved> {
    let grid = RadialGrid::new(c.rmax, c.grid)?;
    let window = (c.tail_start.unwrap_or(default_tail_window(&grid).0), grid.r_max);
    let m = &c.model;
    let (mut coeffs, eps_given, eps_prime_given, source) = match (&m.builtin, &m.model) {
        (Some(name), None) => {
            let d = m.d.unwrap_or(3);
            let beta = m.beta.unwrap_or(1.0);
            let coeffs = if m.b.is_some() || m.sigma.is_some() {
                if name != "classical_ou" {
                    return Err(invalid("--b and --sigma only apply to classical_ou"));
                }
                classical_ou(d, beta, m.b.unwrap_or(1.0), m.sigma.unwrap_or(std::f64::consts::SQRT_2))?
            } else {
                builtin_model(name, d, beta)?
            };
            (coeffs, false, false, name.clone())
        }
        (None, Some(path)) => {
            if m.b.is_some() || m.sigma.is_some() {
                return Err(invalid("--b and --sigma only apply to classical_ou"));
            }
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut file = ModelFile::from_json(&text)?;
            if let Some(d) = m.d {
                file.d = d;
            }
            if let Some(beta) = m.beta {
                file.beta = beta;
            }
            let given = (file.epsilon.is_some(), file.epsilon_prime.is_some());
            (file.to_coefficients()?, given.0, given.1, path.display().to_string())
        }
        _ => unreachable!("clap requires exactly one model source"),
    };
    let mut report = check_hypotheses(&coeffs, &grid, window, defaults::F_TAIL_TOL)?;
    if !eps_given && report.epsilon_suggestion > 0.0 && report.epsilon_suggestion != coeffs.epsilon {
        coeffs.epsilon = report.epsilon_suggestion;
        if !eps_prime_given {
            coeffs.epsilon_prime = defaults::EPSILON_PRIME_FRACTION * 0.5 * coeffs.beta * coeffs.epsilon;
        }
        report = check_hypotheses(&coeffs, &grid, window, defaults::F_TAIL_TOL)?;
    }
    Ok(Resolved {
        coeffs,
        source,
        grid,
        window,
        report,
    })
}

fn gated(c: &Common) -> CliResult<Resolved> {
    let r = resolve(c)?;
    if !r.report.passed {
        return Err(CliError::Core(Error::Hypothesis(format!(
            "{} fails {:?} on the tail window [{}, {}]; run model-check for the full report",
            r.source, r.report.failures, r.window.0, r.window.1
        ))));
    }
    Ok(r)
}

fn base_params(r: &Resolved) -> Value {
    json!({
        "d": r.coeffs.d,
        "beta": r.coeffs.beta,
        "epsilon": r.coeffs.epsilon,
        "epsilon_prime": r.coeffs.epsilon_prime,
        "grid_nodes": r.grid.nodes,
        "r_max": r.grid.r_max,
        "tail_window": [r.window.0, r.window.1],
        "f_tail_tol": defaults::F_TAIL_TOL,
    })
}

fn extend(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

/// The JSON record shared by the certification commands; fields a command
/// does not compute are null.
#[derive(Debug, Default, Serialize)]
pub struct Record {
    pub model: String,
    pub beta: f64,
    pub d: usize,
    pub epsilon: f64,
    pub c: Option<f64>,
    #[serde(rename = "R")]
    pub r_ball: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(rename = "kappa_R")]
    pub kappa_r: Option<f64>,
    pub c2: Option<f64>,
    pub lambda1: Option<f64>,
    pub consistent: Option<bool>,
}

impl Record {
    fn new(r: &Resolved) -> Self {
        Self {
            model: r.source.clone(),
            beta: r.coeffs.beta,
            d: r.coeffs.d,
            epsilon: r.coeffs.epsilon,
            ..Default::default()
        }
    }

    fn with_gap(mut self, gap: &SpectralGap) -> Self {
        self.lambda1 = Some(gap.lambda1);
        self
    }

    fn with_cert(mut self, cert: &LyapunovCertificate) -> Self {
        self.c = Some(cert.c);
        self.r_ball = Some(cert.r_ball);
        self.alpha = Some(cert.alpha);
        self.gamma = Some(cert.gamma);
        self
    }

    fn with_bound(mut self, bound: &PoincareBound) -> Self {
        self.kappa_r = Some(bound.kappa_r);
        self.c2 = Some(bound.c2);
        self.lambda1 = Some(bound.lambda1);
        self.consistent = Some(bound.consistent);
        self
    }
}

#[derive(Serialize)]
struct WithDetails<'a, T: Serialize> {
    #[serde(flatten)]
    record: &'a Record,
    details: T,
}

pub fn run(cmd: &Command, out: &mut Outputs) -> CliResult<Finished> {
    match cmd {
        Command::ModelCheck(c) => model_check(c, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Equilibrium(c) => equilibrium(c, out),
        Command::Sample(a) => sample(a, out),
        Command::Gap(c) => gap(c, out),
        Command::Lyapunov(c) => lyapunov(c, out),
        Command::Certify(c) => certify(c, out),
        Command::Decay(a) => decay(a, out),
    }
}

fn model_check(c: &Common, out: &mut Outputs) -> CliResult<Finished> {
    let r = resolve(c)?;
    out.json("hypothesis.json", &r.report)?;
    let text = serde_json::to_string_pretty(&r.report).expect("hypothesis report serializes");
    // a closed pipe on stdout is not an error of the check
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(Finished {
        status: if r.report.passed { Status::Ok } else { Status::Rejected },
        model: r.source.clone(),
        params: base_params(&r),
        seed: None,
    })
}

fn simulate(a: &SimulateArgs, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(&a.common)?;
    let d = r.coeffs.d;
    let p0 = if a.p0.is_empty() { vec![0.0; d] } else { a.p0.clone() };
    if p0.len() != d {
        return Err(invalid(format!("--p0 has {} components, the model has d = {d}", p0.len())));
    }
    if !(a.dt > 0.0 && a.t_end >= a.dt) || a.snapshots == 0 {
        return Err(invalid("need 0 < dt <= t-end and at least one snapshot interval"));
    }
    let total = (a.t_end / a.dt).round() as u64;
    let k = a.snapshots as u64;
    let times: Vec<f64> = (0..=k).map(|j| (j * total / k) as f64 * a.dt).collect();
    let cfg = SimConfig {
        dt: a.dt,
        t_end: total as f64 * a.dt,
        seed: a.seed,
        n_paths: a.paths,
        checkpoint_times: times,
        record_positions: a.positions,
    };
    let init = PhasePoint::at_rest_origin(p0.clone())?;
    let ens = simulate_ensemble(std::slice::from_ref(&init), &r.coeffs, &cfg)?;
    if !ens.failed.is_empty() {
        log::warn!("{} of {} paths blew up; their rows are NaN", ens.failed.len(), a.paths);
    }
    let blocks: &[(&str, usize)] = if a.positions { &[("p", d), ("x", d)] } else { &[("p", d)] };
    let rows = ens.snapshots.iter().flat_map(|s| {
        s.momenta.iter().enumerate().map(move |(k, p)| {
            let mut row = vec![s.time, k as f64];
            row.extend(p);
            if let Some(x) = &s.positions {
                row.extend(&x[k]);
            }
            row
        })
    });
    out.csv("snapshots.csv", &header(&["time", "path"], blocks), rows)?;

    let traj = simulate_trajectory(&init, &r.coeffs, &SimConfig { record_positions: true, ..cfg.clone() })?;
    let rows = traj.points.iter().map(|pt| {
        let mut row = vec![pt.t, pt.s];
        row.extend(&pt.x);
        row.push(pt.p0);
        row.extend(&pt.p);
        row
    });
    out.csv("trajectory.csv", &header(&["t", "s"], &[("x", d)]).into_iter().chain(header(&["p0"], &[("p", d)])).collect::<Vec<_>>(), rows)?;

    out.json(
        "simulate.json",
        &json!({
            "model": r.source,
            "d": d,
            "beta": r.coeffs.beta,
            "epsilon": r.coeffs.epsilon,
            "p0": p0,
            "config": cfg,
            "failed_paths": ens.failed,
            "trajectory_blow_up": traj.blow_up,
        }),
    )?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: extend(
            base_params(&r),
            json!({
                "dt": cfg.dt,
                "t_end": cfg.t_end,
                "paths": a.paths,
                "snapshots": a.snapshots,
                "p0": p0,
                "positions": a.positions,
            }),
        ),
        seed: Some(a.seed),
    })
}

fn equilibrium(c: &Common, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(c)?;
    let nu = build_measure(&r.coeffs, &r.grid)?;
    let rows = (0..nu.r.len()).map(|i| {
        vec![
            nu.r[i],
            nu.mu[i],
            nu.g_int[i],
            nu.v[i],
            nu.radial_pdf[i],
            nu.radial_cdf[i],
        ]
    });
    out.csv("equilibrium.csv", &header(&["r", "mu", "G", "V", "pdf", "cdf"], &[]), rows)?;
    out.json(
        "equilibrium.json",
        &json!({
            "model": r.source,
            "d": r.coeffs.d,
            "beta": r.coeffs.beta,
            "Z": nu.z,
            "ln_Z": nu.ln_z,
            "grid": nu.grid,
            "extensions": nu.extensions,
            "mean_radius": nu.radial_moment(1),
            "mean_square_radius": nu.radial_moment(2),
        }),
    )?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: base_params(&r),
        seed: None,
    })
}

fn sample(a: &SampleArgs, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(&a.common)?;
    let nu = build_measure(&r.coeffs, &r.grid)?;
    let xs = sample_equilibrium(&nu, a.paths, a.seed)?;
    out.csv("samples.csv", &header(&[], &[("p", r.coeffs.d)]), xs)?;
    out.json(
        "sample.json",
        &json!({
            "model": r.source,
            "d": r.coeffs.d,
            "beta": r.coeffs.beta,
            "seed": a.seed,
            "samples": a.paths,
        }),
    )?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: extend(base_params(&r), json!({ "samples": a.paths })),
        seed: Some(a.seed),
    })
}

fn gap(c: &Common, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(c)?;
    let nu = build_measure(&r.coeffs, &r.grid)?;
    let g = spectral_gap(&r.coeffs, &nu)?;
    let rec = Record::new(&r).with_gap(&g);
    out.json("gap.json", &WithDetails { record: &rec, details: &g })?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: base_params(&r),
        seed: None,
    })
}

fn certificate(r: &Resolved) -> CliResult<LyapunovCertificate> {
    let search = LyapunovSearch::for_model(&r.coeffs, r.window.0, &r.grid);
    Ok(lyapunov_certificate(&r.coeffs, &search, &r.grid)?)
}

fn lyapunov_params(r: &Resolved) -> Value {
    let s = LyapunovSearch::for_model(&r.coeffs, r.window.0, &r.grid);
    extend(
        base_params(r),
        json!({
            "lyapunov_search": s,
            "lyapunov_delta": defaults::LYAPUNOV_DELTA,
        }),
    )
}

fn lyapunov(c: &Common, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(c)?;
    let cert = certificate(&r)?;
    let rec = Record::new(&r).with_cert(&cert);
    out.json("lyapunov.json", &WithDetails { record: &rec, details: &cert })?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: lyapunov_params(&r),
        seed: None,
    })
}

struct Chain {
    nu: reldiff_core::EquilibriumMeasure,
    gap: SpectralGap,
    cert: LyapunovCertificate,
    bound: PoincareBound,
}

fn chain(r: &Resolved) -> CliResult<Chain> {
    let nu = build_measure(&r.coeffs, &r.grid)?;
    let gap = spectral_gap(&r.coeffs, &nu)?;
    let cert = certificate(r)?;
    let bound = poincare_constant(&cert, &r.coeffs, &nu, gap.lambda1)?;
    Ok(Chain { nu, gap, cert, bound })
}

fn certify(c: &Common, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(c)?;
    let ch = chain(&r)?;
    let rec = Record::new(&r).with_cert(&ch.cert).with_bound(&ch.bound);
    out.json(
        "certify.json",
        &WithDetails {
            record: &rec,
            details: json!({ "gap": ch.gap, "lyapunov": ch.cert, "poincare": ch.bound }),
        },
    )?;
    Ok(Finished {
        status: Status::Ok,
        model: r.source.clone(),
        params: lyapunov_params(&r),
        seed: None,
    })
}

fn decay(a: &DecayArgs, out: &mut Outputs) -> CliResult<Finished> {
    let r = gated(&a.common)?;
    let ch = chain(&r)?;
    let op = discretize_generator(&r.coeffs, &ch.nu, 0)?;
    let variance = match a.bump_width {
        Some(w) if w > 0.0 => w * w,
        Some(w) => return Err(invalid(format!("--bump-width must be positive, got {w}"))),
        None => default_bump_variance(&ch.nu),
    };
    let h0 = gaussian_bump(&ch.nu, &op, variance)?;
    let path = evolve_density(&op, &h0, a.t_end, a.dt, a.checkpoint_every)?;
    let rep = decay_report(&path, &op, &ch.bound)?;
    let rows = (0..rep.times.len()).map(|k| vec![rep.times[k], rep.l2_distances[k], rep.tv_distances[k]]);
    out.csv("decay.csv", &header(&["t", "l2", "tv"], &[]), rows)?;
    let rec = Record::new(&r).with_cert(&ch.cert).with_bound(&ch.bound);
    out.json(
        "decay.json",
        &WithDetails {
            record: &rec,
            details: json!({
                "fitted_rate_l2": rep.fitted_rate_l2,
                "fitted_rate_tv": rep.fitted_rate_tv,
                "fit_window_l2": rep.fit_window_l2,
                "certified_rate": rep.certified_rate,
                "radial_gap": ch.gap.radial_gap,
                "mass_drift": path.mass_drift,
                "bump_variance": variance,
                "violations": rep.violations,
            }),
        },
    )?;
    for v in &rep.violations {
        log::error!("{v}");
    }
    Ok(Finished {
        status: if rep.violations.is_empty() { Status::Ok } else { Status::CheckFailed },
        model: r.source.clone(),
        params: extend(
            lyapunov_params(&r),
            json!({
                "dt": a.dt,
                "t_end": a.t_end,
                "checkpoint_every": a.checkpoint_every,
                "bump_variance": variance,
            }),
        ),
        seed: None,
    })
}
