//! Coefficient sets of the relativistic diffusion class, the built-in example
//! models, and the numerical check of the growth hypotheses on `sigma`, `b`
//! and `f`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{invalid, Error, Result};
use crate::expr::Expr;
use crate::grid::RadialGrid;

/// A scalar function of the momentum magnitude `r >= 0`.
#[derive(Clone)]
pub enum RadialFn {
    Const(f64),
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RadialFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RadialFn::Func(Arc::new(f))
    }

    pub fn from_expr(e: Expr) -> Self {
        match e.as_constant() {
            Some(v) => RadialFn::Const(v),
            None => RadialFn::new(move |r| e.eval(r)),
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialFn::Const(v) => *v,
            RadialFn::Func(f) => f(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadialFn::Const(v) if *v == 0.0)
    }
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFn::Const(v) => write!(f, "Const({v})"),
            RadialFn::Func(_) => write!(f, "Func(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    ClassicalOu,
    Roup,
    DunkelHanggi,
}

impl Builtin {
    pub const NAMES: [&'static str; 3] = ["classical_ou", "roup", "dunkel_hanggi"];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::ClassicalOu => "classical_ou",
            Builtin::Roup => "roup",
            Builtin::DunkelHanggi => "dunkel_hanggi",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical_ou" => Ok(Builtin::ClassicalOu),
            "roup" => Ok(Builtin::Roup),
            "dunkel_hanggi" => Ok(Builtin::DunkelHanggi),
            _ => Err(Error::UnknownModel {
                name: s.to_string(),
                valid: Builtin::NAMES.to_vec(),
            }),
        }
    }
}

/// The coefficient functions `f, b, sigma, eta` and parameters of one model.
///
/// Immutable once built; cloning shares the underlying functions.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub name: String,
    pub builtin: Option<Builtin>,
    pub f: RadialFn,
    pub b: RadialFn,
    pub sigma: RadialFn,
    pub eta: RadialFn,
    pub d: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
}

impl CoefficientSet {
    /// Checks the scalar invariants. Function-valued hypotheses are the job
    /// of [`check_hypotheses`].
    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(invalid("dimension d must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.epsilon_prime > 0.0) {
            return Err(invalid(format!(
                "epsilon_prime must be positive, got {}",
                self.epsilon_prime
            )));
        }
        if self.epsilon_prime >= 0.5 * self.beta * self.epsilon {
            return Err(invalid(format!(
                "epsilon_prime = {} must be < beta*epsilon/2 = {}",
                self.epsilon_prime,
                0.5 * self.beta * self.epsilon
            )));
        }
        Ok(())
    }

    /// `g(r) = 2 r b(r) / sigma(r)^2`.
    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        let s = self.sigma.eval(r);
        2.0 * r * self.b.eval(r) / (s * s)
    }

    /// `eta^2 / (1 + eta^2)`.
    #[inline]
    pub fn eta_fraction(&self, r: f64) -> f64 {
        let e = self.eta.eval(r);
        let e2 = e * e;
        e2 / (1.0 + e2)
    }

    /// `r * V'(r) = (d-1) eta^2/(1+eta^2) + beta r g(r)`, finite at `r = 0`.
    #[inline]
    pub fn r_times_potential_slope(&self, r: f64) -> f64 {
        let angular = if self.d > 1 {
            (self.d - 1) as f64 * self.eta_fraction(r)
        } else {
            0.0
        };
        angular + self.beta * r * self.g(r)
    }

    /// `V'(r)`; for `r = 0` the angular part is dropped when `eta(0) = 0`.
    pub fn potential_slope(&self, r: f64) -> f64 {
        if r > 0.0 {
            self.r_times_potential_slope(r) / r
        } else {
            // g(r)/r -> 2 b(0)/sigma(0)^2 has no r factor: V'(0) = beta g(0) = 0
            let e = self.eta.eval(0.0);
            if self.d > 1 && e != 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
    }

    /// Diffusion prefactor `sigma(r)^2 / (2 beta)` of the generator.
    #[inline]
    pub fn diffusivity(&self, r: f64) -> f64 {
        let s = self.sigma.eval(r);
        s * s / (2.0 * self.beta)
    }
}

/// Example models: constant-coefficient Ornstein–Uhlenbeck, the relativistic
/// Ornstein–Uhlenbeck process, and the Dunkel–Hänggi diffusion.
///
/// `epsilon` is set to the suggestion of [`check_hypotheses`] on the default
/// grid and `epsilon_prime` just below its admissible bound.
pub fn builtin_model(name: &str, d: usize, beta: f64) -> Result<CoefficientSet> {
    let which: Builtin = name.parse()?;
    match which {
        Builtin::ClassicalOu => classical_ou(d, beta, 1.0, std::f64::consts::SQRT_2),
        Builtin::Roup => finish(raw_builtin(which, d, beta)?),
        Builtin::DunkelHanggi => finish(raw_builtin(which, d, beta)?),
    }
}

/// Constant coefficients `f = 1`, `b`, `sigma`, `eta = 0`.
pub fn classical_ou(d: usize, beta: f64, b: f64, sigma: f64) -> Result<CoefficientSet> {
    check_params(d, beta)?;
    if !(b > 0.0 && sigma > 0.0) {
        return Err(invalid("classical_ou needs b > 0 and sigma > 0"));
    }
    finish(CoefficientSet {
        name: "classical_ou".into(),
        builtin: Some(Builtin::ClassicalOu),
        f: RadialFn::Const(1.0),
        b: RadialFn::Const(b),
        sigma: RadialFn::Const(sigma),
        eta: RadialFn::Const(0.0),
        d,
        beta,
        epsilon: 1.0,
        epsilon_prime: 0.25,
    })
}

fn check_params(d: usize, beta: f64) -> Result<()> {
    if d < 1 {
        return Err(invalid("dimension d must be at least 1"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

fn raw_builtin(which: Builtin, d: usize, beta: f64) -> Result<CoefficientSet> {
    check_params(d, beta)?;
    let lorentz = |r: f64| 1.0 / (1.0 + r * r).sqrt();
    let set = match which {
        Builtin::ClassicalOu => unreachable!("handled by classical_ou"),
        Builtin::Roup => CoefficientSet {
            name: "roup".into(),
            builtin: Some(which),
            f: RadialFn::new(lorentz),
            b: RadialFn::new(lorentz),
            sigma: RadialFn::Const(std::f64::consts::SQRT_2),
            eta: RadialFn::Const(0.0),
            d,
            beta,
            epsilon: 1.0,
            epsilon_prime: 0.25,
        },
        Builtin::DunkelHanggi => {
            let k = d as f64 / beta;
            CoefficientSet {
                name: "dunkel_hanggi".into(),
                builtin: Some(which),
                f: RadialFn::new(lorentz),
                b: RadialFn::new(move |r| 1.0 - k / (1.0 + r * r).sqrt()),
                sigma: RadialFn::new(|r| (2.0 * (1.0 + r * r).sqrt()).sqrt()),
                eta: RadialFn::new(|r| r),
                d,
                beta,
                epsilon: 1.0,
                epsilon_prime: 0.25,
            }
        }
    };
    Ok(set)
}

/// Fills in `epsilon` and `epsilon_prime` from the default hypothesis check.
fn finish(mut set: CoefficientSet) -> Result<CoefficientSet> {
    let grid = RadialGrid::new(defaults::R_MAX, defaults::GRID_NODES)?;
    let window = default_tail_window(&grid);
    let report = check_hypotheses(&set, &grid, window, defaults::F_TAIL_TOL)?;
    let eps = report.epsilon_suggestion;
    if !(eps > 0.0) {
        return Err(Error::Hypothesis(format!(
            "{}: no positive epsilon on the default tail window [{}, {}] (sigma_min = {}, g_tail_min = {})",
            set.name, window.0, window.1, report.sigma_min, report.g_tail_min
        )));
    }
    set.epsilon = eps;
    set.epsilon_prime = defaults::EPSILON_PRIME_FRACTION * 0.5 * set.beta * eps;
    Ok(set)
}

pub fn default_tail_window(grid: &RadialGrid) -> (f64, f64) {
    (grid.r_max / 10.0, grid.r_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisFailure {
    /// `sigma(r) < epsilon` somewhere on the grid.
    SigmaBelowEpsilon,
    /// `g(r) < epsilon` somewhere on the tail window.
    GTailBelowEpsilon,
    /// `exp(-epsilon' r) f(r)` is not nonincreasing or not small on the tail.
    FTailNotVanishing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub sigma_min: f64,
    pub g_tail_min: f64,
    pub tail_start_r0: f64,
    pub tail_end: f64,
    pub f_tail_final: f64,
    pub f_tail_ok: bool,
    pub passed: bool,
    pub failures: Vec<HypothesisFailure>,
    /// Largest epsilon with `sigma >= epsilon` on the grid and `g >= epsilon` on the tail.
    pub epsilon_suggestion: f64,
    pub grid_used: RadialGrid,
}

/// Evaluates the growth hypotheses on a finite grid.
///
/// `sigma >= epsilon` is checked at every node, `g >= epsilon` on the nodes of
/// `tail_window`, and `exp(-epsilon' r) f(r) -> 0` is replaced by "nonincreasing
/// on the tail window and below `f_tail_tol` at its end".
pub fn check_hypotheses(
    coeffs: &CoefficientSet,
    grid: &RadialGrid,
    tail_window: (f64, f64),
    f_tail_tol: f64,
) -> Result<HypothesisReport> {
    let (t0, t1) = tail_window;
    if !(t0 >= 0.0 && t0 < t1 && t1 <= grid.r_max * (1.0 + 1e-12)) {
        return Err(invalid(format!(
            "tail window [{t0}, {t1}] must be a nonempty subinterval of [0, {}]",
            grid.r_max
        )));
    }
    if grid.r_max < 10.0 * t0 * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "grid r_max = {} must be at least 10x the tail start {t0}",
            grid.r_max
        )));
    }

    let mut sigma_min = f64::INFINITY;
    for r in grid.points() {
        let s = coeffs.sigma.eval(r);
        let (fv, bv, ev) = (coeffs.f.eval(r), coeffs.b.eval(r), coeffs.eta.eval(r));
        for (what, v) in [("sigma", s), ("f", fv), ("b", bv), ("eta", ev)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what, r });
            }
        }
        sigma_min = sigma_min.min(s);
    }

    // tail: the window endpoints plus every node strictly inside
    let mut tail: Vec<f64> = vec![t0];
    tail.extend(grid.points().into_iter().filter(|&r| r > t0 && r < t1));
    tail.push(t1);
    let mut g_tail_min = f64::INFINITY;
    let mut f_tail_ok = true;
    let mut f_prev = f64::INFINITY;
    let mut f_last = f64::NAN;
    for &r in &tail {
        let g = coeffs.g(r);
        if !g.is_finite() {
            return Err(Error::NonFinite { what: "g", r });
        }
        g_tail_min = g_tail_min.min(g);
        let damped = (-coeffs.epsilon_prime * r).exp() * coeffs.f.eval(r);
        if !damped.is_finite() {
            return Err(Error::NonFinite { what: "f", r });
        }
        if damped > f_prev * (1.0 + 1e-12) {
            f_tail_ok = false;
        }
        f_prev = damped;
        f_last = damped;
    }
    if !(f_last.abs() < f_tail_tol) {
        f_tail_ok = false;
    }

    let mut failures = Vec::new();
    let floor = coeffs.epsilon * (1.0 - defaults::HYPOTHESIS_REL_TOL);
    if sigma_min < floor {
        failures.push(HypothesisFailure::SigmaBelowEpsilon);
    }
    if g_tail_min < floor {
        failures.push(HypothesisFailure::GTailBelowEpsilon);
    }
    if !f_tail_ok {
        failures.push(HypothesisFailure::FTailNotVanishing);
    }
    Ok(HypothesisReport {
        epsilon: coeffs.epsilon,
        epsilon_prime: coeffs.epsilon_prime,
        sigma_min,
        g_tail_min,
        tail_start_r0: t0,
        tail_end: t1,
        f_tail_final: f_last,
        f_tail_ok,
        passed: failures.is_empty(),
        failures,
        epsilon_suggestion: sigma_min.min(g_tail_min),
        grid_used: *grid,
    })
}

/// JSON model definition: either `builtin` or the four coefficient
/// expressions `f`, `b`, `sigma`, `eta` in the grammar of [`crate::expr`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub d: usize,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("model file: {e}")))
    }

    /// Builds the coefficient set. Missing `epsilon`/`epsilon_prime` are
    /// filled in as for the builtins.
    pub fn to_coefficients(&self) -> Result<CoefficientSet> {
        let exprs = [&self.f, &self.b, &self.sigma, &self.eta];
        let mut set = match &self.builtin {
            Some(name) => {
                if exprs.iter().any(|e| e.is_some()) {
                    return Err(invalid("model file gives both `builtin` and coefficient expressions"));
                }
                let mut s = builtin_model(name, self.d, self.beta)?;
                s.name = self.name.clone();
                s
            }
            None => {
                check_params(self.d, self.beta)?;
                let vars = HashMap::from([("d", self.d as f64), ("beta", self.beta)]);
                let parse = |key: &str, src: &Option<String>| -> Result<RadialFn> {
                    let src = src
                        .as_deref()
                        .ok_or_else(|| invalid(format!("model file is missing `{key}`")))?;
                    Expr::parse(src, &vars).map(RadialFn::from_expr)
                };
                let raw = CoefficientSet {
                    name: self.name.clone(),
                    builtin: None,
                    f: parse("f", &self.f)?,
                    b: parse("b", &self.b)?,
                    sigma: parse("sigma", &self.sigma)?,
                    eta: parse("eta", &self.eta)?,
                    d: self.d,
                    beta: self.beta,
                    epsilon: 1.0,
                    epsilon_prime: 0.25,
                };
                if self.epsilon.is_some() {
                    raw
                } else {
                    finish(raw)?
                }
            }
        };
        if let Some(e) = self.epsilon {
            set.epsilon = e;
            if self.epsilon_prime.is_none() {
                set.epsilon_prime = defaults::EPSILON_PRIME_FRACTION * 0.5 * set.beta * e;
            }
        }
        if let Some(e) = self.epsilon_prime {
            set.epsilon_prime = e;
        }
        set.validate()?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn grid() -> RadialGrid {
        RadialGrid::new(50.0, 4096).unwrap()
    }

    #[test]
    fn roup_coefficients() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        for r in [0.0, 0.5, 3.0, 40.0] {
            let l = 1.0 / (1.0f64 + r * r).sqrt();
            assert_eq!(m.f.eval(r), l);
            assert_eq!(m.b.eval(r), l);
            assert_eq!(m.sigma.eval(r), SQRT_2);
            assert_eq!(m.eta.eval(r), 0.0);
        }
        assert!(m.eta.is_zero());
    }

    #[test]
    fn dunkel_hanggi_coefficients() {
        let m = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
        for r in [0.0, 0.5, 3.0, 40.0] {
            let s = (1.0f64 + r * r).sqrt();
            assert_relative_eq!(m.f.eval(r), 1.0 / s, max_relative = 1e-15);
            assert_relative_eq!(m.b.eval(r), 1.0 - 3.0 / s, max_relative = 1e-15);
            assert_relative_eq!(m.sigma.eval(r), (2.0 * s).sqrt(), max_relative = 1e-15);
            assert_eq!(m.eta.eval(r), r);
        }
    }

    #[test]
    fn classical_ou_coefficients() {
        let m = builtin_model("classical_ou", 3, 1.0).unwrap();
        for r in [0.0, 2.0] {
            assert_eq!(m.f.eval(r), 1.0);
            assert_eq!(m.b.eval(r), 1.0);
            assert_eq!(m.sigma.eval(r), SQRT_2);
            assert_eq!(m.eta.eval(r), 0.0);
        }
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let err = builtin_model("langevin", 3, 1.0).unwrap_err();
        match &err {
            Error::UnknownModel { valid, .. } => assert_eq!(valid.len(), 3),
            e => panic!("unexpected {e:?}"),
        }
        assert!(err.to_string().contains("dunkel_hanggi"));
    }

    #[test]
    fn roup_passes_with_tail_from_one() {
        let mut m = builtin_model("roup", 3, 1.0).unwrap();
        m.epsilon = 1.0 / SQRT_2;
        m.epsilon_prime = 0.3;
        let grid = RadialGrid::new(50.0, 4097).unwrap();
        let rep = check_hypotheses(&m, &grid, (1.0, 50.0), 1e-6).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_relative_eq!(rep.g_tail_min, 1.0 / SQRT_2, max_relative = 1e-14);
        assert_relative_eq!(rep.epsilon_suggestion, 1.0 / SQRT_2, max_relative = 1e-14);
        assert_eq!(rep.tail_start_r0, 1.0);
    }

    #[test]
    fn vanishing_sigma_fails() {
        let mut m = builtin_model("roup", 3, 1.0).unwrap();
        m.sigma = RadialFn::new(|r| r);
        m.epsilon = 0.1;
        m.epsilon_prime = 0.01;
        let rep = check_hypotheses(&m, &grid(), (5.0, 50.0), 1e-6).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.sigma_min, 0.0);
        assert!(rep.failures.contains(&HypothesisFailure::SigmaBelowEpsilon));
    }

    #[test]
    fn decaying_drift_fails_tail() {
        let mut m = builtin_model("roup", 3, 1.0).unwrap();
        m.b = RadialFn::new(|r| (-r).exp());
        m.f = RadialFn::new(|r| (-r).exp());
        m.sigma = RadialFn::Const(1.0);
        m.epsilon = 0.1;
        m.epsilon_prime = 0.01;
        let rep = check_hypotheses(&m, &grid(), (5.0, 50.0), 1e-6).unwrap();
        // 2 r e^{-r} decreases on [5, 50]: the minimum is at the window end
        let oracle = 100.0 * (-50.0f64).exp();
        assert_relative_eq!(rep.g_tail_min, oracle, max_relative = 1e-12);
        assert!(rep.g_tail_min < m.epsilon);
        assert_eq!(rep.failures, vec![HypothesisFailure::GTailBelowEpsilon]);
    }

    #[test]
    fn growing_f_fails() {
        let mut m = builtin_model("roup", 3, 1.0).unwrap();
        m.f = RadialFn::new(|r| r.exp());
        let rep = check_hypotheses(&m, &grid(), default_tail_window(&grid()), 1e-6).unwrap();
        assert!(!rep.f_tail_ok);
        assert!(rep.failures.contains(&HypothesisFailure::FTailNotVanishing));
    }

    #[test]
    fn non_finite_coefficient_is_rejected() {
        let mut m = builtin_model("roup", 3, 1.0).unwrap();
        m.b = RadialFn::new(|r| 1.0 / (r - 25.0));
        let g = RadialGrid::new(50.0, 101).unwrap();
        match check_hypotheses(&m, &g, (5.0, 50.0), 1e-6) {
            Err(Error::NonFinite { what: "b", r }) => assert_eq!(r, 25.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tail_window_precondition() {
        let m = builtin_model("roup", 3, 1.0).unwrap();
        assert!(check_hypotheses(&m, &grid(), (6.0, 50.0), 1e-6).is_err());
        assert!(check_hypotheses(&m, &grid(), (5.0, 60.0), 1e-6).is_err());
    }

    #[test]
    fn builtin_epsilons_are_admissible() {
        for name in Builtin::NAMES {
            for (d, beta) in [(1, 1.0), (3, 1.0), (1, 2.0), (3, 2.0)] {
                let m = builtin_model(name, d, beta).unwrap();
                m.validate().unwrap();
                let rep = check_hypotheses(&m, &grid(), default_tail_window(&grid()), 1e-6).unwrap();
                assert!(rep.passed, "{name} d={d} beta={beta}: {rep:?}");
            }
        }
    }

    #[test]
    fn model_file_expressions() {
        let json = r#"{
            "name": "dh-file", "d": 3, "beta": 1.0,
            "f": "(1+r^2)^(-1/2)",
            "b": "1 - d/beta*(1+r^2)^(-1/2)",
            "sigma": "sqrt(2*sqrt(1+r^2))",
            "eta": "r"
        }"#;
        let file = ModelFile::from_json(json).unwrap();
        let m = file.to_coefficients().unwrap();
        let dh = builtin_model("dunkel_hanggi", 3, 1.0).unwrap();
        for r in [0.0, 1.0, 7.5] {
            assert_relative_eq!(m.b.eval(r), dh.b.eval(r), max_relative = 1e-14);
            assert_relative_eq!(m.sigma.eval(r), dh.sigma.eval(r), max_relative = 1e-14);
        }
        assert_relative_eq!(m.epsilon, dh.epsilon, max_relative = 1e-12);
    }

    #[test]
    fn model_file_builtin_and_errors() {
        let m = ModelFile::from_json(r#"{"name":"x","d":3,"beta":1,"builtin":"roup","epsilon":0.5}"#)
            .unwrap()
            .to_coefficients()
            .unwrap();
        assert_eq!(m.epsilon, 0.5);
        assert!(m.epsilon_prime < 0.25);
        let missing = ModelFile::from_json(r#"{"name":"x","d":3,"beta":1,"f":"1","b":"1","sigma":"1"}"#)
            .unwrap()
            .to_coefficients();
        assert!(missing.is_err());
        assert!(ModelFile::from_json(r#"{"name":"x","d":3,"beta":1,"bogus":1}"#).is_err());
        let bad_eps = ModelFile::from_json(
            r#"{"name":"x","d":3,"beta":1,"builtin":"roup","epsilon":0.5,"epsilon_prime":0.3}"#,
        )
        .unwrap()
        .to_coefficients();
        assert!(bad_eps.is_err());
    }
}
