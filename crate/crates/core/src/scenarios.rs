//! Worked examples with closed-form common roots, and the 2-cycle analysis
//! of the second-order tanh equation
//!
//! ```text
//! x_{n+1} = a x_n + b(b − a) x_{n−1} + σ tanh(x_n − b x_{n−1})
//! ```
//!
//! whose first-order factor is `t_{n+1} = h(t_n)` with
//! `h(ξ) = (a − b)ξ + σ tanh ξ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Element};
use crate::equations::{CoefficientRule, EquationError, Family, LinearArgEquation, Nonlinearity, ScalarMap};

/// Scalar probes call an orbit unbounded once it leaves this radius.
pub const DEFAULT_PROBE_BOUND: f64 = 1e6;
/// Probes call an orbit converged once it is inside this radius.
pub const PROBE_CONVERGED: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("configuration error: {0} violated")]
    Constraint(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::Constraint(what.to_string()))
    }
}

/// An equation together with a known common root.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub equation: LinearArgEquation,
    pub root: Element,
}

/// `x_{n+1} = a x_n + g_n(b_0 x_n + ⋯ + b_k x_{n−k})` with root `ρ = a`.
pub fn linear_root_shape(
    algebra: Algebra,
    a: Element,
    argument: Vec<Element>,
    nonlinearity: Nonlinearity,
) -> Result<Scenario> {
    let mut linear = vec![algebra.zero(); argument.len()];
    if let Some(first) = linear.first_mut() {
        *first = a.clone();
    }
    let equation = LinearArgEquation::new(algebra, linear, argument, nonlinearity)?;
    Ok(Scenario { equation, root: a })
}

/// `x_{n+1} = Σ a_i x_{n−i} + g_n(x_n − b x_{n−1})` with root `ρ = b`.
pub fn argument_root_shape(
    algebra: Algebra,
    linear: Vec<Element>,
    b: Element,
    nonlinearity: Nonlinearity,
) -> Result<Scenario> {
    if linear.len() < 2 {
        return Err(ScenarioError::Argument("need at least a_0 and a_1".into()));
    }
    let mut argument = vec![algebra.zero(); linear.len()];
    argument[0] = algebra.identity();
    argument[1] = algebra.neg(&b)?;
    let equation = LinearArgEquation::new(algebra, linear, argument, nonlinearity)?;
    Ok(Scenario { equation, root: b })
}

/// Second-order `x_{n+1} = a_0x_n + a_1x_{n−1} + g_n(x_n − b x_{n−1})` with
/// `a_1 = b² − a_0b`, so that `b` is a common root.
pub fn second_order_shape(algebra: Algebra, a0: Element, b: Element, nonlinearity: Nonlinearity) -> Result<Scenario> {
    let a1 = algebra.sub(&algebra.mul(&b, &b)?, &algebra.mul(&a0, &b)?)?;
    argument_root_shape(algebra, vec![a0, a1], b, nonlinearity)
}

/// `x_{n+1} = a x_n + α_n tanh(x_n − aᵏ x_{n−k})` on the reals, `|α_n| ≤ σ`.
pub fn delayed_tanh(a: f64, k: usize, sigma: f64, alpha: CoefficientRule) -> Result<Scenario> {
    require(a != 0.0 && a.abs() < 1.0, "0 < |a| < 1")?;
    require(k >= 1, "k >= 1")?;
    let g = Nonlinearity::new(Family::PointwiseTanh, sigma, alpha)?;
    let mut argument = vec![Element::Real(0.0); k + 1];
    argument[0] = Element::Real(1.0);
    argument[k] = Element::Real(-a.powi(k as i32));
    linear_root_shape(Algebra::Real, Element::Real(a), argument, g)
}

/// Parameters of the integral equation on `C[0,1]`:
///
/// ```text
/// x_{n+1} = αr/(r+1) x_n + β(β − αr)/(r+1)² x_{n−1} + ∫₀ʳ φ_n(x_n − β/(r+1) x_{n−1}) dr
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub points: usize,
    pub phi: ScalarMap,
    /// Multipliers `c_n` in `φ_n = c_n φ`; defaults to `c_n = σ`.
    pub multipliers: Option<CoefficientRule>,
}

impl IntegralParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Self {
        Self {
            alpha,
            beta,
            sigma,
            points: crate::algebra::DEFAULT_GRID_POINTS,
            phi: ScalarMap::Sin,
            multipliers: None,
        }
    }

    /// Supremum of admissible `σ`: `(2 + β − α)/2`.
    pub fn sigma_sup(&self) -> f64 {
        (2.0 + self.beta - self.alpha) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let (alpha, beta) = (self.alpha, self.beta);
        require(beta > 0.0 && beta < 1.0, "0 < beta < 1")?;
        require(3.0 * beta <= alpha, "3*beta <= alpha")?;
        require(alpha < 2.0 + beta, "alpha < 2 + beta")?;
        require(self.sigma > 0.0, "sigma > 0")?;
        require(self.sigma < self.sigma_sup(), "sigma < (2 + beta - alpha)/2")?;
        Ok(())
    }
}

/// Builds the `C[0,1]` integral equation with root `ρ(r) = β/(r+1)`.
pub fn integral_c01(params: &IntegralParams) -> Result<Scenario> {
    params.validate()?;
    let alg = Algebra::grid(params.points)?;
    let (alpha, beta) = (params.alpha, params.beta);
    let a0 = alg.sample(|r| alpha * r / (r + 1.0))?;
    let a1 = alg.sample(|r| beta * (beta - alpha * r) / ((r + 1.0) * (r + 1.0)))?;
    let b = alg.sample(|r| beta / (r + 1.0))?;
    let rule = params
        .multipliers
        .clone()
        .unwrap_or(CoefficientRule::Constant { value: params.sigma });
    let g = Nonlinearity::new(Family::CumulativeIntegral { phi: params.phi }, params.sigma, rule)?;
    argument_root_shape(alg, vec![a0, a1], b, g)
}

/// Parameters `(a, b, σ)` of the second-order tanh equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TanhParams {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
}

impl TanhParams {
    pub fn new(a: f64, b: f64, sigma: f64) -> Result<Self> {
        require(sigma > 0.0, "sigma > 0")?;
        require(b > 0.0 && b < 1.0, "0 < b < 1")?;
        require(a < b, "a < b")?;
        Ok(Self { a, b, sigma })
    }

    /// `h(ξ) = (a − b)ξ + σ tanh ξ`.
    pub fn h(&self, xi: f64) -> f64 {
        h_map(self.a, self.b, self.sigma, xi)
    }

    /// `σ < 1 − a + b`: the origin is the only fixed point of `h`.
    pub fn sig_ok(&self) -> bool {
        self.sigma < 1.0 - self.a + self.b
    }

    /// `x_{n+1} = a x_n + b(b − a) x_{n−1} + σ tanh(x_n − b x_{n−1})`.
    pub fn scenario(&self) -> Result<Scenario> {
        let g = Nonlinearity::constant(Family::PointwiseTanh, self.sigma)?;
        let (a, b) = (self.a, self.b);
        argument_root_shape(
            Algebra::Real,
            vec![Element::Real(a), Element::Real(b * (b - a))],
            Element::Real(b),
            g,
        )
    }
}

pub fn h_map(a: f64, b: f64, sigma: f64, xi: f64) -> f64 {
    (a - b) * xi + sigma * xi.tanh()
}

/// Positive `τ` with `h(τ) = −τ`, i.e. `σ tanh τ = (b − a − 1)τ`, so that
/// `{−τ, τ}` is a 2-cycle of `h`.
///
/// A root exists exactly when `0 < b − a − 1 < σ`. Since `tanh ≤ 1` it lies
/// in `[tol, σ/(b − a − 1)]`; that bracket is bisected until it is narrower
/// than `tol/100` or stops shrinking in floating point. Roots below `tol`
/// are reported as absent.
pub fn find_tau(a: f64, b: f64, sigma: f64, tol: f64) -> Result<Option<f64>> {
    if !(tol > 0.0) {
        return Err(ScenarioError::Argument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let gap = b - a - 1.0;
    if !(gap > 0.0 && gap < sigma) {
        return Ok(None);
    }
    let f = |t: f64| sigma * t.tanh() - gap * t;
    let mut lo = tol;
    if f(lo) <= 0.0 {
        return Ok(None);
    }
    let mut hi = sigma / gap;
    let width = tol * 1e-2;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `b − 1 ≤ a < b`: every solution converges to zero.
    GlobalConvergence,
    /// `b − σ − 1 < a < b − 1`: a repelling 2-cycle `{−τ, τ}` bounds the
    /// basin `|t_0| < τ`.
    LocalBasin { tau: f64 },
    /// `a ≤ b − σ − 1`: the origin repels and nonzero solutions are unbounded.
    RepellingOrigin,
    /// `σ ≥ 1 − a + b`: `h` may have nonzero fixed points.
    OutsideRange,
    /// Violates `σ > 0`, `0 < b < 1` or `a < b`.
    Invalid,
}

impl Regime {
    pub fn key(&self) -> &'static str {
        match self {
            Regime::GlobalConvergence => "global_convergence",
            Regime::LocalBasin { .. } => "local_basin",
            Regime::RepellingOrigin => "repelling_origin",
            Regime::OutsideRange => "outside_range",
            Regime::Invalid => "invalid",
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self {
            Regime::LocalBasin { tau } => Some(*tau),
            _ => None,
        }
    }
}

pub const TAU_TOL: f64 = 1e-12;

/// Regime of `t_{n+1} = h(t_n)` from the sign of `b − a − 1` relative to
/// `0` and `σ`.
pub fn classify_regime(a: f64, b: f64, sigma: f64) -> Regime {
    let Ok(p) = TanhParams::new(a, b, sigma) else {
        return Regime::Invalid;
    };
    if !p.sig_ok() {
        return Regime::OutsideRange;
    }
    let gap = b - a - 1.0;
    if gap <= 0.0 {
        return Regime::GlobalConvergence;
    }
    match find_tau(a, b, sigma, TAU_TOL) {
        Ok(Some(tau)) => Regime::LocalBasin { tau },
        _ => Regime::RepellingOrigin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Converged { step: usize },
    Diverged { step: usize },
    Undecided,
}

/// Iterates `t_{n+1} = h(t_n)` from `t0` for at most `steps` steps.
pub fn basin_probe(a: f64, b: f64, sigma: f64, t0: f64, steps: usize, bound: f64) -> ProbeOutcome {
    let mut t = t0;
    for step in 0..=steps {
        if t.abs() < PROBE_CONVERGED {
            return ProbeOutcome::Converged { step };
        }
        if !(t.abs() <= bound) {
            return ProbeOutcome::Diverged { step };
        }
        if step < steps {
            t = h_map(a, b, sigma, t);
        }
    }
    ProbeOutcome::Undecided
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub a: f64,
    pub sig_ok: bool,
    pub regime: Regime,
}

impl ScanPoint {
    pub fn tau(&self) -> Option<f64> {
        self.regime.tau()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationScan {
    pub b: f64,
    pub sigma: f64,
    pub points: Vec<ScanPoint>,
}

/// Classifies `points` evenly spaced values of `a` in `[a_min, a_max]`.
pub fn bifurcation_scan(b: f64, sigma: f64, a_min: f64, a_max: f64, points: usize) -> Result<BifurcationScan> {
    if points < 2 {
        return Err(ScenarioError::Argument("a scan needs at least 2 points".into()));
    }
    if !(a_min.is_finite() && a_max.is_finite() && a_min < a_max) {
        return Err(ScenarioError::Argument(format!(
            "need a_min < a_max, got [{a_min}, {a_max}]"
        )));
    }
    let step = (a_max - a_min) / (points - 1) as f64;
    let points = (0..points)
        .map(|i| {
            let a = if i + 1 == points {
                a_max
            } else {
                a_min + i as f64 * step
            };
            ScanPoint {
                a,
                sig_ok: sigma < 1.0 - a + b,
                regime: classify_regime(a, b, sigma),
            }
        })
        .collect();
    Ok(BifurcationScan { b, sigma, points })
}

impl BifurcationScan {
    /// CSV with header `a,sig_ok,regime,tau`; `tau` is empty outside the
    /// local-basin band.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,sig_ok,regime,tau\n");
        for p in &self.points {
            let tau = p.tau().map(|t| format!("{t:?}")).unwrap_or_default();
            s.push_str(&format!("{:?},{},{},{}\n", p.a, p.sig_ok, p.regime.key(), tau));
        }
        s
    }

    /// Contiguous runs of equal regime as `(regime key, first a, last a)`.
    pub fn bands(&self) -> Vec<(&'static str, f64, f64)> {
        let mut out: Vec<(&'static str, f64, f64)> = Vec::new();
        for p in &self.points {
            match out.last_mut() {
                Some(last) if last.0 == p.regime.key() => last.2 = p.a,
                _ => out.push((p.regime.key(), p.a, p.a)),
            }
        }
        out
    }
}
