//! Difference equations with linear arguments,
//!
//! ```text
//! x_{n+1} = Σ_{i=0}^{k} a_i x_{n−i} + g_n( Σ_{i=0}^{k} b_i x_{n−i} ),
//! ```
//!
//! their nonlinearity catalog, the iteration engine and the exponential
//! envelope check `|x_n| ≤ α^{n/(k+1)} μ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Element};
use crate::rng;

/// Iteration stops once a norm exceeds this value.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T, E = EquationError> = std::result::Result<T, E>;

/// Scalar maps `φ` with `|φ(t)| ≤ |t|` and `φ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMap {
    Sin,
    Tanh,
    Atan,
}

impl ScalarMap {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            ScalarMap::Sin => t.sin(),
            ScalarMap::Tanh => t.tanh(),
            ScalarMap::Atan => t.atan(),
        }
    }
}

/// Shape of `g_n`. Every family is `c_n · base(ξ)` with `|base(ξ)| ≤ |ξ|`, so
/// `|c_n| ≤ σ` gives `|g_n(ξ)| ≤ σ|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `c_n ξ`.
    LinearScale,
    /// `c_n ξ / max(1, |ξ|)`.
    NormSaturated,
    /// `c_n tanh ξ` applied to each sample.
    PointwiseTanh,
    /// `c_n sin ξ` applied to each sample.
    PointwiseSin,
    /// `r ↦ c_n ∫₀ʳ φ(x(s)) ds`, cumulative trapezoid on the grid.
    CumulativeIntegral { phi: ScalarMap },
    /// `c_n t³/(1+t²)`; unbounded but still below `σ|t|`.
    RationalCubic,
}

impl Family {
    pub fn supports(self, algebra: &Algebra) -> bool {
        match self {
            Family::LinearScale | Family::NormSaturated => true,
            Family::PointwiseTanh | Family::PointwiseSin => {
                matches!(algebra, Algebra::Real | Algebra::Grid { .. })
            }
            Family::CumulativeIntegral { .. } => matches!(algebra, Algebra::Grid { .. }),
            Family::RationalCubic => matches!(algebra, Algebra::Real),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LinearScale => "linear_scale",
            Family::NormSaturated => "norm_saturated",
            Family::PointwiseTanh => "pointwise_tanh",
            Family::PointwiseSin => "pointwise_sin",
            Family::CumulativeIntegral { .. } => "cumulative_integral",
            Family::RationalCubic => "rational_cubic",
        }
    }
}

/// Per-step multipliers `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CoefficientRule {
    Constant {
        value: f64,
    },
    /// `c_n = values[n mod len]`.
    Periodic {
        values: Vec<f64>,
    },
    /// `c_n` uniform in `[−bound, bound)`, drawn from stream `n` of `seed`.
    SeededRandom {
        seed: u64,
        bound: f64,
    },
}

impl CoefficientRule {
    pub fn at(&self, n: u64) -> f64 {
        match self {
            CoefficientRule::Constant { value } => *value,
            CoefficientRule::Periodic { values } => values[(n % values.len() as u64) as usize],
            CoefficientRule::SeededRandom { seed, bound } => {
                let mut r = rng::stream(*seed, n);
                rng::uniform(&mut r, -bound, *bound)
            }
        }
    }

    /// Supremum of `|c_n|` over all `n`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            CoefficientRule::Constant { value } => value.abs(),
            CoefficientRule::Periodic { values } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            CoefficientRule::SeededRandom { bound, .. } => bound.abs(),
        }
    }
}

/// The sequence `g_n` together with its declared bound `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    family: Family,
    sigma: f64,
    coefficients: CoefficientRule,
}

impl Nonlinearity {
    pub fn new(family: Family, sigma: f64, coefficients: CoefficientRule) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(EquationError::Config(format!(
                "sigma must be a positive number, got {sigma}"
            )));
        }
        match &coefficients {
            CoefficientRule::Periodic { values } if values.is_empty() => {
                return Err(EquationError::Config("periodic coefficient list is empty".into()));
            }
            CoefficientRule::Periodic { values } if values.iter().any(|v| !v.is_finite()) => {
                return Err(EquationError::Config("periodic coefficients must be finite".into()));
            }
            CoefficientRule::Constant { value } if !value.is_finite() => {
                return Err(EquationError::Config("constant coefficient must be finite".into()));
            }
            _ => {}
        }
        if coefficients.sup_abs() > sigma {
            return Err(EquationError::Config(format!(
                "per-step coefficients reach {} which exceeds sigma = {sigma}; |g_n(x)| <= sigma|x| would fail",
                coefficients.sup_abs()
            )));
        }
        Ok(Self {
            family,
            sigma,
            coefficients,
        })
    }

    /// `c_n = σ` for every `n`.
    pub fn constant(family: Family, sigma: f64) -> Result<Self> {
        Self::new(family, sigma, CoefficientRule::Constant { value: sigma })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn coefficients(&self) -> &CoefficientRule {
        &self.coefficients
    }

    pub fn check_compatible(&self, algebra: &Algebra) -> Result<()> {
        if self.family.supports(algebra) {
            Ok(())
        } else {
            Err(EquationError::Config(format!(
                "nonlinearity {} is not available in the {algebra} algebra",
                self.family.name()
            )))
        }
    }

    /// Evaluates `g_n(ξ)`.
    pub fn apply(&self, algebra: &Algebra, n: u64, xi: &Element) -> Result<Element> {
        self.check_compatible(algebra)?;
        algebra.check(xi)?;
        let c = self.coefficients.at(n);
        let pointwise = |f: fn(f64) -> f64| -> Element {
            match xi {
                Element::Real(t) => Element::Real(c * f(*t)),
                Element::Grid(v) => Element::Grid(v.iter().map(|t| c * f(*t)).collect()),
                _ => unreachable!("family compatibility checked"),
            }
        };
        Ok(match self.family {
            Family::LinearScale => algebra.scale(c, xi)?,
            Family::NormSaturated => {
                let norm = algebra.norm(xi)?;
                algebra.scale(c / norm.max(1.0), xi)?
            }
            Family::PointwiseTanh => pointwise(f64::tanh),
            Family::PointwiseSin => pointwise(f64::sin),
            Family::RationalCubic => pointwise(|t| t * t * t / (1.0 + t * t)),
            Family::CumulativeIntegral { phi } => {
                let Element::Grid(samples) = xi else {
                    unreachable!("grid checked")
                };
                let h = 1.0 / (samples.len() - 1) as f64;
                let mut out = Vec::with_capacity(samples.len());
                let mut acc = 0.0;
                let mut prev = c * phi.apply(samples[0]);
                out.push(0.0);
                for s in &samples[1..] {
                    let cur = c * phi.apply(*s);
                    acc += 0.5 * h * (prev + cur);
                    out.push(acc);
                    prev = cur;
                }
                Element::Grid(out)
            }
        })
    }

    /// Largest observed `|g_n(ξ)|/|ξ|` over random `ξ` and step indices.
    ///
    /// `ξ` has components uniform in `[−1, 1)` scaled by a magnitude drawn
    /// log-uniformly from `[1e−3, 1e3]`.
    pub fn sigma_spot_check(&self, algebra: &Algebra, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(EquationError::Argument("samples must be at least 1".into()));
        }
        self.check_compatible(algebra)?;
        let mut r = rng::seeded(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let scale = 10f64.powf(rng::uniform(&mut r, -3.0, 3.0));
            let xi = algebra.scale(scale, &algebra.random_element(&mut r))?;
            let n = r_step(&mut r);
            let nx = algebra.norm(&xi)?;
            if nx == 0.0 {
                continue;
            }
            let ng = algebra.norm(&self.apply(algebra, n, &xi)?)?;
            worst = worst.max(ng / nx);
        }
        Ok(worst)
    }
}

fn r_step(r: &mut rng::SeededRng) -> u64 {
    (rng::unit(r) * 1000.0) as u64
}

/// Coefficients `a_0..a_k`, `b_0..b_k` and the nonlinearity `g_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearArgEquation {
    algebra: Algebra,
    linear: Vec<Element>,
    argument: Vec<Element>,
    nonlinearity: Nonlinearity,
}

impl LinearArgEquation {
    /// Validates shapes, family compatibility and `a_k ≠ 0 or b_k ≠ 0`.
    pub fn new(
        algebra: Algebra,
        linear: Vec<Element>,
        argument: Vec<Element>,
        nonlinearity: Nonlinearity,
    ) -> Result<Self> {
        let eq = Self::from_parts(algebra, linear, argument, nonlinearity)?;
        let k = eq.delay();
        if eq.algebra.norm(&eq.linear[k])? == 0.0 && eq.algebra.norm(&eq.argument[k])? == 0.0 {
            return Err(EquationError::Config(format!(
                "a_k != 0 or b_k != 0 is required (k = {k}): both highest-lag coefficients vanish"
            )));
        }
        Ok(eq)
    }

    /// Like [`new`](Self::new) but without the highest-lag condition; factor
    /// equations may legitimately end in zero coefficients.
    pub(crate) fn from_parts(
        algebra: Algebra,
        linear: Vec<Element>,
        argument: Vec<Element>,
        nonlinearity: Nonlinearity,
    ) -> Result<Self> {
        if linear.is_empty() || linear.len() != argument.len() {
            return Err(EquationError::Config(format!(
                "need matching non-empty coefficient lists, got {} linear and {} argument coefficients",
                linear.len(),
                argument.len()
            )));
        }
        for e in linear.iter().chain(&argument) {
            algebra.check(e)?;
        }
        nonlinearity.check_compatible(&algebra)?;
        Ok(Self {
            algebra,
            linear,
            argument,
            nonlinearity,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    /// `a_0..a_k`.
    pub fn linear(&self) -> &[Element] {
        &self.linear
    }

    /// `b_0..b_k`.
    pub fn argument(&self) -> &[Element] {
        &self.argument
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn sigma(&self) -> f64 {
        self.nonlinearity.sigma
    }

    /// The largest lag `k`.
    pub fn delay(&self) -> usize {
        self.linear.len() - 1
    }

    /// `k + 1`.
    pub fn order(&self) -> usize {
        self.linear.len()
    }

    /// One step: `history` is `x_n, x_{n−1}, .., x_{n−k}` (newest first) and
    /// the result is `x_{n+1}`. Coefficients multiply on the left.
    pub fn step(&self, history: &[Element], n: u64) -> Result<Element> {
        if history.len() != self.order() {
            return Err(EquationError::Argument(format!(
                "history must hold {} elements, got {}",
                self.order(),
                history.len()
            )));
        }
        let linear = self.algebra.left_combination(&self.linear, history)?;
        let arg = self.algebra.left_combination(&self.argument, history)?;
        let nonlinear = self.nonlinearity.apply(&self.algebra, n, &arg)?;
        Ok(self.algebra.add(&linear, &nonlinear)?)
    }

    /// Iterates from `init = [x_{−k}, .., x_0]` for `steps` steps.
    pub fn iterate(&self, init: &[Element], steps: usize) -> Result<Trajectory> {
        self.iterate_bounded(init, steps, DIVERGENCE_BOUND)
    }

    pub fn iterate_bounded(&self, init: &[Element], steps: usize, bound: f64) -> Result<Trajectory> {
        if init.len() != self.order() {
            return Err(EquationError::Argument(format!(
                "need {} initial values x_-k..x_0, got {}",
                self.order(),
                init.len()
            )));
        }
        let mut norms = Vec::with_capacity(init.len() + steps);
        for x in init {
            norms.push(self.algebra.norm(x)?);
        }
        let mu = norms.iter().fold(0.0, |m: f64, v| m.max(*v));
        let mut traj = Trajectory {
            delay: self.delay(),
            values: init.to_vec(),
            norms,
            mu,
            bound,
            diverged: false,
        };
        traj.extend(self, steps)?;
        Ok(traj)
    }
}

/// A solution segment `x_{−k}, .., x_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    delay: usize,
    values: Vec<Element>,
    norms: Vec<f64>,
    mu: f64,
    bound: f64,
    diverged: bool,
}

impl Trajectory {
    /// Continues the iteration for `more` steps, using step indices that
    /// follow on from the last computed value.
    pub fn extend(&mut self, eq: &LinearArgEquation, more: usize) -> Result<()> {
        if eq.delay() != self.delay {
            return Err(EquationError::Argument(
                "equation order does not match trajectory".into(),
            ));
        }
        let mut history: Vec<Element> = self.values.iter().rev().take(self.delay + 1).cloned().collect();
        for _ in 0..more {
            if self.diverged {
                break;
            }
            let n = self.last_index() as u64;
            let next = eq.step(&history, n)?;
            let norm = eq.algebra().norm(&next)?;
            history.rotate_right(1);
            history[0] = next.clone();
            self.values.push(next);
            self.norms.push(norm);
            if !(norm <= self.bound) {
                self.diverged = true;
            }
        }
        Ok(())
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Index `N` of the newest value.
    pub fn last_index(&self) -> i64 {
        self.values.len() as i64 - self.delay as i64 - 1
    }

    /// Number of computed steps beyond the initial values.
    pub fn steps(&self) -> usize {
        self.values.len() - self.delay - 1
    }

    /// All values from `x_{−k}` to `x_N`.
    pub fn values(&self) -> &[Element] {
        &self.values
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Value at index `n ∈ [−k, N]`.
    pub fn at(&self, n: i64) -> Option<&Element> {
        let i = n + self.delay as i64;
        usize::try_from(i).ok().and_then(|i| self.values.get(i))
    }

    pub fn norm_at(&self, n: i64) -> Option<f64> {
        let i = n + self.delay as i64;
        usize::try_from(i).ok().and_then(|i| self.norms.get(i).copied())
    }

    /// Computed values `x_1..x_N`.
    pub fn computed(&self) -> &[Element] {
        &self.values[self.delay + 1..]
    }

    /// `max{|x_0|, .., |x_{−k}|}`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn final_norm(&self) -> f64 {
        *self.norms.last().expect("trajectory holds initial values")
    }

    /// First index `n ≥ 1` with `|x_n| < threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<i64> {
        (1..=self.last_index()).find(|&n| self.norm_at(n).is_some_and(|v| v < threshold))
    }

    /// Multiplies the norm record from index `from` on by `factor`. Used to
    /// build counterexamples for the envelope check.
    pub fn scale_norms_from(&mut self, from: i64, factor: f64) {
        let start = (from + self.delay as i64).max(0) as usize;
        for v in self.norms.iter_mut().skip(start) {
            *v *= factor;
        }
    }

    /// Checks `|x_n| ≤ α^{n/(k+1)} μ + tol` for every computed `n ≥ 1`.
    pub fn envelope_check(&self, alpha: f64, tol: f64) -> Result<EnvelopeReport> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(EquationError::Argument(format!(
                "envelope rate must lie in (0, 1), got {alpha}"
            )));
        }
        let exponent_scale = 1.0 / (self.delay + 1) as f64;
        let mut worst_margin = f64::INFINITY;
        let mut first_violation = None;
        let mut worst_index = None;
        for n in 1..=self.last_index() {
            let bound = alpha.powf(n as f64 * exponent_scale) * self.mu;
            let margin = bound - self.norm_at(n).expect("index in range");
            if margin < worst_margin || margin.is_nan() {
                worst_margin = margin;
                worst_index = Some(n);
            }
            if first_violation.is_none() && !(margin + tol >= 0.0) {
                first_violation = Some(n);
            }
        }
        Ok(EnvelopeReport {
            alpha,
            tol,
            checked: self.steps(),
            holds: first_violation.is_none(),
            worst_margin: if self.steps() == 0 { 0.0 } else { worst_margin },
            worst_index,
            first_violation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub alpha: f64,
    pub tol: f64,
    pub checked: usize,
    pub holds: bool,
    /// `min_n (α^{n/(k+1)} μ − |x_n|)`.
    pub worst_margin: f64,
    pub worst_index: Option<i64>,
    pub first_violation: Option<i64>,
}
