//! Sufficient conditions for every solution to converge to the origin.
//!
//! Two routes are compared throughout:
//!
//! * the direct contraction bound `α = Σ_{i≤k}(|a_i| + σ|b_i|) < 1`, which
//!   gives `|x_n| ≤ α^{n/(k+1)} max{|x_0|, .., |x_{−k}|}`;
//! * the factored bound `Σ_{i<k}(|p_i| + σ|q_i|) < 1` together with `|ρ| < 1`
//!   for a common unit root `ρ` (see [`crate::reduction`]).
//!
//! Failing a check never means instability: every condition here is only
//! sufficient, so the outcome is either a conclusion or "inconclusive".

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Element};
use crate::equations::{EquationError, LinearArgEquation};
use crate::reduction::{self, ReductionError, ReductionResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

pub type Result<T, E = StabilityError> = std::result::Result<T, E>;

/// A criterion that, when it holds, proves global attractivity of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `Σ(|a_i| + σ|b_i|) < 1`.
    DirectContraction,
    /// `|ρ| < 1` and `Σ(|p_i| + σ|q_i|) < 1`.
    FactoredContraction,
    /// `x_{n+1} = a x_n + g_n(Σ b_i x_{n−i})` with `Q(a) = 0`, `|a| < 1` and
    /// `Σ_{i<k}|b_0aⁱ + ⋯ + b_i| < 1/σ`.
    LinearPartRoot,
    /// Argument `x_n − b x_{n−1}` with `P(b) = 0`, `|b| < 1` and
    /// `Σ_{i<k}|b^{i+1} − a_0bⁱ − ⋯ − a_i| < 1 − σ`.
    ArgumentRoot,
}

impl Criterion {
    pub fn key(self) -> &'static str {
        match self {
            Criterion::DirectContraction => "direct_contraction",
            Criterion::FactoredContraction => "factored_contraction",
            Criterion::LinearPartRoot => "linear_part_root",
            Criterion::ArgumentRoot => "argument_root",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Criterion::DirectContraction => "direct contraction: sum(|a_i| + sigma|b_i|) < 1",
            Criterion::FactoredContraction => "factored contraction: |rho| < 1 and sum(|p_i| + sigma|q_i|) < 1",
            Criterion::LinearPartRoot => "common root rho = a of the linear part",
            Criterion::ArgumentRoot => "common root rho = b of the argument x_n - b x_(n-1)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// At least one criterion holds; every solution converges to zero.
    Converges {
        by: Vec<Criterion>,
    },
    /// Second order with a valid root `ρ = b`: solutions converge whenever the
    /// first-order factor `t_{n+1} = (a_0 − b)t_n + g_n(t_n)` converges from
    /// `t_0 = x_0 − b x_{−1}`.
    ConditionalOnFirstOrderFactor,
    Inconclusive,
}

/// `Σ_{i=0}^{k}(|a_i| + σ|b_i|)`.
pub fn alpha_direct(eq: &LinearArgEquation) -> Result<f64> {
    let alg = eq.algebra();
    let sigma = eq.sigma();
    let mut acc = 0.0;
    for (a, b) in eq.linear().iter().zip(eq.argument()) {
        acc += alg.norm(a)? + sigma * alg.norm(b)?;
    }
    Ok(acc)
}

/// `Σ_{i=0}^{k−1}(|p_i| + σ|q_i|)`.
pub fn alpha_factored(reduction: &ReductionResult, sigma: f64) -> Result<f64> {
    let alg = reduction.factor.algebra();
    let mut acc = 0.0;
    for (p, q) in reduction.p.iter().zip(&reduction.q) {
        acc += alg.norm(p)? + sigma * alg.norm(q)?;
    }
    Ok(acc)
}

/// Largest `σ` for which the direct bound can hold:
/// `(1 − Σ|a_i|)/Σ|b_i|`. `None` when `Σ|a_i| ≥ 1`.
pub fn sigma_sup_direct(eq: &LinearArgEquation) -> Result<Option<f64>> {
    let alg = eq.algebra();
    let mut sa = 0.0;
    let mut sb = 0.0;
    for (a, b) in eq.linear().iter().zip(eq.argument()) {
        sa += alg.norm(a)?;
        sb += alg.norm(b)?;
    }
    Ok(sup_from_sums(sa, sb))
}

/// Largest `σ` for which the factored bound can hold:
/// `(1 − Σ|p_i|)/Σ|q_i|`. `None` when `|ρ| ≥ 1` or `Σ|p_i| ≥ 1`.
pub fn sigma_sup_factored(reduction: &ReductionResult) -> Result<Option<f64>> {
    let alg = reduction.factor.algebra();
    if alg.norm(&reduction.rho)? >= 1.0 {
        return Ok(None);
    }
    let mut sp = 0.0;
    let mut sq = 0.0;
    for (p, q) in reduction.p.iter().zip(&reduction.q) {
        sp += alg.norm(p)?;
        sq += alg.norm(q)?;
    }
    Ok(sup_from_sums(sp, sq))
}

fn sup_from_sums(linear: f64, argument: f64) -> Option<f64> {
    if linear >= 1.0 {
        None
    } else if argument == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some((1.0 - linear) / argument)
    }
}

/// For `x_{n+1} = a x_n + α_n tanh(x_n − aᵏ x_{n−k})`: the factored range
/// `σ < (1 − |a|)/(1 − |a|ᵏ)`. `None` unless `0 < |a| < 1`.
pub fn delayed_tanh_sigma_sup_factored(a_norm: f64, k: usize) -> Option<f64> {
    (a_norm > 0.0 && a_norm < 1.0 && k >= 1).then(|| (1.0 - a_norm) / (1.0 - a_norm.powi(k as i32)))
}

/// Same equation under the direct bound: `σ < (1 − |a|)/(1 + |a|ᵏ)`.
pub fn delayed_tanh_sigma_sup_direct(a_norm: f64, k: usize) -> Option<f64> {
    (a_norm > 0.0 && a_norm < 1.0 && k >= 1).then(|| (1.0 - a_norm) / (1.0 + a_norm.powi(k as i32)))
}

/// Result of the check for `x_{n+1} = a x_n + g_n(b_0x_n + ⋯ + b_kx_{n−k})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRootCheck {
    pub a_norm: f64,
    /// `|b_0aᵏ + b_1a^{k−1} + ⋯ + b_k|`.
    pub residual: f64,
    /// `Σ_{i<k}|b_0aⁱ + ⋯ + b_i|`.
    pub sum: f64,
    pub limit: f64,
    pub a_is_unit: bool,
    pub root_holds: bool,
    pub sum_holds: bool,
    pub holds: bool,
}

/// Result of the check for `x_{n+1} = Σ a_i x_{n−i} + g_n(x_n − b x_{n−1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgumentRootCheck {
    pub b_norm: f64,
    /// `|a_0bᵏ + ⋯ + a_k − b^{k+1}|`.
    pub residual: f64,
    /// `Σ_{i<k}|b^{i+1} − a_0bⁱ − ⋯ − a_i|`.
    pub sum: f64,
    pub limit: f64,
    pub b_is_unit: bool,
    pub root_holds: bool,
    pub sum_holds: bool,
    pub holds: bool,
}

fn is_zero(alg: &Algebra, x: &Element, tol: f64) -> Result<bool> {
    Ok(alg.norm(x)? <= tol)
}

/// Returns `a` when the linear part is `(a, 0, .., 0)`.
pub fn linear_root_candidate(eq: &LinearArgEquation, tol: f64) -> Result<Option<Element>> {
    let alg = eq.algebra();
    for ai in &eq.linear()[1..] {
        if !is_zero(alg, ai, tol)? {
            return Ok(None);
        }
    }
    Ok(Some(eq.linear()[0].clone()))
}

/// Returns `b` when the argument is `(1, −b, 0, .., 0)`.
pub fn argument_root_candidate(eq: &LinearArgEquation, tol: f64) -> Result<Option<Element>> {
    let alg = eq.algebra();
    let arg = eq.argument();
    if arg.len() < 2 || !is_zero(alg, &alg.sub(&arg[0], &alg.identity())?, tol)? {
        return Ok(None);
    }
    for bi in &arg[2..] {
        if !is_zero(alg, bi, tol)? {
            return Ok(None);
        }
    }
    Ok(Some(alg.neg(&arg[1])?))
}

/// Checks the common-root criterion with `ρ = a` for the linear part
/// `(a, 0, .., 0)`.
pub fn check_linear_root(eq: &LinearArgEquation, tol: f64) -> Result<LinearRootCheck> {
    let alg = eq.algebra();
    let a = linear_root_candidate(eq, tol)?.ok_or_else(|| {
        StabilityError::Shape("linear coefficients must be (a, 0, ..., 0) for the linear-part root check".into())
    })?;
    let k = eq.delay();
    let a_norm = alg.norm(&a)?;
    let a_is_unit = alg.try_inverse(&a, reduction::UNIT_TOL)?.is_some();
    let residual = alg.norm(&reduction::eval_q(alg, eq.argument(), &a)?)?;
    let mut sum = 0.0;
    for i in 0..k {
        let mut qi = alg.zero();
        for j in 0..=i {
            qi = alg.add(&qi, &alg.mul(&eq.argument()[j], &alg.power(&a, (i - j) as u32)?)?)?;
        }
        sum += alg.norm(&qi)?;
    }
    let limit = 1.0 / eq.sigma();
    let root_holds = residual <= tol;
    let sum_holds = sum < limit;
    Ok(LinearRootCheck {
        a_norm,
        residual,
        sum,
        limit,
        a_is_unit,
        root_holds,
        sum_holds,
        holds: a_is_unit && a_norm < 1.0 && root_holds && sum_holds,
    })
}

/// Checks the common-root criterion with `ρ = b` for the argument
/// `x_n − b x_{n−1}`.
pub fn check_argument_root(eq: &LinearArgEquation, tol: f64) -> Result<ArgumentRootCheck> {
    let alg = eq.algebra();
    let b = argument_root_candidate(eq, tol)?.ok_or_else(|| {
        StabilityError::Shape("argument coefficients must be (1, -b, 0, ..., 0) for the argument root check".into())
    })?;
    let k = eq.delay();
    let b_norm = alg.norm(&b)?;
    let b_is_unit = alg.try_inverse(&b, reduction::UNIT_TOL)?.is_some();
    let residual = alg.norm(&reduction::eval_p(alg, eq.linear(), &b)?)?;
    let mut sum = 0.0;
    for i in 0..k {
        let mut pi = alg.power(&b, (i + 1) as u32)?;
        for j in 0..=i {
            pi = alg.sub(&pi, &alg.mul(&eq.linear()[j], &alg.power(&b, (i - j) as u32)?)?)?;
        }
        sum += alg.norm(&pi)?;
    }
    let limit = 1.0 - eq.sigma();
    let root_holds = residual <= tol;
    let sum_holds = sum < limit;
    Ok(ArgumentRootCheck {
        b_norm,
        residual,
        sum,
        limit,
        b_is_unit,
        root_holds,
        sum_holds,
        holds: b_is_unit && b_norm < 1.0 && root_holds && sum_holds,
    })
}

/// The first-order factor `t_{n+1} = (a_0 − b)t_n + g_n(t_n)` of a second
/// order equation with argument `x_n − b x_{n−1}` and `a_0b + a_1 = b²`.
///
/// Convergence of this factor from `t_0 = x_0 − b x_{−1}` carries over to the
/// full solution; no smallness condition is required to build it.
pub fn first_order_factor(eq: &LinearArgEquation, tol: f64) -> Result<LinearArgEquation> {
    if eq.delay() != 1 {
        return Err(StabilityError::Shape(format!(
            "first-order factor needs a second-order equation, got order {}",
            eq.order()
        )));
    }
    let b = argument_root_candidate(eq, tol)?
        .ok_or_else(|| StabilityError::Shape("argument must be x_n - b x_(n-1)".into()))?;
    Ok(reduction::reduce_order(eq, &b, tol)?.factor)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub sigma: f64,
    pub alpha_direct: f64,
    pub direct_holds: bool,
    pub sigma_sup_direct: Option<f64>,
    pub rho: Option<Element>,
    pub rho_norm: Option<f64>,
    pub residual_p: Option<f64>,
    pub residual_q: Option<f64>,
    pub alpha_factored: Option<f64>,
    pub factored_holds: Option<bool>,
    pub sigma_sup_factored: Option<f64>,
    pub linear_root: Option<LinearRootCheck>,
    pub argument_root: Option<ArgumentRootCheck>,
    /// Linear coefficient `a_0 − b` of the first-order factor, for second
    /// order equations with a valid root.
    pub first_order_factor: Option<Element>,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn concluded_by(&self, c: Criterion) -> bool {
        matches!(&self.verdict, Verdict::Converges { by } if by.contains(&c))
    }

    pub fn converges(&self) -> bool {
        matches!(self.verdict, Verdict::Converges { .. })
    }

    /// Plain-text table of every computed bound.
    pub fn table(&self) -> String {
        use std::fmt::Write;
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:?}"));
        let flag = |b: bool| if b { "holds" } else { "fails" };
        let mut s = String::new();
        let _ = writeln!(s, "{:<32} {:?}", "sigma", self.sigma);
        let _ = writeln!(
            s,
            "{:<32} {:?} ({})",
            "direct sum(|a_i| + sigma|b_i|)",
            self.alpha_direct,
            flag(self.direct_holds)
        );
        let _ = writeln!(s, "{:<32} {}", "direct sigma supremum", opt(self.sigma_sup_direct));
        if let Some(rn) = self.rho_norm {
            let _ = writeln!(s, "{:<32} {:?}", "|rho|", rn);
            let _ = writeln!(s, "{:<32} {}", "|P(rho)|", opt(self.residual_p));
            let _ = writeln!(s, "{:<32} {}", "|Q(rho)|", opt(self.residual_q));
            let _ = writeln!(
                s,
                "{:<32} {} ({})",
                "factored sum(|p_i| + sigma|q_i|)",
                opt(self.alpha_factored),
                flag(self.factored_holds.unwrap_or(false))
            );
            let _ = writeln!(s, "{:<32} {}", "factored sigma supremum", opt(self.sigma_sup_factored));
        }
        if let Some(c) = &self.linear_root {
            let _ = writeln!(s, "{:<32} {:?}", "linear-part root |Q(a)|", c.residual);
            let _ = writeln!(
                s,
                "{:<32} {:?} < {:?} ({})",
                "linear-part root sum",
                c.sum,
                c.limit,
                flag(c.holds)
            );
        }
        if let Some(c) = &self.argument_root {
            let _ = writeln!(s, "{:<32} {:?}", "argument root |P(b)|", c.residual);
            let _ = writeln!(
                s,
                "{:<32} {:?} < {:?} ({})",
                "argument root sum",
                c.sum,
                c.limit,
                flag(c.holds)
            );
        }
        let verdict = match &self.verdict {
            Verdict::Converges { by } => {
                let names: Vec<&str> = by.iter().map(|c| c.key()).collect();
                format!("converges ({})", names.join(", "))
            }
            Verdict::ConditionalOnFirstOrderFactor => "conditional on first-order factor".into(),
            Verdict::Inconclusive => "inconclusive".into(),
        };
        let _ = writeln!(s, "{:<32} {}", "verdict", verdict);
        s
    }
}

/// Evaluates the direct bound and, when `rho` is given, the factored bound;
/// the linear-part and argument root checks run whenever the equation has
/// the matching shape.
///
/// A rejected `rho` propagates as [`ReductionError::RootRejected`].
pub fn check_attractivity(eq: &LinearArgEquation, rho: Option<&Element>, root_tol: f64) -> Result<StabilityReport> {
    let sigma = eq.sigma();
    let alpha_d = alpha_direct(eq)?;
    let direct_holds = alpha_d < 1.0;
    let mut by = Vec::new();
    if direct_holds {
        by.push(Criterion::DirectContraction);
    }

    let reduction = match rho {
        Some(r) => Some(reduction::reduce_order(eq, r, root_tol)?),
        None => None,
    };
    let alg = eq.algebra();
    let (mut rho_norm, mut alpha_f, mut factored_holds, mut sup_f) = (None, None, None, None);
    let mut first_order = None;
    if let Some(red) = &reduction {
        let rn = alg.norm(&red.rho)?;
        let af = alpha_factored(red, sigma)?;
        let holds = rn < 1.0 && af < 1.0;
        if holds {
            by.push(Criterion::FactoredContraction);
        }
        if eq.delay() == 1 && argument_root_candidate(eq, root_tol)?.is_some() {
            first_order = Some(red.factor.linear()[0].clone());
        }
        rho_norm = Some(rn);
        alpha_f = Some(af);
        factored_holds = Some(holds);
        sup_f = sigma_sup_factored(red)?;
    }

    let linear_root = match linear_root_candidate(eq, root_tol)? {
        Some(_) if eq.delay() >= 1 => Some(check_linear_root(eq, root_tol)?),
        _ => None,
    };
    if linear_root.as_ref().is_some_and(|c| c.holds) {
        by.push(Criterion::LinearPartRoot);
    }
    let argument_root = match argument_root_candidate(eq, root_tol)? {
        Some(_) => Some(check_argument_root(eq, root_tol)?),
        None => None,
    };
    if argument_root.as_ref().is_some_and(|c| c.holds) {
        by.push(Criterion::ArgumentRoot);
    }

    let verdict = if !by.is_empty() {
        Verdict::Converges { by }
    } else if first_order.is_some() {
        Verdict::ConditionalOnFirstOrderFactor
    } else {
        Verdict::Inconclusive
    };

    Ok(StabilityReport {
        sigma,
        alpha_direct: alpha_d,
        direct_holds,
        sigma_sup_direct: sigma_sup_direct(eq)?,
        rho: reduction.as_ref().map(|r| r.rho.clone()),
        rho_norm,
        residual_p: reduction.as_ref().map(|r| r.residual_p),
        residual_q: reduction.as_ref().map(|r| r.residual_q),
        alpha_factored: alpha_f,
        factored_holds,
        sigma_sup_factored: sup_f,
        linear_root,
        argument_root,
        first_order_factor: first_order,
        verdict,
    })
}
