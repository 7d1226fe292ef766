//! Reduction of order through a common root of
//!
//! ```text
//! P(ξ) = ξ^{k+1} − Σ a_i ξ^{k−i},    Q(ξ) = Σ b_i ξ^{k−i}.
//! ```
//!
//! When a unit `ρ` annihilates both, the change of variables
//! `t_n = x_n − ρ x_{n−1}` splits the order `k+1` equation into the factor
//! equation
//!
//! ```text
//! t_{n+1} = −Σ_{i<k} p_i t_{n−i} + g_n( Σ_{i<k} q_i t_{n−i} )
//! ```
//!
//! and the cofactor `x_{n+1} = ρ x_n + t_{n+1}`, with
//! `p_i = ρ^{i+1} − a_0ρ^i − ⋯ − a_i` and `q_i = b_0ρ^i + ⋯ + b_i`.
//!
//! Roots are supplied by the caller and verified, never solved for. All
//! products keep coefficients on the left of powers of `ρ`, so the formulas
//! hold verbatim in non-commutative algebras.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Element};
use crate::equations::{EquationError, LinearArgEquation};

pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
pub const DEFAULT_MATRIX_ROOT_TOL: f64 = 1e-8;
/// Residual allowed for `ρ⁻¹ρ = 1` when verifying the root is a unit.
pub const UNIT_TOL: f64 = 1e-8;

/// Default root tolerance for an algebra.
pub fn default_root_tol(algebra: &Algebra) -> f64 {
    match algebra {
        Algebra::Matrix { .. } => DEFAULT_MATRIX_ROOT_TOL,
        _ => DEFAULT_ROOT_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("candidate root rejected: |P(rho)| = {residual_p:e}, |Q(rho)| = {residual_q:e}, tolerance {root_tol:e}")]
    RootRejected {
        residual_p: f64,
        residual_q: f64,
        root_tol: f64,
    },
    #[error("candidate root is not a unit")]
    NotAUnit,
    #[error("reduction needs k >= 1")]
    FirstOrder,
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

pub type Result<T, E = ReductionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionResult {
    pub rho: Element,
    pub residual_p: f64,
    pub residual_q: f64,
    pub p: Vec<Element>,
    pub q: Vec<Element>,
    /// Order `k` equation with linear coefficients `−p_i`, argument
    /// coefficients `q_i` and the original `g_n`.
    #[serde(skip)]
    pub factor: LinearArgEquation,
}

/// `P(ρ) = ρ^{k+1} − Σ a_i ρ^{k−i}`.
pub fn eval_p(algebra: &Algebra, a: &[Element], rho: &Element) -> Result<Element> {
    let k = nonempty_degree(a)?;
    let mut acc = algebra.power(rho, (k + 1) as u32)?;
    for (i, ai) in a.iter().enumerate() {
        let term = algebra.mul(ai, &algebra.power(rho, (k - i) as u32)?)?;
        acc = algebra.sub(&acc, &term)?;
    }
    Ok(acc)
}

/// `Q(ρ) = Σ b_i ρ^{k−i}`.
pub fn eval_q(algebra: &Algebra, b: &[Element], rho: &Element) -> Result<Element> {
    let k = nonempty_degree(b)?;
    let mut acc = algebra.zero();
    for (i, bi) in b.iter().enumerate() {
        let term = algebra.mul(bi, &algebra.power(rho, (k - i) as u32)?)?;
        acc = algebra.add(&acc, &term)?;
    }
    Ok(acc)
}

fn nonempty_degree(coeffs: &[Element]) -> Result<usize> {
    coeffs
        .len()
        .checked_sub(1)
        .ok_or_else(|| ReductionError::Argument("coefficient list is empty".into()))
}

/// `p_0..p_{k−1}` and `q_0..q_{k−1}`.
pub fn factor_coefficients(
    algebra: &Algebra,
    a: &[Element],
    b: &[Element],
    rho: &Element,
) -> Result<(Vec<Element>, Vec<Element>)> {
    if a.len() != b.len() {
        return Err(ReductionError::Argument("coefficient lists differ in length".into()));
    }
    let k = nonempty_degree(a)?;
    if algebra.try_inverse(rho, UNIT_TOL)?.is_none() {
        return Err(ReductionError::NotAUnit);
    }
    let powers: Vec<Element> = (0..=k as u32)
        .map(|j| algebra.power(rho, j))
        .collect::<Result<_, _>>()?;
    let mut p = Vec::with_capacity(k);
    let mut q = Vec::with_capacity(k);
    for i in 0..k {
        let mut pi = powers[i + 1].clone();
        let mut qi = algebra.zero();
        for j in 0..=i {
            pi = algebra.sub(&pi, &algebra.mul(&a[j], &powers[i - j])?)?;
            qi = algebra.add(&qi, &algebra.mul(&b[j], &powers[i - j])?)?;
        }
        p.push(pi);
        q.push(qi);
    }
    Ok((p, q))
}

/// Verifies `ρ` and builds the factor equation.
pub fn reduce_order(eq: &LinearArgEquation, rho: &Element, root_tol: f64) -> Result<ReductionResult> {
    if !(root_tol > 0.0) {
        return Err(ReductionError::Argument(format!(
            "root tolerance must be positive, got {root_tol}"
        )));
    }
    if eq.delay() == 0 {
        return Err(ReductionError::FirstOrder);
    }
    let algebra = eq.algebra();
    algebra.check(rho)?;
    if algebra.try_inverse(rho, UNIT_TOL)?.is_none() {
        return Err(ReductionError::NotAUnit);
    }
    let residual_p = algebra.norm(&eval_p(algebra, eq.linear(), rho)?)?;
    let residual_q = algebra.norm(&eval_q(algebra, eq.argument(), rho)?)?;
    if !(residual_p <= root_tol && residual_q <= root_tol) {
        return Err(ReductionError::RootRejected {
            residual_p,
            residual_q,
            root_tol,
        });
    }
    let (p, q) = factor_coefficients(algebra, eq.linear(), eq.argument(), rho)?;
    let neg_p = p.iter().map(|pi| algebra.neg(pi)).collect::<Result<Vec<_>, _>>()?;
    let factor = LinearArgEquation::from_parts(*algebra, neg_p, q.clone(), eq.nonlinearity().clone())?;
    Ok(ReductionResult {
        rho: rho.clone(),
        residual_p,
        residual_q,
        p,
        q,
        factor,
    })
}

/// `t_{−i} = x_{−i} − ρ x_{−i−1}` for `i = 0..k−1`.
///
/// `init_x` is `[x_{−k}, .., x_0]`; the result is `[t_{−k+1}, .., t_0]`, the
/// same oldest-first layout [`LinearArgEquation::iterate`] expects.
pub fn initial_t(algebra: &Algebra, init_x: &[Element], rho: &Element) -> Result<Vec<Element>> {
    if init_x.len() < 2 {
        return Err(ReductionError::Argument("need at least two initial values".into()));
    }
    init_x
        .windows(2)
        .map(|w| Ok(algebra.sub(&w[1], &algebra.mul(rho, &w[0])?)?))
        .collect()
}

/// `x_1..x_N` from `x_{n+1} = ρ x_n + t_{n+1}` given `t = [t_1, .., t_N]`.
pub fn cofactor_reconstruct(algebra: &Algebra, rho: &Element, x0: &Element, t: &[Element]) -> Result<Vec<Element>> {
    let mut out = Vec::with_capacity(t.len());
    let mut x = x0.clone();
    for tn in t {
        x = algebra.add(&algebra.mul(rho, &x)?, tn)?;
        out.push(x.clone());
    }
    Ok(out)
}

/// Closed form `x_n = ρⁿ x_0 + Σ_{j=1}^{n} ρ^{n−j} t_j` for `n = 1..N`.
pub fn cofactor_closed_form(algebra: &Algebra, rho: &Element, x0: &Element, t: &[Element]) -> Result<Vec<Element>> {
    let powers: Vec<Element> = (0..=t.len() as u32)
        .map(|j| algebra.power(rho, j))
        .collect::<Result<_, _>>()?;
    (1..=t.len())
        .map(|n| {
            let mut acc = algebra.mul(&powers[n], x0)?;
            for j in 1..=n {
                acc = algebra.add(&acc, &algebra.mul(&powers[n - j], &t[j - 1])?)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Runs the factor equation from [`initial_t`], rebuilds `x` through the
/// cofactor and returns `max_{n ≤ N} |x_direct − x_rebuilt|` against direct
/// iteration of `eq`.
pub fn split_consistency_check(
    eq: &LinearArgEquation,
    rho: &Element,
    init: &[Element],
    steps: usize,
    root_tol: f64,
) -> Result<f64> {
    let reduction = reduce_order(eq, rho, root_tol)?;
    let algebra = eq.algebra();
    // No divergence cut-off: both paths must cover the same horizon.
    let direct = eq.iterate_bounded(init, steps, f64::INFINITY)?;
    let t_init = initial_t(algebra, init, rho)?;
    let factor = reduction.factor.iterate_bounded(&t_init, steps, f64::INFINITY)?;
    let x0 = init.last().expect("init checked by iterate");
    let rebuilt = cofactor_reconstruct(algebra, rho, x0, factor.computed())?;
    let mut worst: f64 = 0.0;
    for (a, b) in direct.computed().iter().zip(&rebuilt) {
        let d = algebra.norm(&algebra.sub(a, b)?)?;
        worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{Family, Nonlinearity};

    fn real(values: &[f64]) -> Vec<Element> {
        values.iter().map(|v| Element::Real(*v)).collect()
    }

    fn re(x: &Element) -> f64 {
        x.as_real().unwrap()
    }

    fn tanh(sigma: f64) -> Nonlinearity {
        Nonlinearity::constant(Family::PointwiseTanh, sigma).unwrap()
    }

    #[test]
    fn p_and_q_values() {
        let r = Algebra::Real;
        let p = eval_p(&r, &real(&[0.5, -0.04]), &Element::Real(0.4)).unwrap();
        // 0.16 − 0.2 + 0.04
        assert!(re(&p).abs() < 1e-16);
        let a = 0.7;
        let p = eval_p(&r, &real(&[a, 0.0, 0.0]), &Element::Real(a)).unwrap();
        assert!(re(&p).abs() < 1e-16);
        assert_eq!(
            eval_q(&r, &real(&[0.0, 0.0, 0.0]), &Element::Real(0.3)).unwrap(),
            Element::Real(0.0)
        );
    }

    #[test]
    fn coefficients_for_linear_root_shape() {
        let r = Algebra::Real;
        let a = 0.5;
        let b = real(&[1.0, 0.3, -0.2, 0.1]);
        let (p, q) = factor_coefficients(&r, &real(&[a, 0.0, 0.0, 0.0]), &b, &Element::Real(a)).unwrap();
        assert!(p.iter().all(|pi| re(pi) == 0.0));
        // q_i = b_0 a^i + ... + b_i
        assert_eq!(re(&q[0]), 1.0);
        assert!((re(&q[1]) - (0.5 + 0.3)).abs() < 1e-16);
        assert!((re(&q[2]) - (0.25 + 0.15 - 0.2)).abs() < 1e-16);
    }

    #[test]
    fn coefficients_for_argument_root_shape() {
        let r = Algebra::Real;
        let bb = 0.4;
        let a = real(&[0.3, 0.2, 0.1]);
        let (p, q) = factor_coefficients(&r, &a, &real(&[1.0, -bb, 0.0]), &Element::Real(bb)).unwrap();
        assert_eq!(q.iter().map(re).collect::<Vec<_>>(), vec![1.0, 0.0]);
        assert!((re(&p[0]) - (bb - 0.3)).abs() < 1e-16);
        assert!((re(&p[1]) - (bb * bb - 0.3 * bb - 0.2)).abs() < 1e-16);
    }

    #[test]
    fn second_order_factor_is_first_order() {
        let (a0, bb) = (0.5, 0.4);
        let a1 = bb * bb - a0 * bb;
        let eq = LinearArgEquation::new(Algebra::Real, real(&[a0, a1]), real(&[1.0, -bb]), tanh(0.3)).unwrap();
        let red = reduce_order(&eq, &Element::Real(bb), 1e-9).unwrap();
        assert_eq!(red.factor.order(), 1);
        assert!((re(&red.p[0]) - (bb - a0)).abs() < 1e-16);
        assert!((re(&red.factor.linear()[0]) - (a0 - bb)).abs() < 1e-16);
        assert_eq!(red.factor.argument(), &[Element::Real(1.0)]);
    }

    #[test]
    fn rejections() {
        let (a0, bb) = (0.5, 0.4);
        let a1 = bb * bb - a0 * bb;
        let eq = LinearArgEquation::new(Algebra::Real, real(&[a0, a1]), real(&[1.0, -bb]), tanh(0.3)).unwrap();
        // Q(ρ) = ρ − 0.4, so a shift of 1e−8 gives residual 10·tol
        let err = reduce_order(&eq, &Element::Real(bb + 1e-8), 1e-9).unwrap_err();
        match err {
            ReductionError::RootRejected { residual_q, .. } => assert!(residual_q > 9e-9),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            reduce_order(&eq, &Element::Real(0.0), 1e-9).unwrap_err(),
            ReductionError::NotAUnit
        );
        assert!(reduce_order(&eq, &Element::Real(bb), 0.0).is_err());
    }

    #[test]
    fn initial_t_values() {
        let r = Algebra::Real;
        let t = initial_t(&r, &real(&[2.0, 1.0]), &Element::Real(0.4)).unwrap();
        assert!((re(&t[0]) - 0.2).abs() < 1e-16);
        let t = initial_t(&r, &real(&[2.0, 0.8]), &Element::Real(0.4)).unwrap();
        assert_eq!(t, real(&[0.0]));

        let g = Algebra::grid(101).unwrap();
        let rho = g.sample(|s| 0.5 / (s + 1.0)).unwrap();
        let t = initial_t(&g, &[g.identity(), g.identity()], &rho).unwrap();
        let expected = g.sample(|s| 1.0 - 0.5 / (s + 1.0)).unwrap();
        assert!(g.norm(&g.sub(&t[0], &expected).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn cofactor_values() {
        let r = Algebra::Real;
        let x = cofactor_reconstruct(&r, &Element::Real(0.5), &Element::Real(1.0), &real(&[1.0, 1.0])).unwrap();
        assert_eq!(x, real(&[1.5, 1.75]));
        let x = cofactor_reconstruct(&r, &Element::Real(0.5), &Element::Real(1.0), &real(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(x, real(&[0.5, 0.25, 0.125]));
    }

    #[test]
    fn cofactor_recurrence_matches_closed_form_in_matrices() {
        let m = Algebra::matrix(2).unwrap();
        let rho = m.from_components(&[0.4, 0.3, -0.2, 0.5]).unwrap();
        let x0 = m.from_components(&[1.0, 0.0, 2.0, -1.0]).unwrap();
        let t: Vec<Element> = (0..12)
            .map(|n| {
                m.from_components(&[0.1 * n as f64, -0.3, 0.2, (n as f64).sin()])
                    .unwrap()
            })
            .collect();
        let a = cofactor_reconstruct(&m, &rho, &x0, &t).unwrap();
        let b = cofactor_closed_form(&m, &rho, &x0, &t).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!(m.norm(&m.sub(u, v).unwrap()).unwrap() < 1e-13);
        }
    }

    #[test]
    fn split_matches_direct_with_zero_init() {
        let (a0, bb) = (0.5, 0.4);
        let a1 = bb * bb - a0 * bb;
        let eq = LinearArgEquation::new(Algebra::Real, real(&[a0, a1]), real(&[1.0, -bb]), tanh(0.3)).unwrap();
        let d = split_consistency_check(&eq, &Element::Real(bb), &real(&[0.0, 0.0]), 50, 1e-9).unwrap();
        assert_eq!(d, 0.0);
        let d = split_consistency_check(&eq, &Element::Real(bb), &real(&[1.3, -0.7]), 100, 1e-9).unwrap();
        assert!(d <= 1e-12, "{d}");
    }
}
