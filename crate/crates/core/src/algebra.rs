//! Banach algebras with identity.
//!
//! Four instances are provided: the real line, the complex plane, real `d×d`
//! matrices under the induced ∞-operator norm (maximum absolute row sum), and
//! continuous functions on `[0, 1]` sampled on a uniform grid `r_j = j/(m−1)`
//! under the maximum norm over the samples.
//!
//! Elements are plain values. Every operation takes the [`Algebra`] it is
//! evaluated in and rejects elements whose shape does not belong to it.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

/// Samples with magnitude below this are treated as zero when inverting grid
/// functions.
pub const GRID_ZERO_THRESHOLD: f64 = 1e-12;

pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("element of shape {found} does not belong to the {expected} algebra")]
    Shape { expected: String, found: String },
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Algebra {
    Real,
    Complex,
    Matrix { dim: usize },
    Grid { points: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub enum Element {
    Real(f64),
    Complex(Complex64),
    Matrix(DMatrix<f64>),
    /// Samples `x(r_j)` at `r_j = j/(m−1)`.
    Grid(Vec<f64>),
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Real => write!(f, "real"),
            Algebra::Complex => write!(f, "complex"),
            Algebra::Matrix { dim } => write!(f, "matrix({dim}x{dim})"),
            Algebra::Grid { points } => write!(f, "grid({points})"),
        }
    }
}

impl Element {
    pub fn shape(&self) -> String {
        match self {
            Element::Real(_) => "real".into(),
            Element::Complex(_) => "complex".into(),
            Element::Matrix(m) => format!("matrix({}x{})", m.nrows(), m.ncols()),
            Element::Grid(v) => format!("grid({})", v.len()),
        }
    }

    /// Flat real components: `[x]`, `[re, im]`, row-major matrix entries, or
    /// grid samples in index order.
    pub fn components(&self) -> Vec<f64> {
        match self {
            Element::Real(x) => vec![*x],
            Element::Complex(z) => vec![z.re, z.im],
            Element::Matrix(m) => {
                let mut out = Vec::with_capacity(m.len());
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        out.push(m[(i, j)]);
                    }
                }
                out
            }
            Element::Grid(v) => v.clone(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Element::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

impl Algebra {
    pub fn matrix(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AlgebraError::Argument("matrix dimension must be positive".into()));
        }
        Ok(Algebra::Matrix { dim })
    }

    pub fn grid(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(AlgebraError::Argument("grid needs at least 2 sample points".into()));
        }
        Ok(Algebra::Grid { points })
    }

    /// Number of real components in an element.
    pub fn component_count(&self) -> usize {
        match *self {
            Algebra::Real => 1,
            Algebra::Complex => 2,
            Algebra::Matrix { dim } => dim * dim,
            Algebra::Grid { points } => points,
        }
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(self, Algebra::Matrix { dim } if *dim > 1)
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (self, x) {
            (Algebra::Real, Element::Real(_)) | (Algebra::Complex, Element::Complex(_)) => true,
            (Algebra::Matrix { dim }, Element::Matrix(m)) => m.nrows() == *dim && m.ncols() == *dim,
            (Algebra::Grid { points }, Element::Grid(v)) => v.len() == *points,
            _ => false,
        }
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(AlgebraError::Shape {
                expected: self.to_string(),
                found: x.shape(),
            })
        }
    }

    pub fn zero(&self) -> Element {
        self.constant(0.0)
    }

    pub fn identity(&self) -> Element {
        self.constant(1.0)
    }

    /// The constant `c·1`.
    pub fn constant(&self, c: f64) -> Element {
        match *self {
            Algebra::Real => Element::Real(c),
            Algebra::Complex => Element::Complex(Complex64::new(c, 0.0)),
            Algebra::Matrix { dim } => Element::Matrix(DMatrix::identity(dim, dim) * c),
            Algebra::Grid { points } => Element::Grid(vec![c; points]),
        }
    }

    /// Builds an element from flat components in the order of
    /// [`Element::components`].
    pub fn from_components(&self, c: &[f64]) -> Result<Element> {
        if c.len() != self.component_count() {
            return Err(AlgebraError::Argument(format!(
                "{} algebra needs {} components, got {}",
                self,
                self.component_count(),
                c.len()
            )));
        }
        Ok(match *self {
            Algebra::Real => Element::Real(c[0]),
            Algebra::Complex => Element::Complex(Complex64::new(c[0], c[1])),
            Algebra::Matrix { dim } => Element::Matrix(DMatrix::from_row_slice(dim, dim, c)),
            Algebra::Grid { .. } => Element::Grid(c.to_vec()),
        })
    }

    /// Grid nodes `r_j = j/(m−1)`; `None` outside the grid algebra.
    pub fn grid_nodes(&self) -> Option<Vec<f64>> {
        match *self {
            Algebra::Grid { points } => {
                let h = 1.0 / (points - 1) as f64;
                Some((0..points).map(|j| j as f64 * h).collect())
            }
            _ => None,
        }
    }

    /// Samples a function of `r ∈ [0, 1]` on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        let nodes = self
            .grid_nodes()
            .ok_or_else(|| AlgebraError::Argument(format!("cannot sample a function into the {self} algebra")))?;
        Ok(Element::Grid(nodes.into_iter().map(f).collect()))
    }

    pub fn norm(&self, x: &Element) -> Result<f64> {
        self.check(x)?;
        Ok(match x {
            Element::Real(v) => v.abs(),
            Element::Complex(z) => z.norm(),
            Element::Matrix(m) => m
                .row_iter()
                .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Element::Grid(v) => v.iter().fold(0.0, |acc, s| acc.max(s.abs())),
        })
    }

    fn check_pair(&self, x: &Element, y: &Element) -> Result<()> {
        self.check(x)?;
        self.check(y)
    }

    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_pair(x, y)?;
        Ok(match (x, y) {
            (Element::Real(a), Element::Real(b)) => Element::Real(a + b),
            (Element::Complex(a), Element::Complex(b)) => Element::Complex(a + b),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a + b),
            (Element::Grid(a), Element::Grid(b)) => Element::Grid(a.iter().zip(b).map(|(s, t)| s + t).collect()),
            _ => unreachable!("shapes checked"),
        })
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_pair(x, y)?;
        Ok(match (x, y) {
            (Element::Real(a), Element::Real(b)) => Element::Real(a - b),
            (Element::Complex(a), Element::Complex(b)) => Element::Complex(a - b),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a - b),
            (Element::Grid(a), Element::Grid(b)) => Element::Grid(a.iter().zip(b).map(|(s, t)| s - t).collect()),
            _ => unreachable!("shapes checked"),
        })
    }

    pub fn neg(&self, x: &Element) -> Result<Element> {
        self.scale(-1.0, x)
    }

    /// Scalar multiplication `αx`.
    pub fn scale(&self, alpha: f64, x: &Element) -> Result<Element> {
        self.check(x)?;
        Ok(match x {
            Element::Real(a) => Element::Real(alpha * a),
            Element::Complex(a) => Element::Complex(a * alpha),
            Element::Matrix(a) => Element::Matrix(a * alpha),
            Element::Grid(a) => Element::Grid(a.iter().map(|s| alpha * s).collect()),
        })
    }

    /// Algebra product `xy`. Matrix products are not commutative; grid
    /// functions multiply pointwise.
    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_pair(x, y)?;
        Ok(match (x, y) {
            (Element::Real(a), Element::Real(b)) => Element::Real(a * b),
            (Element::Complex(a), Element::Complex(b)) => Element::Complex(a * b),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a * b),
            (Element::Grid(a), Element::Grid(b)) => Element::Grid(a.iter().zip(b).map(|(s, t)| s * t).collect()),
            _ => unreachable!("shapes checked"),
        })
    }

    /// `x^j`, with `x^0 = 1` and `x^j = x·x^{j−1}`.
    pub fn power(&self, x: &Element, j: u32) -> Result<Element> {
        self.check(x)?;
        let mut acc = self.identity();
        for _ in 0..j {
            acc = self.mul(x, &acc)?;
        }
        Ok(acc)
    }

    /// `Σ c_i·e_i`, coefficients on the left.
    pub fn left_combination(&self, coeffs: &[Element], elems: &[Element]) -> Result<Element> {
        if coeffs.len() != elems.len() {
            return Err(AlgebraError::Argument(format!(
                "{} coefficients for {} elements",
                coeffs.len(),
                elems.len()
            )));
        }
        let mut acc = self.zero();
        for (c, e) in coeffs.iter().zip(elems) {
            acc = self.add(&acc, &self.mul(c, e)?)?;
        }
        Ok(acc)
    }

    /// Attempts to invert `x`.
    ///
    /// Returns `Ok(None)` when `x` is not a unit: zero scalars, singular
    /// matrices, grid functions with a sample below [`GRID_ZERO_THRESHOLD`],
    /// or any candidate whose residual `|x⁻¹x − 1|` or `|xx⁻¹ − 1|` exceeds
    /// `tol`.
    pub fn try_inverse(&self, x: &Element, tol: f64) -> Result<Option<Element>> {
        if !(tol > 0.0) {
            return Err(AlgebraError::Argument(format!(
                "inversion tolerance must be positive, got {tol}"
            )));
        }
        self.check(x)?;
        let candidate = match x {
            Element::Real(a) => (*a != 0.0).then(|| Element::Real(1.0 / a)),
            Element::Complex(z) => (z.norm_sqr() != 0.0).then(|| Element::Complex(z.inv())),
            Element::Matrix(m) => m.clone().try_inverse().map(Element::Matrix),
            Element::Grid(v) => {
                if v.iter().any(|s| s.abs() < GRID_ZERO_THRESHOLD) {
                    None
                } else {
                    Some(Element::Grid(v.iter().map(|s| 1.0 / s).collect()))
                }
            }
        };
        let Some(inv) = candidate else { return Ok(None) };
        if !inv.is_finite() {
            return Ok(None);
        }
        let one = self.identity();
        let left = self.norm(&self.sub(&self.mul(&inv, x)?, &one)?)?;
        let right = self.norm(&self.sub(&self.mul(x, &inv)?, &one)?)?;
        Ok((left <= tol && right <= tol).then_some(inv))
    }

    /// Element with every real component uniform in `[−1, 1)`.
    pub fn random_element(&self, rng: &mut impl RngCore) -> Element {
        let c: Vec<f64> = (0..self.component_count())
            .map(|_| rng::uniform(rng, -1.0, 1.0))
            .collect();
        self.from_components(&c).expect("component count matches")
    }

    /// Samples element triples and scalars from `seed` and measures the worst
    /// violation of each Banach algebra axiom.
    pub fn check_axioms(&self, sample_count: usize, seed: u64, tol: f64) -> Result<AxiomReport> {
        if sample_count == 0 {
            return Err(AlgebraError::Argument("sample_count must be at least 1".into()));
        }
        let mut rng = rng::seeded(seed);
        let mut worst = [0.0f64; Axiom::ALL.len()];
        let mut record = |axiom: Axiom, v: f64| {
            let slot = &mut worst[axiom as usize];
            // NaN counts as an infinite violation.
            *slot = if v.is_nan() { f64::INFINITY } else { slot.max(v) };
        };

        let one = self.identity();
        record(Axiom::IdentityNorm, (self.norm(&one)? - 1.0).abs());
        record(Axiom::ZeroNorm, self.norm(&self.zero())?);

        for _ in 0..sample_count {
            let x = self.random_element(&mut rng);
            let y = self.random_element(&mut rng);
            let z = self.random_element(&mut rng);
            let alpha = rng::uniform(&mut rng, -1.0, 1.0);
            let (nx, ny) = (self.norm(&x)?, self.norm(&y)?);

            let xy = self.mul(&x, &y)?;
            record(Axiom::Submultiplicative, self.norm(&xy)? - nx * ny);
            record(Axiom::Triangle, self.norm(&self.add(&x, &y)?)? - nx - ny);
            record(
                Axiom::Homogeneity,
                (self.norm(&self.scale(alpha, &x)?)? - alpha.abs() * nx).abs(),
            );
            record(Axiom::IdentityLaw, {
                let l = self.norm(&self.sub(&self.mul(&one, &x)?, &x)?)?;
                let r = self.norm(&self.sub(&self.mul(&x, &one)?, &x)?)?;
                l.max(r)
            });

            let lhs = self.mul(&xy, &z)?;
            let rhs = self.mul(&x, &self.mul(&y, &z)?)?;
            record(Axiom::Associativity, self.norm(&self.sub(&lhs, &rhs)?)?);

            let left = self.mul(&x, &self.add(&y, &z)?)?;
            let left_expanded = self.add(&xy, &self.mul(&x, &z)?)?;
            let right = self.mul(&self.add(&x, &y)?, &z)?;
            let right_expanded = self.add(&self.mul(&x, &z)?, &self.mul(&y, &z)?)?;
            record(
                Axiom::Distributivity,
                self.norm(&self.sub(&left, &left_expanded)?)?
                    .max(self.norm(&self.sub(&right, &right_expanded)?)?),
            );

            let a_xy = self.scale(alpha, &xy)?;
            let ax_y = self.mul(&self.scale(alpha, &x)?, &y)?;
            let x_ay = self.mul(&x, &self.scale(alpha, &y)?)?;
            record(
                Axiom::ScalarCompatibility,
                self.norm(&self.sub(&a_xy, &ax_y)?)?
                    .max(self.norm(&self.sub(&a_xy, &x_ay)?)?),
            );
        }

        Ok(AxiomReport {
            algebra: *self,
            samples: sample_count,
            seed,
            tol,
            violations: Axiom::ALL
                .iter()
                .map(|&axiom| AxiomViolation {
                    axiom,
                    worst: worst[axiom as usize].max(0.0),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Submultiplicative,
    Triangle,
    IdentityNorm,
    ZeroNorm,
    Homogeneity,
    IdentityLaw,
    Associativity,
    Distributivity,
    ScalarCompatibility,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Submultiplicative,
        Axiom::Triangle,
        Axiom::IdentityNorm,
        Axiom::ZeroNorm,
        Axiom::Homogeneity,
        Axiom::IdentityLaw,
        Axiom::Associativity,
        Axiom::Distributivity,
        Axiom::ScalarCompatibility,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Submultiplicative => "|xy| <= |x||y|",
            Axiom::Triangle => "|x+y| <= |x|+|y|",
            Axiom::IdentityNorm => "|1| = 1",
            Axiom::ZeroNorm => "|0| = 0",
            Axiom::Homogeneity => "|ax| = |a||x|",
            Axiom::IdentityLaw => "1x = x1 = x",
            Axiom::Associativity => "(xy)z = x(yz)",
            Axiom::Distributivity => "x(y+z) = xy+xz, (x+y)z = xz+yz",
            Axiom::ScalarCompatibility => "a(xy) = (ax)y = x(ay)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub algebra: Algebra,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.violations.iter().fold(0.0, |acc, v| acc.max(v.worst))
    }

    pub fn passes(&self) -> bool {
        self.violations.iter().all(|v| v.worst <= self.tol)
    }

    pub fn violation(&self, axiom: Axiom) -> f64 {
        self.violations
            .iter()
            .find(|v| v.axiom == axiom)
            .map_or(0.0, |v| v.worst)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ElementRepr {
    Real(f64),
    Complex([f64; 2]),
    Matrix(Vec<Vec<f64>>),
    Grid(Vec<f64>),
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        match e {
            Element::Real(x) => ElementRepr::Real(x),
            Element::Complex(z) => ElementRepr::Complex([z.re, z.im]),
            Element::Matrix(m) => ElementRepr::Matrix(m.row_iter().map(|row| row.iter().copied().collect()).collect()),
            Element::Grid(v) => ElementRepr::Grid(v),
        }
    }
}

impl TryFrom<ElementRepr> for Element {
    type Error = String;

    fn try_from(r: ElementRepr) -> std::result::Result<Self, Self::Error> {
        Ok(match r {
            ElementRepr::Real(x) => Element::Real(x),
            ElementRepr::Complex([re, im]) => Element::Complex(Complex64::new(re, im)),
            ElementRepr::Matrix(rows) => {
                let d = rows.len();
                if d == 0 || rows.iter().any(|row| row.len() != d) {
                    return Err("matrix element must be a non-empty square array".into());
                }
                Element::Matrix(DMatrix::from_row_iterator(d, d, rows.into_iter().flatten()))
            }
            ElementRepr::Grid(v) => Element::Grid(v),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_fn(points: usize, f: impl Fn(f64) -> f64) -> (Algebra, Element) {
        let alg = Algebra::grid(points).unwrap();
        let x = alg.sample(f).unwrap();
        (alg, x)
    }

    #[test]
    fn norms() {
        assert_eq!(Algebra::Real.norm(&Element::Real(-3.0)).unwrap(), 3.0);
        let m2 = Algebra::matrix(2).unwrap();
        assert_eq!(m2.norm(&m2.identity()).unwrap(), 1.0);
        let (g, b) = grid_fn(101, |r| 0.5 / (r + 1.0));
        assert_eq!(g.norm(&b).unwrap(), 0.5);
        assert_eq!(
            Algebra::Complex
                .norm(&Element::Complex(Complex64::new(3.0, 4.0)))
                .unwrap(),
            5.0
        );
    }

    #[test]
    fn matrix_norm_is_max_row_sum() {
        let m2 = Algebra::matrix(2).unwrap();
        let x = m2.from_components(&[1.0, -2.0, 0.5, 0.25]).unwrap();
        assert_eq!(m2.norm(&x).unwrap(), 3.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let m2 = Algebra::matrix(2).unwrap();
        let err = m2.norm(&Element::Real(1.0)).unwrap_err();
        assert!(matches!(err, AlgebraError::Shape { .. }));
        let g = Algebra::grid(3).unwrap();
        assert!(g
            .mul(&Element::Grid(vec![1.0; 3]), &Element::Grid(vec![1.0; 4]))
            .is_err());
    }

    #[test]
    fn products() {
        assert!(
            (Algebra::Real
                .mul(&Element::Real(0.5), &Element::Real(0.4))
                .unwrap()
                .as_real()
                .unwrap()
                - 0.2)
                .abs()
                < 1e-16
        );
        let m2 = Algebra::matrix(2).unwrap();
        let x = m2.from_components(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m2.mul(&x, &m2.identity()).unwrap(), x);
        let g = Algebra::grid(3).unwrap();
        let p = g
            .mul(&Element::Grid(vec![1.0, 2.0, 3.0]), &Element::Grid(vec![2.0; 3]))
            .unwrap();
        assert_eq!(p, Element::Grid(vec![2.0, 4.0, 6.0]));
    }

    #[test]
    fn matrix_product_is_not_commutative() {
        let m2 = Algebra::matrix(2).unwrap();
        let x = m2.from_components(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = m2.from_components(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_ne!(m2.mul(&x, &y).unwrap(), m2.mul(&y, &x).unwrap());
        assert!(!m2.is_commutative());
    }

    #[test]
    fn inverses() {
        let inv = Algebra::Real.try_inverse(&Element::Real(0.4), 1e-12).unwrap().unwrap();
        assert!((inv.as_real().unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(Algebra::Real.try_inverse(&Element::Real(0.0), 1e-12).unwrap(), None);
        assert!(Algebra::Real.try_inverse(&Element::Real(1.0), 0.0).is_err());

        let (g, b) = grid_fn(101, |r| 0.5 / (r + 1.0));
        let inv = g.try_inverse(&b, 1e-12).unwrap().unwrap();
        // pointwise reciprocal oracle
        let nodes = g.grid_nodes().unwrap();
        let Element::Grid(samples) = &inv else { panic!() };
        for (s, r) in samples.iter().zip(nodes) {
            assert!((s - (r + 1.0) / 0.5).abs() < 1e-12);
        }

        let (g, x) = grid_fn(11, |r| r - 0.5);
        assert_eq!(g.try_inverse(&x, 1e-9).unwrap(), None);

        let m2 = Algebra::matrix(2).unwrap();
        let singular = m2.from_components(&[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(m2.try_inverse(&singular, 1e-9).unwrap(), None);
        let x = m2.from_components(&[2.0, 1.0, 1.0, 1.0]).unwrap();
        let inv = m2.try_inverse(&x, 1e-12).unwrap().unwrap();
        assert_eq!(inv, m2.from_components(&[1.0, -1.0, -1.0, 2.0]).unwrap());
    }

    #[test]
    fn powers() {
        assert_eq!(
            Algebra::Real.power(&Element::Real(0.5), 3).unwrap(),
            Element::Real(0.125)
        );
        let m2 = Algebra::matrix(2).unwrap();
        let x = m2.from_components(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m2.power(&x, 0).unwrap(), m2.identity());
        let nil = m2.from_components(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        // direct multiplication oracle
        let direct = m2.mul(&nil, &nil).unwrap();
        assert_eq!(m2.power(&nil, 2).unwrap(), direct);
        assert_eq!(direct, m2.zero());
    }

    #[test]
    fn constants_and_identity() {
        let g = Algebra::grid(5).unwrap();
        assert_eq!(g.identity(), Element::Grid(vec![1.0; 5]));
        assert_eq!(g.grid_nodes().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Algebra::grid(1).is_err());
        assert!(Algebra::matrix(0).is_err());
    }

    #[test]
    fn axioms_hold_on_all_instances() {
        for (alg, tol) in [
            (Algebra::Real, 1e-12),
            (Algebra::Complex, 1e-12),
            (Algebra::Matrix { dim: 3 }, 1e-10),
            (Algebra::Grid { points: 51 }, 1e-12),
        ] {
            let report = alg.check_axioms(1000, 7, tol).unwrap();
            assert!(report.passes(), "{alg}: {:?}", report.violations);
        }
        assert!(Algebra::Real.check_axioms(0, 1, 1e-12).is_err());
    }

    #[test]
    fn element_json_round_trip() {
        let m2 = Algebra::matrix(2).unwrap();
        let x = m2.from_components(&[0.1, -2.0, 1.0 / 3.0, 4.0]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"matrix":[[0.1,-2.0],[0.3333333333333333,4.0]]}"#);
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Element>(r#"{"matrix":[[1.0],[2.0,3.0]]}"#).is_err());
    }
}
