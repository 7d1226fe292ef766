//! Nonlinear higher-order difference equations with linear arguments over
//! Banach algebras.
//!
//! * [`algebra`]: real, complex, matrix and sampled `C[0,1]` algebras.
//! * [`equations`]: the equations, their nonlinearities and iteration.
//! * [`reduction`]: order reduction through a common unit root.
//! * [`stability`]: sufficient conditions for global attractivity.
//! * [`scenarios`]: worked examples and the 2-cycle scan.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod equations;
pub mod reduction;
pub mod rng;
pub mod scenarios;
pub mod stability;

pub use algebra::{Algebra, AlgebraError, AxiomReport, Element};
pub use equations::{
    CoefficientRule, EnvelopeReport, EquationError, Family, LinearArgEquation, Nonlinearity, ScalarMap, Trajectory,
};
pub use reduction::{ReductionError, ReductionResult};
pub use scenarios::{BifurcationScan, Regime, Scenario, ScenarioError};
pub use stability::{Criterion, StabilityError, StabilityReport, Verdict};
