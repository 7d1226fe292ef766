//! TOML run configuration.
//!
//! Sections are read key by key so that every diagnostic names the offending
//! key and leftover keys are reported instead of silently ignored. See the
//! README for the full schema and one example per equation shape.

use linarg::algebra::DEFAULT_GRID_POINTS;
use linarg::equations::{CoefficientRule, Family, LinearArgEquation, Nonlinearity, ScalarMap};
use linarg::reduction::default_root_tol;
use linarg::scenarios::{self, IntegralParams, Scenario, TanhParams};
use linarg::{Algebra, Element};
use toml::{Table, Value};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Equation shapes understood by the `[equation]` section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    General,
    LinearRoot,
    ArgumentRoot,
    SecondOrder,
    DelayedTanh,
    IntegralC01,
    TanhSecondOrder,
}

impl Shape {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "general" => Shape::General,
            "linear_root" | "gla0" => Shape::LinearRoot,
            "argument_root" | "gla1" => Shape::ArgumentRoot,
            "second_order" | "gla2" => Shape::SecondOrder,
            "delayed_tanh" | "dham" => Shape::DelayedTanh,
            "integral_c01" | "c01" => Shape::IntegralC01,
            "tanh_second_order" | "th" => Shape::TanhSecondOrder,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::General => "general",
            Shape::LinearRoot => "linear_root",
            Shape::ArgumentRoot => "argument_root",
            Shape::SecondOrder => "second_order",
            Shape::DelayedTanh => "delayed_tanh",
            Shape::IntegralC01 => "integral_c01",
            Shape::TanhSecondOrder => "tanh_second_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// `x_{−k}, .., x_0`, oldest first.
    Explicit(Vec<Element>),
    /// Components uniform in `[−scale, scale)`, seeded by [`RunConfig::seed`].
    Random { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub b: f64,
    pub sigma: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomSettings {
    pub samples: usize,
    pub tol: f64,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algebra: Algebra,
    pub shape: Option<Shape>,
    pub equation: Option<LinearArgEquation>,
    /// Candidate common root: `[root]` if given, else the shape's own root.
    pub root: Option<Element>,
    pub initial: Initial,
    pub steps: usize,
    pub seed: u64,
    pub root_tol: f64,
    pub envelope_tol: f64,
    pub scan: Option<ScanSettings>,
    pub axioms: AxiomSettings,
}

impl RunConfig {
    /// Initial values `x_{−k}, .., x_0` for the configured equation.
    pub fn initial_values(&self) -> Result<Vec<Element>> {
        let eq = self.require_equation()?;
        let order = eq.order();
        match &self.initial {
            Initial::Explicit(values) => {
                if values.len() != order {
                    return Err(CliError::Config(format!(
                        "initial.values: expected {order} values (x_-k .. x_0), got {}",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
            Initial::Random { scale } => {
                let mut r = linarg::rng::seeded(self.seed);
                (0..order)
                    .map(|_| {
                        let e = self.algebra.random_element(&mut r);
                        self.algebra.scale(*scale, &e).map_err(CliError::numeric)
                    })
                    .collect()
            }
        }
    }

    pub fn require_equation(&self) -> Result<&LinearArgEquation> {
        self.equation
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no [equation] section".into()))
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("TOML syntax: {e}")))?;

    let mut eq_sec = Section::take(&mut doc, "equation")?;
    let shape = match &mut eq_sec {
        Some(s) => {
            let name = s.req_string("shape")?;
            Some(
                Shape::parse(&name)
                    .ok_or_else(|| CliError::Config(format!("equation.shape: unknown shape `{name}`")))?,
            )
        }
        None => None,
    };

    let mut alg_sec = Section::take(&mut doc, "algebra")?;
    let algebra = parse_algebra(alg_sec.as_mut(), shape)?;
    if let Some(s) = alg_sec {
        s.finish()?;
    }

    let nl_sec = Section::take(&mut doc, "nonlinearity")?;
    let (equation, shape_root, tanh) = match (shape, eq_sec) {
        (Some(shape), Some(mut s)) => {
            let (scenario, tanh) = build_equation(shape, &algebra, &mut s, nl_sec)?;
            s.finish()?;
            (Some(scenario.0), scenario.1, tanh)
        }
        _ => {
            if nl_sec.is_some() {
                return Err(CliError::Config("[nonlinearity] given without [equation]".into()));
            }
            (None, None, None)
        }
    };

    let root = match Section::take(&mut doc, "root")? {
        Some(mut s) => {
            let v = s.req_value("value")?;
            s.finish()?;
            Some(element(&algebra, &v, "root.value")?)
        }
        None => shape_root,
    };

    let initial = match Section::take(&mut doc, "initial")? {
        Some(mut s) => {
            let values = s.list("values")?;
            let scale = s.f64("scale")?;
            s.finish()?;
            match (values, scale) {
                (Some(_), Some(_)) => return Err(CliError::Config("initial: give either values or scale".into())),
                (Some(vs), None) => Initial::Explicit(
                    vs.iter()
                        .enumerate()
                        .map(|(i, v)| element(&algebra, v, &format!("initial.values[{i}]")))
                        .collect::<Result<_>>()?,
                ),
                (None, scale) => {
                    let scale = scale.unwrap_or(1.0);
                    check(scale.is_finite() && scale > 0.0, "initial.scale", "scale > 0")?;
                    Initial::Random { scale }
                }
            }
        }
        None => Initial::Random { scale: 1.0 },
    };

    let mut run = Section::take(&mut doc, "run")?;
    let steps = opt(run.as_mut(), |s| s.usize("steps"))?.unwrap_or(100);
    let seed = opt(run.as_mut(), |s| s.u64("seed"))?.unwrap_or(0);
    let root_tol = opt(run.as_mut(), |s| s.f64("root_tol"))?.unwrap_or_else(|| default_root_tol(&algebra));
    let envelope_tol = opt(run.as_mut(), |s| s.f64("envelope_tol"))?.unwrap_or(1e-9);
    if let Some(s) = run {
        s.finish()?;
    }
    check(root_tol > 0.0, "run.root_tol", "root_tol > 0")?;
    check(envelope_tol >= 0.0, "run.envelope_tol", "envelope_tol >= 0")?;

    let scan = match Section::take(&mut doc, "scan")? {
        Some(mut s) => {
            let b = s.f64("b")?.or(tanh.map(|t| t.b));
            let sigma = s.f64("sigma")?.or(tanh.map(|t| t.sigma));
            let a_min = s.req_f64("a_min")?;
            let a_max = s.req_f64("a_max")?;
            let points = s.usize("points")?.unwrap_or(201);
            s.finish()?;
            let missing = |k: &str| {
                CliError::Config(format!(
                    "scan.{k}: required unless the equation shape is tanh_second_order"
                ))
            };
            let settings = ScanSettings {
                b: b.ok_or_else(|| missing("b"))?,
                sigma: sigma.ok_or_else(|| missing("sigma"))?,
                a_min,
                a_max,
                points,
            };
            check(settings.points >= 2, "scan.points", "points >= 2")?;
            check(a_min < a_max, "scan.a_min", "a_min < a_max")?;
            check(settings.b > 0.0 && settings.b < 1.0, "scan.b", "0 < b < 1")?;
            check(settings.sigma > 0.0, "scan.sigma", "sigma > 0")?;
            Some(settings)
        }
        None => None,
    };

    let mut ax = Section::take(&mut doc, "axioms")?;
    let samples = opt(ax.as_mut(), |s| s.usize("samples"))?.unwrap_or(1000);
    let default_tol = if matches!(algebra, Algebra::Matrix { .. }) {
        1e-10
    } else {
        1e-12
    };
    let tol = opt(ax.as_mut(), |s| s.f64("tol"))?.unwrap_or(default_tol);
    if let Some(s) = ax {
        s.finish()?;
    }
    check(samples >= 1, "axioms.samples", "samples >= 1")?;

    if let Some(key) = doc.keys().next() {
        return Err(CliError::Config(format!("unknown section `{key}`")));
    }

    Ok(RunConfig {
        algebra,
        shape,
        equation,
        root,
        initial,
        steps,
        seed,
        root_tol,
        envelope_tol,
        scan,
        axioms: AxiomSettings { samples, tol },
    })
}

fn check(ok: bool, key: &str, condition: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: {condition} violated")))
    }
}

fn opt<T>(s: Option<&mut Section>, f: impl FnOnce(&mut Section) -> Result<Option<T>>) -> Result<Option<T>> {
    match s {
        Some(s) => f(s),
        None => Ok(None),
    }
}

fn parse_algebra(sec: Option<&mut Section>, shape: Option<Shape>) -> Result<Algebra> {
    let default_kind = if shape == Some(Shape::IntegralC01) {
        "grid"
    } else {
        "real"
    };
    let Some(s) = sec else {
        return Ok(if default_kind == "grid" {
            Algebra::Grid {
                points: DEFAULT_GRID_POINTS,
            }
        } else {
            Algebra::Real
        });
    };
    let kind = s.string("kind")?.unwrap_or_else(|| default_kind.to_string());
    let alg = match kind.as_str() {
        "real" => Algebra::Real,
        "complex" => Algebra::Complex,
        "matrix" => {
            let dim = s
                .usize("dim")?
                .ok_or_else(|| CliError::Config("algebra.dim: required for kind matrix".into()))?;
            Algebra::matrix(dim).map_err(|e| CliError::Config(format!("algebra.dim: {e}")))?
        }
        "grid" => {
            let points = s.usize("points")?.unwrap_or(DEFAULT_GRID_POINTS);
            Algebra::grid(points).map_err(|e| CliError::Config(format!("algebra.points: {e}")))?
        }
        other => return Err(CliError::Config(format!("algebra.kind: unknown kind `{other}`"))),
    };
    Ok(alg)
}

type Built = ((LinearArgEquation, Option<Element>), Option<TanhParams>);

fn build_equation(shape: Shape, alg: &Algebra, s: &mut Section, nl: Option<Section>) -> Result<Built> {
    let real_only = |what: &str| -> Result<()> {
        if *alg == Algebra::Real {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "equation.shape: {what} requires algebra kind real"
            )))
        }
    };
    let elements = |s: &mut Section, key: &str| -> Result<Vec<Element>> {
        let list = s.req_list(key)?;
        list.iter()
            .enumerate()
            .map(|(i, v)| element(alg, v, &format!("equation.{key}[{i}]")))
            .collect()
    };
    let one = |s: &mut Section, key: &str| -> Result<Element> {
        let v = s.req_value(key)?;
        element(alg, &v, &format!("equation.{key}"))
    };

    let scenario =
        |r: std::result::Result<Scenario, scenarios::ScenarioError>| -> Result<(LinearArgEquation, Option<Element>)> {
            let sc = r.map_err(CliError::config)?;
            Ok((sc.equation, Some(sc.root)))
        };

    Ok(match shape {
        Shape::General => {
            let linear = elements(s, "linear")?;
            let argument = elements(s, "argument")?;
            let g = nonlinearity(nl, alg, None)?;
            let eq = LinearArgEquation::new(*alg, linear, argument, g).map_err(CliError::config)?;
            ((eq, None), None)
        }
        Shape::LinearRoot => {
            let a = one(s, "a")?;
            let argument = elements(s, "argument")?;
            let g = nonlinearity(nl, alg, None)?;
            (scenario(scenarios::linear_root_shape(*alg, a, argument, g))?, None)
        }
        Shape::ArgumentRoot => {
            let linear = elements(s, "linear")?;
            let b = one(s, "b")?;
            let g = nonlinearity(nl, alg, None)?;
            (scenario(scenarios::argument_root_shape(*alg, linear, b, g))?, None)
        }
        Shape::SecondOrder => {
            let a0 = one(s, "a0")?;
            let b = one(s, "b")?;
            let g = nonlinearity(nl, alg, None)?;
            (scenario(scenarios::second_order_shape(*alg, a0, b, g))?, None)
        }
        Shape::DelayedTanh => {
            real_only("delayed_tanh")?;
            let a = s.req_f64("a")?;
            let k = s
                .usize("k")?
                .ok_or_else(|| CliError::Config("equation.k: required".into()))?;
            let g = nonlinearity(nl, alg, Some(Family::PointwiseTanh))?;
            let sc = scenarios::delayed_tanh(a, k, g.sigma(), g.coefficients().clone());
            (scenario(sc)?, None)
        }
        Shape::IntegralC01 => {
            let Algebra::Grid { points } = *alg else {
                return Err(CliError::Config(
                    "equation.shape: integral_c01 requires algebra kind grid".into(),
                ));
            };
            let alpha = s.req_f64("alpha")?;
            let beta = s.req_f64("beta")?;
            let g = nonlinearity(nl, alg, Some(Family::CumulativeIntegral { phi: ScalarMap::Sin }))?;
            let Family::CumulativeIntegral { phi } = g.family() else {
                unreachable!("family forced above")
            };
            let params = IntegralParams {
                alpha,
                beta,
                sigma: g.sigma(),
                points,
                phi,
                multipliers: Some(g.coefficients().clone()),
            };
            (scenario(scenarios::integral_c01(&params))?, None)
        }
        Shape::TanhSecondOrder => {
            real_only("tanh_second_order")?;
            let a = s.req_f64("a")?;
            let b = s.req_f64("b")?;
            let g = nonlinearity(nl, alg, Some(Family::PointwiseTanh))?;
            if *g.coefficients() != (CoefficientRule::Constant { value: g.sigma() }) {
                return Err(CliError::Config(
                    "nonlinearity.rule: tanh_second_order uses the constant multiplier sigma".into(),
                ));
            }
            let p = TanhParams::new(a, b, g.sigma()).map_err(CliError::config)?;
            (scenario(p.scenario())?, Some(p))
        }
    })
}

fn parse_family(name: &str, phi: Option<ScalarMap>) -> Option<Family> {
    Some(match name {
        "linear_scale" | "linear" => Family::LinearScale,
        "norm_saturated" | "saturated" => Family::NormSaturated,
        "pointwise_tanh" | "tanh" => Family::PointwiseTanh,
        "pointwise_sin" | "sin" => Family::PointwiseSin,
        "cumulative_integral" | "integral" => Family::CumulativeIntegral {
            phi: phi.unwrap_or(ScalarMap::Sin),
        },
        "rational_cubic" | "cubic" => Family::RationalCubic,
        _ => return None,
    })
}

fn parse_map(name: &str) -> Option<ScalarMap> {
    Some(match name {
        "sin" => ScalarMap::Sin,
        "tanh" => ScalarMap::Tanh,
        "atan" => ScalarMap::Atan,
        _ => return None,
    })
}

/// Reads `[nonlinearity]`. Shapes with a fixed family pass it as `forced`;
/// an explicit `family` key must then agree with it.
fn nonlinearity(sec: Option<Section>, alg: &Algebra, forced: Option<Family>) -> Result<Nonlinearity> {
    let mut s = sec.ok_or_else(|| CliError::Config("[nonlinearity] section is required".into()))?;
    let phi = match s.string("phi")? {
        Some(name) => {
            Some(parse_map(&name).ok_or_else(|| CliError::Config(format!("nonlinearity.phi: unknown map `{name}`")))?)
        }
        None => None,
    };
    let family = match (s.string("family")?, forced) {
        (Some(name), forced) => {
            let f = parse_family(&name, phi)
                .ok_or_else(|| CliError::Config(format!("nonlinearity.family: unknown family `{name}`")))?;
            if let Some(want) = forced {
                if std::mem::discriminant(&f) != std::mem::discriminant(&want) {
                    return Err(CliError::Config(format!(
                        "nonlinearity.family: this shape requires family {}",
                        want.name()
                    )));
                }
            }
            f
        }
        (None, Some(Family::CumulativeIntegral { .. })) => Family::CumulativeIntegral {
            phi: phi.unwrap_or(ScalarMap::Sin),
        },
        (None, Some(f)) => f,
        (None, None) => return Err(CliError::Config("nonlinearity.family: required".into())),
    };
    if phi.is_some() && !matches!(family, Family::CumulativeIntegral { .. }) {
        return Err(CliError::Config(
            "nonlinearity.phi: only used by family cumulative_integral".into(),
        ));
    }
    if !family.supports(alg) {
        return Err(CliError::Config(format!(
            "nonlinearity.family: {} is not defined on the {alg} algebra",
            family.name()
        )));
    }
    let sigma = s.req_f64("sigma")?;
    check(sigma.is_finite() && sigma > 0.0, "nonlinearity.sigma", "sigma > 0")?;
    let rule = s.string("rule")?.unwrap_or_else(|| "constant".into());
    let coefficients = match rule.as_str() {
        "constant" => CoefficientRule::Constant {
            value: s.f64("value")?.unwrap_or(sigma),
        },
        "periodic" => {
            let values = s.req_list("values")?;
            let values = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    number(v).ok_or_else(|| CliError::Config(format!("nonlinearity.values[{i}]: expected a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            CoefficientRule::Periodic { values }
        }
        "random" | "seeded_random" => CoefficientRule::SeededRandom {
            seed: s.u64("seed")?.unwrap_or(0),
            bound: s.f64("bound")?.unwrap_or(sigma),
        },
        other => return Err(CliError::Config(format!("nonlinearity.rule: unknown rule `{other}`"))),
    };
    s.finish()?;
    Nonlinearity::new(family, sigma, coefficients).map_err(CliError::config)
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// Element literals: a number `c` means `c·1`; complex `[re, im]`; matrix
/// nested rows; grid an array of all samples.
pub fn element(alg: &Algebra, v: &Value, key: &str) -> Result<Element> {
    if let Some(c) = number(v) {
        return Ok(alg.constant(c));
    }
    let bad = |want: String| CliError::Config(format!("{key}: expected {want}"));
    let Value::Array(items) = v else {
        return Err(bad(format!("a number or an array for the {alg} algebra")));
    };
    let flat = |items: &[Value], want: &str| -> Result<Vec<f64>> {
        items
            .iter()
            .map(|x| number(x).ok_or_else(|| bad(want.to_string())))
            .collect()
    };
    match alg {
        Algebra::Real => Err(bad("a number".into())),
        Algebra::Complex => {
            let c = flat(items, "[re, im]")?;
            if c.len() != 2 {
                return Err(bad("[re, im]".into()));
            }
            alg.from_components(&c).map_err(CliError::config)
        }
        Algebra::Matrix { dim } => {
            let want = format!("a {dim}x{dim} matrix as nested rows");
            if items.len() != *dim {
                return Err(bad(want));
            }
            let mut comps = Vec::with_capacity(dim * dim);
            for row in items {
                let Value::Array(row) = row else { return Err(bad(want)) };
                if row.len() != *dim {
                    return Err(bad(want));
                }
                comps.extend(flat(row, &want)?);
            }
            alg.from_components(&comps).map_err(CliError::config)
        }
        Algebra::Grid { points } => {
            let want = format!("{points} samples");
            let c = flat(items, &want)?;
            if c.len() != *points {
                return Err(bad(want));
            }
            alg.from_components(&c).map_err(CliError::config)
        }
    }
}

/// A TOML table consumed key by key.
struct Section {
    name: String,
    table: Table,
}

impl Section {
    fn take(doc: &mut Table, name: &str) -> Result<Option<Section>> {
        match doc.remove(name) {
            None => Ok(None),
            Some(Value::Table(table)) => Ok(Some(Section {
                name: name.to_string(),
                table,
            })),
            Some(_) => Err(CliError::Config(format!("`{name}` must be a table"))),
        }
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn finish(self) -> Result<()> {
        match self.table.keys().next() {
            Some(k) => Err(CliError::Config(format!("unknown key `{}`", self.key(k)))),
            None => Ok(()),
        }
    }

    fn value(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn req_value(&mut self, key: &str) -> Result<Value> {
        self.value(key)
            .ok_or_else(|| CliError::Config(format!("{}: required", self.key(key))))
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.value(key) {
            None => Ok(None),
            Some(v) => number(&v)
                .map(Some)
                .ok_or_else(|| CliError::Config(format!("{}: expected a number", self.key(key)))),
        }
    }

    fn req_f64(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| CliError::Config(format!("{}: required", self.key(key))))
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(_) => Err(CliError::Config(format!(
                "{}: expected a non-negative integer",
                self.key(key)
            ))),
        }
    }

    /// Seeds: a non-negative integer, or a decimal string for the full `u64`
    /// range (TOML integers are signed 64-bit).
    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(Value::String(s)) if s.parse::<u64>().is_ok() => Ok(s.parse().ok()),
            Some(_) => Err(CliError::Config(format!(
                "{}: expected an unsigned 64-bit integer",
                self.key(key)
            ))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(CliError::Config(format!("{}: expected a string", self.key(key)))),
        }
    }

    fn req_string(&mut self, key: &str) -> Result<String> {
        self.string(key)?
            .ok_or_else(|| CliError::Config(format!("{}: required", self.key(key))))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<Value>>> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(_) => Err(CliError::Config(format!("{}: expected an array", self.key(key)))),
        }
    }

    fn req_list(&mut self, key: &str) -> Result<Vec<Value>> {
        self.list(key)?
            .ok_or_else(|| CliError::Config(format!("{}: required", self.key(key))))
    }
}
