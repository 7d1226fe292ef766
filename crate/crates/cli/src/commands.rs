use std::fmt::Write;

use linarg::reduction::{reduce_order, split_consistency_check, ReductionError};
use linarg::scenarios::bifurcation_scan;
use linarg::stability::{self, check_attractivity, StabilityError};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{fmt_f64, CliError};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Reduce,
    Check,
    Scan,
    Axioms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Reduce => "reduce",
            Command::Check => "check",
            Command::Scan => "scan",
            Command::Axioms => "axioms",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Simulate | Command::Scan => Format::Csv,
            Command::Reduce | Command::Check | Command::Axioms => Format::Json,
        }
    }

    fn supports(self, format: Format) -> bool {
        format == Format::Json || matches!(self, Command::Simulate | Command::Scan)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// The CSV or JSON document, newline-terminated.
    pub artifact: String,
    pub report: String,
    pub exit_code: i32,
}

/// Runs one subcommand. `format` falls back to CSV for `simulate` and
/// `scan`, JSON otherwise.
pub fn run(command: Command, config: &RunConfig, format: Option<Format>) -> Result<Outcome> {
    let format = format.unwrap_or(command.default_format());
    if !command.supports(format) {
        return Err(CliError::Config(format!("{} only writes json", command.name())));
    }
    match command {
        Command::Simulate => simulate(config, format),
        Command::Reduce => reduce(config),
        Command::Check => check(config),
        Command::Scan => scan(config, format),
        Command::Axioms => axioms(config),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializing a JSON value cannot fail");
    s.push('\n');
    s
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(CliError::numeric)
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<32} {value}");
}

fn num(out: &mut String, key: &str, value: f64) {
    line(out, key, fmt_f64(value));
}

fn simulate(cfg: &RunConfig, format: Format) -> Result<Outcome> {
    let eq = cfg.require_equation()?;
    let init = cfg.initial_values()?;
    let traj = eq.iterate(&init, cfg.steps).map_err(CliError::numeric)?;
    let alpha = stability::alpha_direct(eq).map_err(CliError::numeric)?;
    let envelope = if alpha > 0.0 && alpha < 1.0 {
        Some(
            traj.envelope_check(alpha, cfg.envelope_tol)
                .map_err(CliError::numeric)?,
        )
    } else {
        None
    };
    let k = traj.delay() as i64;

    let artifact = match format {
        Format::Csv => {
            let width = cfg.algebra.component_count();
            let mut s = String::from("n,norm");
            for c in 0..width {
                let _ = write!(s, ",c{c}");
            }
            s.push('\n');
            for (i, (x, norm)) in traj.values().iter().zip(traj.norms()).enumerate() {
                let _ = write!(s, "{},{}", i as i64 - k, fmt_f64(*norm));
                for c in x.components() {
                    let _ = write!(s, ",{}", fmt_f64(c));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = traj
                .values()
                .iter()
                .zip(traj.norms())
                .enumerate()
                .map(|(i, (x, norm))| json!({ "n": i as i64 - k, "norm": norm, "components": x.components() }))
                .collect();
            pretty(&json!({
                "algebra": to_json(&cfg.algebra)?,
                "delay": k,
                "mu": traj.mu(),
                "diverged": traj.diverged(),
                "alpha_direct": alpha,
                "envelope": to_json(&envelope)?,
                "rows": rows,
            }))
        }
    };

    let mut report = String::new();
    if let Some(shape) = cfg.shape {
        line(&mut report, "shape", shape.name());
    }
    line(&mut report, "algebra", cfg.algebra);
    line(&mut report, "steps", traj.steps());
    num(&mut report, "mu", traj.mu());
    num(&mut report, "final norm", traj.final_norm());
    line(&mut report, "diverged", traj.diverged());
    num(&mut report, "alpha direct", alpha);
    match &envelope {
        Some(e) => {
            let status = if e.holds { "holds" } else { "VIOLATED" };
            line(
                &mut report,
                "envelope",
                format!(
                    "{status} over {} values, worst margin {}",
                    e.checked,
                    fmt_f64(e.worst_margin)
                ),
            );
            if let Some(n) = e.first_violation {
                line(&mut report, "first violation", n);
            }
        }
        None => line(&mut report, "envelope", "not applicable (alpha direct not in (0, 1))"),
    }
    Ok(Outcome {
        artifact,
        report,
        exit_code: 0,
    })
}

fn root_for(cfg: &RunConfig) -> Result<&linarg::Element> {
    cfg.root.as_ref().ok_or_else(|| {
        CliError::Config("reduce needs a candidate root: add [root] value or use a shape with a built-in root".into())
    })
}

fn reduce(cfg: &RunConfig) -> Result<Outcome> {
    let eq = cfg.require_equation()?;
    let rho = root_for(cfg)?;
    let mut report = String::new();
    let doc = match reduce_order(eq, rho, cfg.root_tol) {
        Ok(red) => {
            let init = cfg.initial_values()?;
            let dev = split_consistency_check(eq, rho, &init, cfg.steps, cfg.root_tol).map_err(CliError::numeric)?;
            line(&mut report, "status", "ok");
            num(&mut report, "|P(rho)|", red.residual_p);
            num(&mut report, "|Q(rho)|", red.residual_q);
            num(&mut report, "split deviation", dev);
            json!({
                "status": "ok",
                "root_tol": cfg.root_tol,
                "reduction": to_json(&red)?,
                "split_check": { "steps": cfg.steps, "deviation": dev },
            })
        }
        Err(ReductionError::RootRejected {
            residual_p,
            residual_q,
            root_tol,
        }) => {
            line(&mut report, "status", "root rejected");
            num(&mut report, "|P(rho)|", residual_p);
            num(&mut report, "|Q(rho)|", residual_q);
            num(&mut report, "root tolerance", root_tol);
            json!({
                "status": "root_rejected",
                "root_tol": root_tol,
                "residual_p": residual_p,
                "residual_q": residual_q,
            })
        }
        Err(ReductionError::NotAUnit) => {
            line(&mut report, "status", "root is not a unit");
            json!({ "status": "not_a_unit", "root_tol": cfg.root_tol })
        }
        Err(e) => return Err(CliError::numeric(e)),
    };
    Ok(Outcome {
        artifact: pretty(&doc),
        report,
        exit_code: 0,
    })
}

fn check(cfg: &RunConfig) -> Result<Outcome> {
    let eq = cfg.require_equation()?;
    let (report, rejected) = match check_attractivity(eq, cfg.root.as_ref(), cfg.root_tol) {
        Ok(r) => (r, Value::Null),
        Err(StabilityError::Reduction(ReductionError::RootRejected {
            residual_p,
            residual_q,
            root_tol,
        })) => {
            let r = check_attractivity(eq, None, cfg.root_tol).map_err(CliError::numeric)?;
            (
                r,
                json!({ "residual_p": residual_p, "residual_q": residual_q, "root_tol": root_tol }),
            )
        }
        Err(StabilityError::Reduction(ReductionError::NotAUnit)) => {
            let r = check_attractivity(eq, None, cfg.root_tol).map_err(CliError::numeric)?;
            (r, json!({ "not_a_unit": true }))
        }
        Err(e) => return Err(CliError::numeric(e)),
    };
    let mut table = String::new();
    if let Some(shape) = cfg.shape {
        line(&mut table, "shape", shape.name());
    }
    if !rejected.is_null() {
        line(&mut table, "candidate root", "rejected, factored bound skipped");
    }
    table.push_str(&report.table());
    let doc = json!({ "report": to_json(&report)?, "root_rejected": rejected });
    Ok(Outcome {
        artifact: pretty(&doc),
        report: table,
        exit_code: 0,
    })
}

fn scan(cfg: &RunConfig, format: Format) -> Result<Outcome> {
    let s = cfg
        .scan
        .ok_or_else(|| CliError::Config("scan needs a [scan] section".into()))?;
    let result = bifurcation_scan(s.b, s.sigma, s.a_min, s.a_max, s.points).map_err(CliError::numeric)?;
    let artifact = match format {
        Format::Csv => result.to_csv(),
        Format::Json => pretty(&to_json(&result)?),
    };
    let mut report = String::new();
    num(&mut report, "b", s.b);
    num(&mut report, "sigma", s.sigma);
    for (regime, lo, hi) in result.bands() {
        let _ = writeln!(report, "{regime:<32} a in [{}, {}]", fmt_f64(lo), fmt_f64(hi));
    }
    Ok(Outcome {
        artifact,
        report,
        exit_code: 0,
    })
}

fn axioms(cfg: &RunConfig) -> Result<Outcome> {
    let s = cfg.axioms;
    let result = cfg
        .algebra
        .check_axioms(s.samples, cfg.seed, s.tol)
        .map_err(CliError::numeric)?;
    let mut report = String::new();
    line(&mut report, "algebra", cfg.algebra);
    line(&mut report, "samples", result.samples);
    line(&mut report, "seed", result.seed);
    num(&mut report, "tolerance", result.tol);
    for v in &result.violations {
        let status = if v.worst <= result.tol { "ok" } else { "FAIL" };
        let _ = writeln!(report, "{:<32} {:<24} {status}", v.axiom.label(), fmt_f64(v.worst));
    }
    line(&mut report, "result", if result.passes() { "pass" } else { "fail" });
    let exit_code = if result.passes() { 0 } else { 2 };
    Ok(Outcome {
        artifact: pretty(&to_json(&result)?),
        report,
        exit_code,
    })
}
