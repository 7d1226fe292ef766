//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p linarg-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use linarg::algebra::Algebra;
use linarg::equations::{CoefficientRule, Family, LinearArgEquation, Nonlinearity, ScalarMap};
use linarg::reduction::{reduce_order, split_consistency_check};
use linarg::rng::{self, SeededRng};
use linarg::scenarios::{self, IntegralParams, ProbeOutcome, Regime, Scenario, TanhParams};
use linarg::stability::{self, Criterion};
use linarg::Element;

type Outcome = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Outcome);
/// Artifact bytes, stdout bytes and exit code of one CLI run.
type RunOutput = (Vec<u8>, Vec<u8>, Option<i32>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn axioms() -> Outcome {
    let start = Instant::now();
    let mut worst_all: f64 = 0.0;
    for (alg, tol) in [
        (Algebra::Real, 1e-12),
        (Algebra::Complex, 1e-12),
        (Algebra::Matrix { dim: 3 }, 1e-10),
        (Algebra::Grid { points: 101 }, 1e-12),
    ] {
        let report = alg.check_axioms(1000, 20_240, tol).map_err(|e| e.to_string())?;
        ensure(report.passes(), || {
            format!("{alg}: worst violation {:e} > {tol:e}", report.worst())
        })?;
        worst_all = worst_all.max(report.worst());
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "4 algebras x 1000 samples, worst violation {worst_all:e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn random_equation(r: &mut SeededRng, alg: Algebra) -> Option<LinearArgEquation> {
    let k = (rng::unit(r) * 4.0) as usize;
    let scale = rng::uniform(r, 0.05, 0.6);
    let mut coeffs = || -> Vec<Element> {
        (0..=k)
            .map(|_| alg.scale(scale, &alg.random_element(r)).unwrap())
            .collect()
    };
    let linear = coeffs();
    let argument = coeffs();
    let families: &[Family] = match alg {
        Algebra::Real => &[
            Family::PointwiseTanh,
            Family::PointwiseSin,
            Family::RationalCubic,
            Family::LinearScale,
        ],
        Algebra::Grid { .. } => &[
            Family::CumulativeIntegral { phi: ScalarMap::Atan },
            Family::PointwiseSin,
        ],
        _ => &[Family::NormSaturated, Family::LinearScale],
    };
    let family = families[(rng::unit(r) * families.len() as f64) as usize];
    let sigma = rng::uniform(r, 0.05, 1.0);
    let rule = CoefficientRule::SeededRandom {
        seed: rng::unit(r).to_bits(),
        bound: sigma,
    };
    let g = Nonlinearity::new(family, sigma, rule).ok()?;
    LinearArgEquation::new(alg, linear, argument, g).ok()
}

fn envelope() -> Outcome {
    let start = Instant::now();
    let algebras = [
        Algebra::Real,
        Algebra::Complex,
        Algebra::Matrix { dim: 3 },
        Algebra::Grid { points: 101 },
    ];
    let mut r = rng::seeded(31_337);
    let mut accepted = 0;
    while accepted < 100 {
        let alg = algebras[accepted % algebras.len()];
        let Some(eq) = random_equation(&mut r, alg) else {
            continue;
        };
        let alpha = stability::alpha_direct(&eq).map_err(|e| e.to_string())?;
        if !(alpha > 0.0 && alpha < 1.0) {
            continue;
        }
        let init: Vec<Element> = (0..eq.order())
            .map(|_| {
                alg.scale(rng::uniform(&mut r, 0.1, 5.0), &alg.random_element(&mut r))
                    .unwrap()
            })
            .collect();
        let traj = eq.iterate(&init, 300).map_err(|e| e.to_string())?;
        let report = traj.envelope_check(alpha, 1e-9).map_err(|e| e.to_string())?;
        ensure(report.holds, || {
            format!(
                "equation {accepted} on {alg}: violation at n = {:?}",
                report.first_violation
            )
        })?;
        accepted += 1;
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "100 equations over 4 algebras, n <= 300, zero violations, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

/// Non-commuting 2x2 coefficients `a_0, a_1, a_2` with `a_2` solved from
/// `P(b) = 0`, argument `x_n − b x_{n−1}`.
fn matrix_argument_root() -> Result<Scenario, String> {
    let alg = Algebra::Matrix { dim: 2 };
    let m = |c: [f64; 4]| alg.from_components(&c).unwrap();
    let b = m([0.5, 0.2, -0.1, 0.3]);
    let a0 = m([0.2, -0.1, 0.3, 0.1]);
    let a1 = m([0.05, 0.1, 0.0, -0.05]);
    ensure(alg.mul(&a0, &b).unwrap() != alg.mul(&b, &a0).unwrap(), || {
        "coefficients commute".into()
    })?;
    let mut a2 = alg.power(&b, 3).unwrap();
    a2 = alg
        .sub(&a2, &alg.mul(&a0, &alg.power(&b, 2).unwrap()).unwrap())
        .unwrap();
    a2 = alg.sub(&a2, &alg.mul(&a1, &b).unwrap()).unwrap();
    let g = Nonlinearity::new(
        Family::NormSaturated,
        0.3,
        CoefficientRule::SeededRandom { seed: 5, bound: 0.3 },
    )
    .map_err(|e| e.to_string())?;
    scenarios::argument_root_shape(alg, vec![a0, a1, a2], b, g).map_err(|e| e.to_string())
}

fn factorization() -> Outcome {
    let dham = scenarios::delayed_tanh(0.5, 2, 0.6, CoefficientRule::SeededRandom { seed: 9, bound: 0.6 })
        .map_err(|e| e.to_string())?;
    let gla2 = scenarios::second_order_shape(
        Algebra::Real,
        Element::Real(0.5),
        Element::Real(0.4),
        Nonlinearity::constant(Family::PointwiseSin, 0.3).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let c01 = scenarios::integral_c01(&IntegralParams::new(1.5, 0.5, 0.4)).map_err(|e| e.to_string())?;
    let matrix = matrix_argument_root()?;

    let mut worst: f64 = 0.0;
    for (name, s) in [
        ("delayed tanh", &dham),
        ("second order", &gla2),
        ("integral", &c01),
        ("matrix", &matrix),
    ] {
        let alg = *s.equation.algebra();
        let tol = linarg::reduction::default_root_tol(&alg);
        for seed in 0..10 {
            let mut r = rng::seeded(1000 + seed);
            let init: Vec<Element> = (0..s.equation.order())
                .map(|_| alg.scale(3.0, &alg.random_element(&mut r)).unwrap())
                .collect();
            let dev = split_consistency_check(&s.equation, &s.root, &init, 100, tol).map_err(|e| e.to_string())?;
            ensure(dev <= 1e-8, || format!("{name}, seed {seed}: deviation {dev:e}"))?;
            worst = worst.max(dev);
        }
    }
    Ok(format!(
        "4 scenarios x 10 initial conditions, N = 100, worst deviation {worst:e}"
    ))
}

fn range_extension() -> Outcome {
    let s =
        scenarios::delayed_tanh(0.5, 2, 0.6, CoefficientRule::Constant { value: 0.6 }).map_err(|e| e.to_string())?;
    let direct = stability::alpha_direct(&s.equation).map_err(|e| e.to_string())?;
    let red = reduce_order(&s.equation, &s.root, 1e-9).map_err(|e| e.to_string())?;
    let factored = stability::alpha_factored(&red, 0.6).map_err(|e| e.to_string())?;
    ensure((direct - 1.25).abs() <= 1e-12, || {
        format!("direct bound {direct}, expected 1.25")
    })?;
    ensure((factored - 0.9).abs() <= 1e-12, || {
        format!("factored bound {factored}, expected 0.9")
    })?;
    let report = stability::check_attractivity(&s.equation, Some(&s.root), 1e-9).map_err(|e| e.to_string())?;
    ensure(!report.concluded_by(Criterion::DirectContraction), || {
        "direct bound should fail".into()
    })?;
    ensure(report.concluded_by(Criterion::FactoredContraction), || {
        format!("verdict {:?}", report.verdict)
    })?;

    let mut slowest = 0;
    for seed in 0..20u64 {
        let rule = CoefficientRule::SeededRandom { seed, bound: 0.6 };
        let eq = scenarios::delayed_tanh(0.5, 2, 0.6, rule)
            .map_err(|e| e.to_string())?
            .equation;
        let mut r = rng::seeded(seed);
        let init: Vec<Element> = (0..3)
            .map(|_| Element::Real(rng::uniform(&mut r, -10.0, 10.0)))
            .collect();
        let traj = eq.iterate(&init, 500).map_err(|e| e.to_string())?;
        let n = traj
            .first_below(1e-6)
            .ok_or_else(|| format!("trajectory {seed} did not reach 1e-6 in 500 steps"))?;
        slowest = slowest.max(n);
    }
    Ok(format!(
        "direct 1.25 >= 1, factored {factored} < 1; 20 trajectories below 1e-6 by step {slowest}"
    ))
}

/// `x(r) = Σ c_j cos(jπr) + d_j sin(jπr)`, j = 0..3, coefficients in [−2, 2).
fn smooth_function(alg: &Algebra, r: &mut SeededRng) -> Element {
    let c: Vec<f64> = (0..8).map(|_| rng::uniform(r, -2.0, 2.0)).collect();
    alg.sample(|x| {
        (0..4)
            .map(|j| {
                let w = j as f64 * std::f64::consts::PI * x;
                c[2 * j] * w.cos() + c[2 * j + 1] * w.sin()
            })
            .sum()
    })
    .unwrap()
}

fn integral_example() -> Outcome {
    let start = Instant::now();
    let mut params = IntegralParams::new(1.5, 0.5, 0.4);
    params.points = 101;
    let s = scenarios::integral_c01(&params).map_err(|e| e.to_string())?;
    let check = stability::check_argument_root(&s.equation, 1e-9).map_err(|e| e.to_string())?;
    ensure(check.holds, || format!("argument root check fails: {check:?}"))?;
    ensure((check.sum - 0.5).abs() <= 1e-12, || {
        format!("|a_0 - b| = {}, expected 0.5", check.sum)
    })?;
    ensure((check.limit - 0.6).abs() <= 1e-12, || {
        format!("limit {}, expected 0.6", check.limit)
    })?;
    let report = stability::check_attractivity(&s.equation, Some(&s.root), 1e-9).map_err(|e| e.to_string())?;
    ensure(report.concluded_by(Criterion::ArgumentRoot), || {
        format!("verdict {:?}", report.verdict)
    })?;

    let alg = *s.equation.algebra();
    let mut r = rng::seeded(505);
    let mut slowest = 0;
    for i in 0..10 {
        let init = vec![smooth_function(&alg, &mut r), smooth_function(&alg, &mut r)];
        let traj = s.equation.iterate(&init, 500).map_err(|e| e.to_string())?;
        let n = traj
            .first_below(1e-6)
            .ok_or_else(|| format!("pair {i}: sup norm {} after 500 steps", traj.final_norm()))?;
        slowest = slowest.max(n);
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "|a_0 - b| = 0.5 < 1 - sigma = 0.6; 10 function pairs below 1e-6 by step {slowest}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

/// Positive root of `σ tanh t − (b − a − 1)t` by scanning `(0, 20]` on a
/// grid of width `1e−6` for the first sign change.
fn tau_by_sign_scan(a: f64, b: f64, sigma: f64) -> Option<f64> {
    let gap = b - a - 1.0;
    let f = |t: f64| sigma * t.tanh() - gap * t;
    let h = 1e-6;
    let mut prev = f(h);
    let mut i = 1u64;
    while (i as f64) * h < 20.0 {
        let t = (i + 1) as f64 * h;
        let cur = f(t);
        if prev.signum() != cur.signum() {
            return Some(t - h / 2.0);
        }
        prev = cur;
        i += 1;
    }
    None
}

fn bifurcation() -> Outcome {
    let (b, sigma) = (0.5, 1.2);
    let eps = 1e-9;
    let regime = |a: f64| scenarios::classify_regime(a, b, sigma);
    ensure(regime(-0.5) == Regime::GlobalConvergence, || {
        format!("a = -0.5: {:?}", regime(-0.5))
    })?;
    ensure(regime(-0.5 + eps) == Regime::GlobalConvergence, || {
        "just above -0.5".into()
    })?;
    ensure(matches!(regime(-0.5 - eps), Regime::LocalBasin { .. }), || {
        "just below -0.5".into()
    })?;
    ensure(matches!(regime(-1.7 + eps), Regime::LocalBasin { .. }), || {
        "just above -1.7".into()
    })?;
    ensure(regime(-1.7 - eps) == Regime::RepellingOrigin, || {
        "just below -1.7".into()
    })?;

    let a = -1.0;
    let tau = scenarios::find_tau(a, b, sigma, 1e-12)
        .map_err(|e| e.to_string())?
        .ok_or("no tau at a = -1")?;
    let h = |x: f64| (a - b) * x + sigma * x.tanh();
    let cycle = (h(h(tau)) - tau).abs();
    ensure(cycle <= 1e-5, || format!("|h(h(tau)) - tau| = {cycle:e}"))?;
    let oracle = tau_by_sign_scan(a, b, sigma).ok_or("sign scan found no root")?;
    ensure((tau - oracle).abs() <= 1e-4, || {
        format!("tau {tau} vs sign scan {oracle}")
    })?;

    for t0 in [tau / 2.0, -tau / 2.0] {
        let out = scenarios::basin_probe(a, b, sigma, t0, 10_000, scenarios::DEFAULT_PROBE_BOUND);
        ensure(matches!(out, ProbeOutcome::Converged { .. }), || {
            format!("t0 = {t0}: {out:?}")
        })?;
    }
    for t0 in [2.0 * tau, -2.0 * tau] {
        let out = scenarios::basin_probe(a, b, sigma, t0, 10_000, scenarios::DEFAULT_PROBE_BOUND);
        ensure(matches!(out, ProbeOutcome::Diverged { .. }), || {
            format!("t0 = {t0}: {out:?}")
        })?;
    }

    let scan = scenarios::bifurcation_scan(b, sigma, -2.5, 0.0, 251).map_err(|e| e.to_string())?;
    let taus: Vec<(f64, f64)> = scan.points.iter().filter_map(|p| p.tau().map(|t| (p.a, t))).collect();
    ensure(taus.len() > 100, || format!("only {} local-basin points", taus.len()))?;
    ensure(taus.windows(2).all(|w| w[1].1 > w[0].1), || {
        "tau not increasing in a".into()
    })?;
    let bands: Vec<&str> = scan.bands().iter().map(|(k, _, _)| *k).collect();
    ensure(
        bands == ["repelling_origin", "local_basin", "global_convergence"],
        || format!("bands {bands:?}"),
    )?;
    Ok(format!(
        "boundaries -1.7 / -0.5; tau(-1) = {tau:.9} (scan {oracle:.9}), |h(h(tau)) - tau| = {cycle:e}; probes ok; tau monotone"
    ))
}

fn non_contraction() -> Outcome {
    let p = TanhParams::new(-0.3, 0.5, 1.1).map_err(|e| e.to_string())?;
    ensure(p.sigma >= 1.0 && p.sig_ok(), || {
        "parameters outside 1 <= sigma < 1 - a + b".into()
    })?;
    let s = p.scenario().map_err(|e| e.to_string())?;
    let mut r = rng::seeded(707);
    let mut slowest = 0;
    for i in 0..10 {
        let init = vec![
            Element::Real(rng::uniform(&mut r, -10.0, 10.0)),
            Element::Real(rng::uniform(&mut r, -10.0, 10.0)),
        ];
        let traj = s.equation.iterate(&init, 5000).map_err(|e| e.to_string())?;
        let n = traj
            .first_below(1e-6)
            .ok_or_else(|| format!("pair {i}: norm {} after 5000 steps", traj.final_norm()))?;
        slowest = slowest.max(n);
    }
    Ok(format!(
        "sigma = 1.1 < 1.8; 10 initial pairs below 1e-6 by step {slowest}"
    ))
}

fn determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |cmd: &str, cfg: &PathBuf, out: &Path| -> Result<RunOutput, String> {
        let res = Process::new(env!("CARGO_BIN_EXE_linarg"))
            .args([cmd, "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        let artifact = std::fs::read(out).unwrap_or_default();
        Ok((artifact, res.stdout, res.status.code()))
    };
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&configs)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    entries.sort();
    let mut compared = 0;
    for cfg in &entries {
        for cmd in ["simulate", "reduce", "check", "scan", "axioms"] {
            let first = run(cmd, cfg, &dir.path().join("first"))?;
            let second = run(cmd, cfg, &dir.path().join("second"))?;
            let _ = std::fs::remove_file(dir.path().join("first"));
            let _ = std::fs::remove_file(dir.path().join("second"));
            ensure(first == second, || {
                format!("{cmd} on {} differs between runs", cfg.display())
            })?;
            if first.2 == Some(0) {
                compared += 1;
            }
        }
    }
    ensure(compared >= 20, || format!("only {compared} successful runs compared"))?;
    Ok(format!("{compared} command/config pairs byte-identical across reruns"))
}

fn main() {
    let criteria: [NamedCheck; 8] = [
        ("algebra axioms", axioms),
        ("envelope bound", envelope),
        ("factorization oracle", factorization),
        ("range extension", range_extension),
        ("C[0,1] integral example", integral_example),
        ("2-cycle bifurcation", bifurcation),
        ("non-contraction convergence", non_contraction),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
