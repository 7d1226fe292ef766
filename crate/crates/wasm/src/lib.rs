//! Browser bindings for the second-order tanh equation
//!
//! ```text
//! x_{n+1} = a x_n + b(b − a) x_{n−1} + σ tanh(x_n − b x_{n−1})
//! ```
//!
//! Every export returns a JSON string so the page needs no generated
//! TypeScript types. The pure functions are public for native tests.

use linarg::scenarios::{self, TanhParams};
use linarg::Element;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TAU_TOL: f64 = 1e-12;
const MAX_STEPS: usize = 100_000;
const MAX_POINTS: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct TrajectoryView {
    pub n: Vec<i64>,
    pub x: Vec<f64>,
    /// `t_n = x_n − b x_{n−1}`, the first-order factor's orbit.
    pub t: Vec<f64>,
    pub regime: &'static str,
    pub tau: Option<f64>,
    pub diverged: bool,
}

#[derive(Debug, Serialize)]
pub struct CobwebView {
    pub curve: Vec<[f64; 2]>,
    pub orbit: Vec<f64>,
    pub tau: Option<f64>,
    pub regime: &'static str,
}

fn check_count(name: &str, v: usize, max: usize) -> Result<(), String> {
    if v == 0 || v > max {
        return Err(format!("{name} must be between 1 and {max}, got {v}"));
    }
    Ok(())
}

pub fn scan(b: f64, sigma: f64, a_min: f64, a_max: f64, points: usize) -> Result<String, String> {
    check_count("points", points, MAX_POINTS)?;
    let s = scenarios::bifurcation_scan(b, sigma, a_min, a_max, points).map_err(|e| e.to_string())?;
    serde_json::to_string(&s).map_err(|e| e.to_string())
}

pub fn trajectory(a: f64, b: f64, sigma: f64, x_prev: f64, x0: f64, steps: usize) -> Result<TrajectoryView, String> {
    check_count("steps", steps, MAX_STEPS)?;
    let params = TanhParams::new(a, b, sigma).map_err(|e| e.to_string())?;
    let eq = params.scenario().map_err(|e| e.to_string())?.equation;
    let traj = eq
        .iterate(&[Element::Real(x_prev), Element::Real(x0)], steps)
        .map_err(|e| e.to_string())?;
    let x: Vec<f64> = traj.values().iter().map(|v| v.as_real().unwrap_or(f64::NAN)).collect();
    let t = x.windows(2).map(|w| w[1] - b * w[0]).collect();
    let regime = scenarios::classify_regime(a, b, sigma);
    Ok(TrajectoryView {
        n: (-1..x.len() as i64 - 1).collect(),
        x,
        t,
        regime: regime.key(),
        tau: regime.tau(),
        diverged: traj.diverged(),
    })
}

/// `h` sampled on `[−extent, extent]` and the orbit of `t_{n+1} = h(t_n)`.
pub fn cobweb(a: f64, b: f64, sigma: f64, t0: f64, steps: usize, extent: f64) -> Result<CobwebView, String> {
    check_count("steps", steps, MAX_STEPS)?;
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(format!("extent must be positive, got {extent}"));
    }
    let params = TanhParams::new(a, b, sigma).map_err(|e| e.to_string())?;
    const SAMPLES: usize = 400;
    let curve = (0..=SAMPLES)
        .map(|i| {
            let xi = -extent + 2.0 * extent * i as f64 / SAMPLES as f64;
            [xi, params.h(xi)]
        })
        .collect();
    let mut orbit = Vec::with_capacity(steps + 1);
    let mut t = t0;
    orbit.push(t);
    for _ in 0..steps {
        t = params.h(t);
        if !t.is_finite() || t.abs() > 1e12 {
            break;
        }
        orbit.push(t);
    }
    let tau = scenarios::find_tau(a, b, sigma, TAU_TOL).map_err(|e| e.to_string())?;
    Ok(CobwebView {
        curve,
        orbit,
        tau,
        regime: scenarios::classify_regime(a, b, sigma).key(),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = scan)]
pub fn scan_js(b: f64, sigma: f64, a_min: f64, a_max: f64, points: usize) -> Result<String, JsValue> {
    scan(b, sigma, a_min, a_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = trajectory)]
pub fn trajectory_js(a: f64, b: f64, sigma: f64, x_prev: f64, x0: f64, steps: usize) -> Result<String, JsValue> {
    to_js(trajectory(a, b, sigma, x_prev, x0, steps))
}

#[wasm_bindgen(js_name = cobweb)]
pub fn cobweb_js(a: f64, b: f64, sigma: f64, t0: f64, steps: usize, extent: f64) -> Result<String, JsValue> {
    to_js(cobweb(a, b, sigma, t0, steps, extent))
}
