//! Browser bindings for the escape-time simulator.
//!
//! Three interactive operations, each returning a JSON string the page renders
//! onto canvases: a traced single trajectory, an escape-time histogram with
//! summary statistics, and an MFPT sweep over the resetting control. All
//! entry points are plain functions of numbers and schedule literals, so the
//! same surface is callable from native tests.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use kramers_reset::analysis::{find_minima, sweep_deterministic, sweep_poisson};
use kramers_reset::dynamics::{gaussian_increment, step, SimParams, State};
use kramers_reset::fpt_engine::run_ensemble;
use kramers_reset::potential::PotentialSpec;
use kramers_reset::resetting::{apply_reset, ResetPoint, ResetSchedule};
use kramers_reset::rng::RngStream;
use kramers_reset::stats::{build_histogram, fraction_escaped_by, summarize};

fn err_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

macro_rules! ok_or_err {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return err_json(&e.to_string()),
        }
    };
}

fn parse_setup(
    alpha: f64,
    beta: f64,
    eta: f64,
    eps: f64,
    x0: f64,
    reset: &str,
) -> Result<(PotentialSpec, SimParams, ResetSchedule), String> {
    let spec = PotentialSpec::new(alpha, beta).map_err(|e| e.to_string())?;
    let absorb_x = spec.landmarks().map_err(|e| e.to_string())?.x_plus;
    let params = SimParams {
        eta,
        eps,
        x0,
        absorb_x,
        ..SimParams::default()
    };
    params.validate().map_err(|e| e.to_string())?;
    let schedule: ResetSchedule = reset
        .parse()
        .map_err(|e: kramers_reset::Error| e.to_string())?;
    Ok((spec, params, schedule))
}

/// Potential landmarks for the plot overlays.
#[wasm_bindgen]
pub fn landmarks_json(alpha: f64, beta: f64) -> String {
    let spec = match PotentialSpec::new(alpha, beta) {
        Ok(s) => s,
        Err(e) => return err_json(&e.to_string()),
    };
    let lm = spec.landmarks().expect("validated");
    let xs: Vec<f64> = (0..=200)
        .map(|i| lm.x_minus - 0.5 + (lm.x_plus - lm.x_minus + 1.5) * i as f64 / 200.0)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| spec.evaluate(x)).collect();
    serde_json::json!({
        "x_minus": lm.x_minus,
        "x_plus": lm.x_plus,
        "barrier_height": lm.barrier_height,
        "curve_x": xs,
        "curve_v": vs,
    })
    .to_string()
}

#[derive(Serialize)]
struct TracePoint {
    t: f64,
    x: f64,
    v: f64,
}

/// One trajectory traced to first passage (or `max_time`), with reset epochs
/// marked. The path is decimated to every `sample_every`-th step.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trajectory_json(
    alpha: f64,
    beta: f64,
    eta: f64,
    eps: f64,
    x0: f64,
    reset: &str,
    seed: u32,
    max_time: f64,
    sample_every: u32,
) -> String {
    let (spec, mut params, schedule) = match parse_setup(alpha, beta, eta, eps, x0, reset) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    params.t_max = max_time.clamp(1.0, 5e4);
    let reset_point = ResetPoint::at(params.x0);
    let every = sample_every.max(1) as u64;

    let mut rng = RngStream::new(seed as u64, 0);
    let mut s = State {
        x: params.x0,
        v: params.v0,
        t: 0.0,
    };
    let mut det_epoch: u64 = 1;
    let mut next_reset = match schedule {
        ResetSchedule::NoReset => f64::INFINITY,
        ResetSchedule::Deterministic { period } => period,
        ResetSchedule::Poisson { .. } => schedule.next_reset_time(0.0, &mut rng).expect("fires"),
    };

    let mut path = vec![TracePoint {
        t: 0.0,
        x: s.x,
        v: s.v,
    }];
    let mut resets: Vec<f64> = Vec::new();
    let mut fpt: Option<f64> = None;
    let mut step_count: u64 = 0;
    while s.t < params.t_max {
        let dw = gaussian_increment(&mut rng, params.dt);
        let next = ok_or_err!(step(&spec, &params, &s, dw));
        if next.x >= params.absorb_x {
            let t_cross = s.t + params.dt * (params.absorb_x - s.x) / (next.x - s.x);
            path.push(TracePoint {
                t: t_cross,
                x: params.absorb_x,
                v: next.v,
            });
            fpt = Some(t_cross);
            break;
        }
        s = next;
        while next_reset <= s.t {
            s = apply_reset(&s, &reset_point);
            resets.push(s.t);
            next_reset = match schedule {
                ResetSchedule::NoReset => f64::INFINITY,
                ResetSchedule::Deterministic { period } => {
                    det_epoch += 1;
                    det_epoch as f64 * period
                }
                ResetSchedule::Poisson { .. } => {
                    schedule.next_reset_time(s.t, &mut rng).expect("fires")
                }
            };
        }
        step_count += 1;
        if step_count.is_multiple_of(every) {
            path.push(TracePoint {
                t: s.t,
                x: s.x,
                v: s.v,
            });
        }
    }

    serde_json::json!({
        "fpt": fpt,
        "censored": fpt.is_none(),
        "n_resets": resets.len(),
        "resets": resets,
        "path": path,
        "absorb_x": params.absorb_x,
    })
    .to_string()
}

/// Escape-time histogram over an ensemble, with the Monte Carlo summary.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn histogram_json(
    alpha: f64,
    beta: f64,
    eta: f64,
    eps: f64,
    x0: f64,
    reset: &str,
    seed: u32,
    n: u32,
    bin_width: f64,
) -> String {
    let (spec, params, schedule) = match parse_setup(alpha, beta, eta, eps, x0, reset) {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    let n = n.clamp(100, 20_000) as usize;
    let reset_point = ResetPoint::at(params.x0);
    let samples = ok_or_err!(run_ensemble(
        &spec,
        &params,
        &schedule,
        &reset_point,
        n,
        seed as u64
    ));
    let stats = ok_or_err!(summarize(&samples));
    let hist = ok_or_err!(build_histogram(&samples, bin_width));
    let times = ok_or_err!(samples.escape_times());
    let min_fpt = times.iter().cloned().fold(f64::INFINITY, f64::min);
    serde_json::json!({
        "n": n,
        "mfpt": stats.mean,
        "std_dev": stats.std_dev,
        "cv": stats.cv,
        "ci95": stats.ci95_half_width,
        "min_fpt": min_fpt,
        "frac_by_20": fraction_escaped_by(&samples, 20.0),
        "bin_width": hist.bin_width,
        "edges": hist.bins.iter().map(|b| b.left_edge).collect::<Vec<f64>>(),
        "rf": hist.bins.iter().map(|b| b.relative_frequency).collect::<Vec<f64>>(),
    })
    .to_string()
}

/// MFPT against the resetting control (`kind`: "tr" for fixed periods,
/// "theta" for mean Poisson intervals), with the no-reset baseline and the
/// noise-aware minima report.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep_json(
    alpha: f64,
    beta: f64,
    eta: f64,
    eps: f64,
    x0: f64,
    kind: &str,
    start: f64,
    step_size: f64,
    stop: f64,
    n: u32,
    seed: u32,
) -> String {
    let (spec, params, _) = match parse_setup(alpha, beta, eta, eps, x0, "none") {
        Ok(v) => v,
        Err(e) => return err_json(&e),
    };
    if step_size.is_nan() || step_size <= 0.0 || stop < start || start.is_nan() || start <= 0.0 {
        return err_json("grid must satisfy start > 0, step > 0, stop >= start");
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step_size;
        if v > stop + 1e-9 || grid.len() >= 200 {
            break;
        }
        grid.push(v);
        k += 1;
    }
    let n = n.clamp(100, 10_000) as usize;
    let reset_point = ResetPoint::at(params.x0);
    let curve = match kind {
        "tr" => ok_or_err!(sweep_deterministic(
            &spec,
            &params,
            &reset_point,
            &grid,
            n,
            seed as u64
        )),
        "theta" => ok_or_err!(sweep_poisson(
            &spec,
            &params,
            &reset_point,
            &grid,
            n,
            seed as u64
        )),
        _ => return err_json("kind must be `tr` or `theta`"),
    };
    let baseline_samples = ok_or_err!(run_ensemble(
        &spec,
        &params,
        &ResetSchedule::NoReset,
        &reset_point,
        n,
        kramers_reset::rng::derive_seed(seed as u64, u64::MAX),
    ));
    let baseline = ok_or_err!(summarize(&baseline_samples)).mean;
    let report = ok_or_err!(find_minima(&curve, baseline));
    serde_json::json!({
        "control": curve.control_name,
        "points": curve.points.iter().map(|p| {
            serde_json::json!({
                "c": p.control,
                "mean": p.stats.mean,
                "ci": p.stats.ci95_half_width,
                "cv": p.stats.cv,
            })
        }).collect::<Vec<_>>(),
        "baseline": baseline,
        "global_min": report.global_min,
        "local_minima": report.local_minima,
        "ratio_at_global": report.ratio_at_global,
    })
    .to_string()
}
