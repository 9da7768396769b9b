//! Parameter sweeps, noise-aware minima detection, and the CV-threshold
//! diagnostic.
//!
//! Every sweep point runs an independent ensemble whose seed is derived
//! deterministically from the master seed and the grid index, so whole sweeps
//! are reproducible and points are statistically independent.

use serde::{Deserialize, Serialize};

use crate::dynamics::SimParams;
use crate::error::{Error, Result};
use crate::fpt_engine::run_ensemble;
use crate::potential::PotentialSpec;
use crate::resetting::{ResetPoint, ResetSchedule};
use crate::rng::derive_seed;
use crate::stats::{summarize, SummaryStats};

/// One sweep sample: the control value and the ensemble summary at that value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub control: f64,
    pub stats: SummaryStats,
}

/// MFPT (and CV) against a control variable on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub control_name: String,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    /// Point with the smallest mean (raw argmin, not noise-aware).
    pub fn argmin(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .min_by(|a, b| a.stats.mean.total_cmp(&b.stats.mean))
    }
}

/// Noise-aware minima of a sweep curve, with the no-reset baseline for
/// reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaReport {
    /// `(control, mean)` pairs separated from both neighbors by more than the
    /// summed 95% half-widths.
    pub local_minima: Vec<(f64, f64)>,
    /// Smallest-mean local minimum; ties go to the smaller control value.
    pub global_min: Option<(f64, f64)>,
    /// No-reset MFPT.
    pub baseline: f64,
    /// `global_min.mean / baseline`.
    pub ratio_at_global: Option<f64>,
}

fn check_grid(grid: &[f64], name: &str, require_positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParams(format!("{name} grid is empty")));
    }
    if require_positive && grid.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::InvalidParams(format!(
            "{name} grid values must be positive"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

fn sweep_impl<F>(
    control_name: &str,
    grid: &[f64],
    n_traj: usize,
    master_seed: u64,
    configure: F,
) -> Result<SweepCurve>
where
    F: Fn(f64) -> (PotentialSpec, SimParams, ResetSchedule, ResetPoint),
{
    let mut points = Vec::with_capacity(grid.len());
    for (i, &control) in grid.iter().enumerate() {
        let (spec, params, schedule, reset_point) = configure(control);
        let seed = derive_seed(master_seed, i as u64);
        let samples = run_ensemble(&spec, &params, &schedule, &reset_point, n_traj, seed)?;
        points.push(SweepPoint {
            control,
            stats: summarize(&samples)?,
        });
    }
    Ok(SweepCurve {
        control_name: control_name.to_string(),
        points,
    })
}

/// MFPT against the deterministic resetting period.
pub fn sweep_deterministic(
    spec: &PotentialSpec,
    params: &SimParams,
    reset_point: &ResetPoint,
    t_r_grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<SweepCurve> {
    check_grid(t_r_grid, "t_r", true)?;
    sweep_impl("t_r", t_r_grid, n_traj, master_seed, |t_r| {
        (
            *spec,
            *params,
            ResetSchedule::Deterministic { period: t_r },
            *reset_point,
        )
    })
}

/// MFPT against the mean Poisson resetting interval `theta = 1/r`.
pub fn sweep_poisson(
    spec: &PotentialSpec,
    params: &SimParams,
    reset_point: &ResetPoint,
    theta_grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<SweepCurve> {
    check_grid(theta_grid, "theta", true)?;
    sweep_impl("theta", theta_grid, n_traj, master_seed, |theta| {
        (
            *spec,
            *params,
            ResetSchedule::Poisson { rate: 1.0 / theta },
            *reset_point,
        )
    })
}

/// No-reset MFPT against the noise intensity.
pub fn sweep_noise(
    spec: &PotentialSpec,
    params: &SimParams,
    eps_grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<SweepCurve> {
    check_grid(eps_grid, "eps", true)?;
    sweep_impl("eps", eps_grid, n_traj, master_seed, |eps| {
        let p = SimParams { eps, ..*params };
        (*spec, p, ResetSchedule::NoReset, ResetPoint::at(p.x0))
    })
}

/// No-reset MFPT and CV against the initial position. Each point carries the
/// full summary, so the same curve serves both panels of the
/// MFPT/CV-versus-x0 figure.
pub fn sweep_initial_condition(
    spec: &PotentialSpec,
    params: &SimParams,
    x0_grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<SweepCurve> {
    check_grid(x0_grid, "x0", false)?;
    let lm = spec.landmarks()?;
    if x0_grid
        .iter()
        .any(|&x0| x0 <= lm.x_minus || x0 >= lm.x_plus)
    {
        return Err(Error::InvalidParams(format!(
            "x0 grid must lie strictly inside the basin ({}, {})",
            lm.x_minus, lm.x_plus
        )));
    }
    sweep_impl("x0", x0_grid, n_traj, master_seed, |x0| {
        let p = SimParams { x0, ..*params };
        (*spec, p, ResetSchedule::NoReset, ResetPoint::at(x0))
    })
}

/// Noise-aware minima: a point is a local minimum when its mean lies below
/// both neighbors by more than the summed 95% half-widths. Raw argmin over
/// Monte Carlo noise produces spurious minima; the CI gate suppresses them.
pub fn find_minima(curve: &SweepCurve, baseline: f64) -> Result<MinimaReport> {
    if curve.points.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "minima detection needs at least 3 sweep points, got {}",
            curve.points.len()
        )));
    }
    let pts = &curve.points;
    let mut local_minima = Vec::new();
    for i in 1..pts.len() - 1 {
        let below = |j: usize| {
            pts[i].stats.mean
                < pts[j].stats.mean - (pts[i].stats.ci95_half_width + pts[j].stats.ci95_half_width)
        };
        if below(i - 1) && below(i + 1) {
            local_minima.push((pts[i].control, pts[i].stats.mean));
        }
    }
    let global_min = local_minima
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    Ok(MinimaReport {
        local_minima,
        global_min,
        baseline,
        ratio_at_global: global_min.map(|(_, mean)| mean / baseline),
    })
}

/// Result of the CV = 1 bisection over initial energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvThreshold {
    /// Initial energy as a fraction of the barrier height at the crossing.
    pub energy_fraction: f64,
    /// Initial energy in absolute units.
    pub energy: f64,
    /// Left-branch position with that energy.
    pub x0: f64,
}

/// Invert `V(x) = energy` on the left branch `x in [x_minus, 0]`, where `V`
/// decreases monotonically from the barrier height to zero.
fn left_branch_position(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let lm = spec.landmarks()?;
    if !(0.0..=lm.barrier_height).contains(&energy) {
        return Err(Error::InvalidParams(format!(
            "energy {energy} outside [0, {}]",
            lm.barrier_height
        )));
    }
    let (mut a, mut b) = (lm.x_minus, 0.0); // V(a) >= energy >= V(b)
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if spec.evaluate(mid) >= energy {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection on the initial energy (mapped to a left-branch start) for the
/// CV = 1 crossing of the no-reset escape-time distribution. Returns the
/// energy fraction of the barrier height at the crossing; the bracket is
/// resolved to 0.05 in energy fraction with one `n_traj` ensemble per probe.
pub fn cv_threshold(
    spec: &PotentialSpec,
    params: &SimParams,
    n_traj: usize,
    master_seed: u64,
) -> Result<CvThreshold> {
    let lm = spec.landmarks()?;
    let mut probe_index = 0u64;
    let mut cv_at = |fraction: f64| -> Result<f64> {
        let x0 = left_branch_position(spec, fraction * lm.barrier_height)?;
        let p = SimParams { x0, ..*params };
        let seed = derive_seed(master_seed, probe_index);
        probe_index += 1;
        let samples = run_ensemble(
            spec,
            &p,
            &ResetSchedule::NoReset,
            &ResetPoint::at(x0),
            n_traj,
            seed,
        )?;
        Ok(summarize(&samples)?.cv)
    };

    let (mut lo, mut hi) = (0.2, 0.8);
    if cv_at(lo)? >= 1.0 {
        lo = 0.05;
        if cv_at(lo)? >= 1.0 {
            return Err(Error::InvalidParams(
                "CV exceeds 1 even at 5% of the barrier energy; no crossing to bracket".to_string(),
            ));
        }
    }
    if cv_at(hi)? <= 1.0 {
        hi = 0.95;
        if cv_at(hi)? <= 1.0 {
            return Err(Error::InvalidParams(
                "CV stays below 1 up to 95% of the barrier energy; no crossing to bracket"
                    .to_string(),
            ));
        }
    }
    while hi - lo > 0.05 {
        let mid = 0.5 * (lo + hi);
        if cv_at(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let fraction = 0.5 * (lo + hi);
    Ok(CvThreshold {
        energy_fraction: fraction,
        energy: fraction * lm.barrier_height,
        x0: left_branch_position(spec, fraction * lm.barrier_height)?,
    })
}
