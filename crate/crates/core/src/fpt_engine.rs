//! Single-trajectory and ensemble first-passage runs.
//!
//! Trajectories are independent work items: each owns its own
//! [`RngStream`](crate::rng::RngStream) keyed by `(master_seed,
//! trajectory_index)`, results are aggregated in trajectory-index order, and
//! no state is shared across workers, so ensembles are bitwise reproducible
//! for a fixed master seed at any thread count.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dynamics::{gaussian_increment, step, SimParams, State};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::resetting::{apply_reset, ResetPoint, ResetSchedule};
use crate::rng::RngStream;

/// Outcome of a single trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    /// First-passage time; `None` when the trajectory was censored at `t_max`.
    pub fpt: Option<f64>,
    /// Number of reset epochs consumed before absorption or censoring.
    pub n_resets: u64,
    pub censored: bool,
    /// Largest position reached, including the overshoot of the crossing step.
    pub max_x_reached: f64,
}

impl TrajectoryOutcome {
    pub fn escaped(&self) -> bool {
        self.fpt.is_some()
    }
}

/// Ensemble of first-passage outcomes plus full provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FptSamples {
    pub potential: PotentialSpec,
    pub params: SimParams,
    pub schedule: ResetSchedule,
    pub reset_point: ResetPoint,
    pub master_seed: u64,
    /// Outcomes ordered by trajectory index.
    pub outcomes: Vec<TrajectoryOutcome>,
}

impl FptSamples {
    pub fn n(&self) -> usize {
        self.outcomes.len()
    }

    pub fn n_censored(&self) -> usize {
        self.outcomes.iter().filter(|o| o.censored).count()
    }

    /// Escape times in trajectory order; errors when any sample is censored.
    pub fn escape_times(&self) -> Result<Vec<f64>> {
        let n_censored = self.n_censored();
        if n_censored > 0 {
            return Err(Error::CensoredSamples {
                n_censored,
                n: self.n(),
            });
        }
        if self.outcomes.is_empty() {
            return Err(Error::EmptySamples);
        }
        Ok(self
            .outcomes
            .iter()
            .map(|o| o.fpt.expect("uncensored"))
            .collect())
    }

    /// Build a sample set from externally supplied escape times (complete
    /// observations, no resets recorded).
    pub fn from_escape_times(
        potential: PotentialSpec,
        params: SimParams,
        schedule: ResetSchedule,
        reset_point: ResetPoint,
        master_seed: u64,
        times: &[f64],
    ) -> Self {
        let outcomes = times
            .iter()
            .map(|&t| TrajectoryOutcome {
                fpt: Some(t),
                n_resets: 0,
                censored: false,
                max_x_reached: params.absorb_x,
            })
            .collect();
        Self {
            potential,
            params,
            schedule,
            reset_point,
            master_seed,
            outcomes,
        }
    }
}

fn validate_run(
    spec: &PotentialSpec,
    params: &SimParams,
    schedule: &ResetSchedule,
    reset_point: &ResetPoint,
) -> Result<()> {
    spec.landmarks()?;
    params.validate()?;
    schedule.validate()?;
    reset_point.validate()?;
    if params.x0 >= params.absorb_x {
        return Err(Error::InvalidParams(format!(
            "x0={} must start below the absorbing threshold {}",
            params.x0, params.absorb_x
        )));
    }
    if !matches!(schedule, ResetSchedule::NoReset) && reset_point.x_r >= params.absorb_x {
        return Err(Error::InvalidParams(format!(
            "reset position {} must lie below the absorbing threshold {}",
            reset_point.x_r, params.absorb_x
        )));
    }
    Ok(())
}

/// Integrate one trajectory to first passage at `absorb_x`, applying resets at
/// the first step boundary at or after each scheduled epoch. An escape
/// detected in a step wins over a reset scheduled in the same step. The
/// crossing time is linearly interpolated inside the detecting step.
pub fn run_trajectory(
    spec: &PotentialSpec,
    params: &SimParams,
    schedule: &ResetSchedule,
    reset_point: &ResetPoint,
    rng: &mut RngStream,
) -> Result<TrajectoryOutcome> {
    let mut s = State {
        x: params.x0,
        v: params.v0,
        t: 0.0,
    };
    let mut max_x = s.x;
    let mut n_resets: u64 = 0;
    // Deterministic epochs are exact multiples of the period; the Poisson
    // clock restarts at each applied reset.
    let mut det_epoch: u64 = 1;
    let mut next_reset = match *schedule {
        ResetSchedule::NoReset => f64::INFINITY,
        ResetSchedule::Deterministic { period } => period,
        ResetSchedule::Poisson { .. } => schedule
            .next_reset_time(0.0, rng)
            .expect("poisson schedule fires"),
    };

    while s.t < params.t_max {
        let dw = gaussian_increment(rng, params.dt);
        let next = step(spec, params, &s, dw)?;
        if next.x > max_x {
            max_x = next.x;
        }
        if next.x >= params.absorb_x {
            let fpt = s.t + params.dt * (params.absorb_x - s.x) / (next.x - s.x);
            if fpt <= params.t_max {
                return Ok(TrajectoryOutcome {
                    fpt: Some(fpt),
                    n_resets,
                    censored: false,
                    max_x_reached: max_x,
                });
            }
            break;
        }
        s = next;
        while next_reset <= s.t {
            s = apply_reset(&s, reset_point);
            n_resets += 1;
            next_reset = match *schedule {
                ResetSchedule::NoReset => unreachable!("no-reset schedule never fires"),
                ResetSchedule::Deterministic { period } => {
                    det_epoch += 1;
                    det_epoch as f64 * period
                }
                ResetSchedule::Poisson { .. } => schedule
                    .next_reset_time(s.t, rng)
                    .expect("poisson schedule fires"),
            };
        }
    }

    Ok(TrajectoryOutcome {
        fpt: None,
        n_resets,
        censored: true,
        max_x_reached: max_x,
    })
}

fn collect_outcomes<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut failed = Vec::new();
    let mut outcomes = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => outcomes.push(o),
            Err(_) => failed.push(i),
        }
    }
    if failed.is_empty() {
        Ok(outcomes)
    } else {
        Err(Error::EnsembleFailure { indices: failed })
    }
}

fn map_trajectories<T, F>(n_traj: usize, f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n_traj).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_traj).map(f).collect()
    }
}

/// Run `n_traj` independent trajectories with per-index RNG streams. The
/// result is deterministic for a fixed `master_seed` regardless of
/// parallelism.
pub fn run_ensemble(
    spec: &PotentialSpec,
    params: &SimParams,
    schedule: &ResetSchedule,
    reset_point: &ResetPoint,
    n_traj: usize,
    master_seed: u64,
) -> Result<FptSamples> {
    validate_run(spec, params, schedule, reset_point)?;
    if n_traj == 0 {
        return Err(Error::InvalidParams(
            "n_traj must be at least 1".to_string(),
        ));
    }
    let results = map_trajectories(n_traj, |i| {
        let mut rng = RngStream::new(master_seed, i as u64);
        run_trajectory(spec, params, schedule, reset_point, &mut rng)
    });
    Ok(FptSamples {
        potential: *spec,
        params: *params,
        schedule: *schedule,
        reset_point: *reset_point,
        master_seed,
        outcomes: collect_outcomes(results)?,
    })
}

/// Findings of the no-comeback validation.
///
/// Trajectories are continued past the absorbing point until `x > validate_x`
/// or `t_max`. A *comeback* is an escaped trajectory that failed to commit:
/// it touched `absorb_x` but never reached `validate_x`, so treating
/// `absorb_x` as absorbing would have miscounted it. Transient re-entries
/// below `absorb_x` that still commit are tallied separately in
/// `n_recrossed`; the thermal wobble at the flat barrier top makes brief
/// recrossings physically unavoidable at finite temperature, and they do not
/// invalidate the first-passage measurement. Nonzero counts are findings,
/// not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComebackReport {
    pub n_traj: usize,
    /// Trajectories that touched `absorb_x` within `t_max`.
    pub n_escaped: usize,
    /// Trajectories that never reached `absorb_x` within `t_max`.
    pub n_never_escaped: usize,
    /// Escaped trajectories that did not reach `validate_x` within `t_max`.
    pub n_comebacks: usize,
    /// Escaped trajectories that dipped below `absorb_x` at least once after
    /// first crossing (committed or not).
    pub n_recrossed: usize,
    pub comeback_indices: Vec<usize>,
}

/// Continue no-reset trajectories past `absorb_x` until `x > validate_x` or
/// `t_max`, reporting how many failed to commit to the escape. Streams are
/// keyed exactly as in [`run_ensemble`], so trajectory `i` follows the same
/// path as in a no-reset ensemble with the same seed.
pub fn validate_no_comeback(
    spec: &PotentialSpec,
    params: &SimParams,
    master_seed: u64,
    n_traj: usize,
) -> Result<ComebackReport> {
    validate_run(
        spec,
        params,
        &ResetSchedule::NoReset,
        &ResetPoint::at(params.x0),
    )?;
    let results = map_trajectories(n_traj, |i| {
        let mut rng = RngStream::new(master_seed, i as u64);
        let mut s = State {
            x: params.x0,
            v: params.v0,
            t: 0.0,
        };
        let mut crossed = false;
        let mut recrossed = false;
        let mut committed = false;
        while s.t < params.t_max {
            let dw = gaussian_increment(&mut rng, params.dt);
            s = step(spec, params, &s, dw)?;
            if !crossed {
                crossed = s.x >= params.absorb_x;
            } else if s.x < params.absorb_x {
                recrossed = true;
            }
            if s.x > params.validate_x {
                committed = true;
                break;
            }
        }
        Ok((crossed, recrossed, committed))
    });
    let flags = collect_outcomes(results)?;
    let comeback_indices: Vec<usize> = flags
        .iter()
        .enumerate()
        .filter_map(|(i, &(crossed, _, committed))| (crossed && !committed).then_some(i))
        .collect();
    let n_escaped = flags.iter().filter(|&&(crossed, _, _)| crossed).count();
    let n_recrossed = flags.iter().filter(|&&(_, recrossed, _)| recrossed).count();
    Ok(ComebackReport {
        n_traj,
        n_escaped,
        n_never_escaped: n_traj - n_escaped,
        n_comebacks: comeback_indices.len(),
        n_recrossed,
        comeback_indices,
    })
}
