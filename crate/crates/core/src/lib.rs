//! Monte Carlo first-passage (escape) times of an underdamped Langevin
//! particle in a cubic potential, with deterministic and Poisson stochastic
//! resetting.
//!
//! The crate simulates `x'' + eta x' + V'(x) = xi(t)` for the cubic potential
//! `V(x) = alpha x^2/2 - beta x^3/3`, measures first-passage times at the
//! barrier top, and provides the statistics used to study when restarting the
//! process accelerates the escape:
//!
//! - [`potential`]: the potential, its gradient, and landmark geometry.
//! - [`dynamics`]: the Langevin SDE and the fixed-step stochastic Heun
//!   integrator.
//! - [`resetting`]: no / periodic / Poisson reset schedules and instantaneous
//!   reset application.
//! - [`fpt_engine`]: reproducible single-trajectory and ensemble runs with an
//!   absorbing boundary.
//! - [`stats`]: MFPT estimators with 95% confidence intervals, histograms,
//!   wave-peak detection, exponential decay fits, and restart (renewal)
//!   predictions derived from the no-reset distribution.
//! - [`analysis`]: parameter sweeps, noise-aware minima detection, and the
//!   CV = 1 threshold diagnostic.
//!
//! ```
//! use kramers_reset::{PotentialSpec, ResetPoint, ResetSchedule, SimParams};
//! use kramers_reset::fpt_engine::run_ensemble;
//! use kramers_reset::stats::summarize;
//!
//! let spec = PotentialSpec::default();
//! let params = SimParams::default();
//! let samples = run_ensemble(
//!     &spec,
//!     &params,
//!     &ResetSchedule::Poisson { rate: 0.4 },
//!     &ResetPoint::at(params.x0),
//!     200,
//!     42,
//! )?;
//! let stats = summarize(&samples)?;
//! assert!(stats.mean > 0.0 && stats.ci95_half_width > 0.0);
//! # Ok::<(), kramers_reset::Error>(())
//! ```

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fpt_engine;
pub mod io;
pub mod potential;
pub mod resetting;
pub mod rng;
pub mod stats;

pub use analysis::{CvThreshold, MinimaReport, SweepCurve, SweepPoint};
pub use dynamics::{SimParams, State};
pub use error::{Error, Result};
pub use fpt_engine::{ComebackReport, FptSamples, TrajectoryOutcome};
pub use potential::{Landmarks, PotentialSpec};
pub use resetting::{ResetPoint, ResetSchedule};
pub use stats::{DecayFit, Histogram, SummaryStats};
