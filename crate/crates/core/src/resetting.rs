//! Reset protocols and instantaneous reset application.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// When resets fire: never, every fixed period, or at Poisson epochs with
/// exponentially distributed inter-reset times `f(t; r) = r exp(-r t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ResetSchedule {
    NoReset,
    Deterministic { period: f64 },
    Poisson { rate: f64 },
}

impl ResetSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ResetSchedule::NoReset => Ok(()),
            ResetSchedule::Deterministic { period } if period > 0.0 && period.is_finite() => Ok(()),
            ResetSchedule::Deterministic { period } => Err(Error::InvalidSchedule(format!(
                "deterministic period must be positive, got {period}"
            ))),
            ResetSchedule::Poisson { rate } if rate > 0.0 && rate.is_finite() => Ok(()),
            ResetSchedule::Poisson { rate } => Err(Error::InvalidSchedule(format!(
                "Poisson rate must be positive, got {rate}"
            ))),
        }
    }

    /// Mean inter-reset interval, when one exists.
    pub fn mean_interval(&self) -> Option<f64> {
        match *self {
            ResetSchedule::NoReset => None,
            ResetSchedule::Deterministic { period } => Some(period),
            ResetSchedule::Poisson { rate } => Some(1.0 / rate),
        }
    }

    /// Next scheduled reset epoch after `now`, or `None` when the schedule
    /// never fires. Poisson epochs restart the clock at `now` and sample the
    /// exponential by inverse CDF.
    pub fn next_reset_time(&self, now: f64, rng: &mut RngStream) -> Option<f64> {
        match *self {
            ResetSchedule::NoReset => None,
            ResetSchedule::Deterministic { period } => Some(now + period),
            ResetSchedule::Poisson { rate } => {
                let u = rng.uniform();
                Some(now - (1.0 - u).ln() / rate)
            }
        }
    }

    /// CLI literal: `none`, `det:<t_r>`, `poisson:<r>`.
    pub fn literal(&self) -> String {
        match *self {
            ResetSchedule::NoReset => "none".to_string(),
            ResetSchedule::Deterministic { period } => format!("det:{period}"),
            ResetSchedule::Poisson { rate } => format!("poisson:{rate}"),
        }
    }
}

impl fmt::Display for ResetSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

impl FromStr for ResetSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |s: &str| {
            Error::InvalidSchedule(format!(
                "expected `none`, `det:<t_r>` or `poisson:<r>`, got `{s}`"
            ))
        };
        let sched = if s == "none" {
            ResetSchedule::NoReset
        } else if let Some(v) = s.strip_prefix("det:") {
            ResetSchedule::Deterministic {
                period: v.parse().map_err(|_| bad(s))?,
            }
        } else if let Some(v) = s.strip_prefix("poisson:") {
            ResetSchedule::Poisson {
                rate: v.parse().map_err(|_| bad(s))?,
            }
        } else {
            return Err(bad(s));
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// Where resets land: a fixed position with the velocity zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetPoint {
    pub x_r: f64,
    pub v_r: f64,
}

impl ResetPoint {
    /// Reset point at `x_r`; the reset velocity is always zero.
    pub fn at(x_r: f64) -> Self {
        Self { x_r, v_r: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v_r != 0.0 {
            return Err(Error::InvalidParams(format!(
                "reset velocity must be zero, got {}",
                self.v_r
            )));
        }
        if !self.x_r.is_finite() {
            return Err(Error::InvalidParams(
                "reset position must be finite".to_string(),
            ));
        }
        Ok(())
    }
}

/// Teleport the state to the reset point; elapsed time is untouched.
#[inline]
pub fn apply_reset(s: &State, p: &ResetPoint) -> State {
    State {
        x: p.x_r,
        v: p.v_r,
        t: s.t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn next_reset_time_examples() {
        let mut rng = RngStream::new(7, 0);
        assert_eq!(ResetSchedule::NoReset.next_reset_time(5.0, &mut rng), None);
        assert_eq!(
            ResetSchedule::Deterministic { period: 2.0 }.next_reset_time(4.0, &mut rng),
            Some(6.0)
        );
    }

    #[test]
    fn poisson_intervals_have_mean_one_over_rate() {
        let sched = ResetSchedule::Poisson { rate: 0.4 };
        let mut rng = RngStream::new(20_240_501, 0);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sched.next_reset_time(0.0, &mut rng).unwrap();
        }
        let mean = sum / n as f64;
        assert!((mean - 2.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn poisson_intervals_pass_ks_against_exponential() {
        let rate = 0.7;
        let sched = ResetSchedule::Poisson { rate };
        let mut rng = RngStream::new(8_812_003, 1);
        let n = 100_000usize;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sched.next_reset_time(0.0, &mut rng).unwrap())
            .collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let mut d: f64 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let cdf = 1.0 - (-rate * x).exp();
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        // critical value at significance 0.01: sqrt(-ln(0.005)/2)/sqrt(n)
        let crit = (-(0.005f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn apply_reset_examples() {
        let p = ResetPoint::at(-2.899);
        let s = apply_reset(
            &State {
                x: 4.2,
                v: -1.3,
                t: 2.0,
            },
            &p,
        );
        assert_eq!((s.x, s.v, s.t), (-2.899, 0.0, 2.0));
        let same = apply_reset(
            &State {
                x: -2.899,
                v: 0.0,
                t: 0.0,
            },
            &p,
        );
        assert_eq!((same.x, same.v, same.t), (-2.899, 0.0, 0.0));
        let s = apply_reset(
            &State {
                x: 5.9,
                v: 3.0,
                t: 7.7,
            },
            &ResetPoint::at(5.0),
        );
        assert_eq!((s.x, s.v, s.t), (5.0, 0.0, 7.7));
    }

    #[test]
    fn schedule_validation() {
        assert!(ResetSchedule::Deterministic { period: 0.0 }
            .validate()
            .is_err());
        assert!(ResetSchedule::Poisson { rate: -0.1 }.validate().is_err());
        assert!(ResetSchedule::NoReset.validate().is_ok());
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(
            "none".parse::<ResetSchedule>().unwrap(),
            ResetSchedule::NoReset
        );
        assert_eq!(
            "det:2".parse::<ResetSchedule>().unwrap(),
            ResetSchedule::Deterministic { period: 2.0 }
        );
        assert_eq!(
            "poisson:0.4".parse::<ResetSchedule>().unwrap(),
            ResetSchedule::Poisson { rate: 0.4 }
        );
        assert!("det:-1".parse::<ResetSchedule>().is_err());
        assert!("det:".parse::<ResetSchedule>().is_err());
        assert!("fixed:2".parse::<ResetSchedule>().is_err());
    }

    proptest! {
        #[test]
        fn literal_round_trips(period in 0.001f64..100.0, rate in 0.001f64..100.0) {
            for sched in [
                ResetSchedule::NoReset,
                ResetSchedule::Deterministic { period },
                ResetSchedule::Poisson { rate },
            ] {
                let parsed: ResetSchedule = sched.literal().parse().unwrap();
                prop_assert_eq!(parsed, sched);
            }
        }

        #[test]
        fn reset_preserves_time_and_zeroes_velocity(
            x in -50.0f64..50.0, v in -50.0f64..50.0, t in 0.0f64..1e4, x_r in -10.0f64..5.0,
        ) {
            let s = apply_reset(&State { x, v, t }, &ResetPoint::at(x_r));
            prop_assert_eq!(s.t, t);
            prop_assert_eq!(s.v, 0.0);
            prop_assert_eq!(s.x, x_r);
        }
    }
}
