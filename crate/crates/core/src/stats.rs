//! Estimators, histograms, peak analysis, decay fitting, and restart
//! (renewal) predictions over first-passage samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpt_engine::FptSamples;
use crate::resetting::ResetSchedule;
use crate::rng::RngStream;

/// Monte Carlo summary of a complete (uncensored) first-passage sample.
///
/// `std_dev` uses the population (1/N) normalization and the 95% confidence
/// half-width is `2 sigma / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// Coefficient of variation `sigma / mean`.
    pub cv: f64,
    pub ci95_half_width: f64,
}

impl SummaryStats {
    /// Standard error of the mean, `sigma / sqrt(N)`.
    pub fn standard_error(&self) -> f64 {
        self.ci95_half_width / 2.0
    }
}

/// Summarize raw escape times.
pub fn summarize_times(times: &[f64]) -> Result<SummaryStats> {
    if times.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
    let std_dev = var.sqrt();
    let cv = if std_dev == 0.0 { 0.0 } else { std_dev / mean };
    Ok(SummaryStats {
        n: times.len(),
        mean,
        std_dev,
        cv,
        ci95_half_width: 2.0 * std_dev / n.sqrt(),
    })
}

/// Summarize an ensemble; errors when any trajectory was censored, since the
/// estimator assumes complete samples.
pub fn summarize(samples: &FptSamples) -> Result<SummaryStats> {
    summarize_times(&samples.escape_times()?)
}

/// Fraction of trajectories with `fpt <= t`; censored trajectories count as
/// not escaped.
pub fn fraction_escaped_by(samples: &FptSamples, t: f64) -> f64 {
    if samples.outcomes.is_empty() {
        return 0.0;
    }
    let escaped = samples
        .outcomes
        .iter()
        .filter(|o| o.fpt.map(|fpt| fpt <= t).unwrap_or(false))
        .count();
    escaped as f64 / samples.outcomes.len() as f64
}

/// One histogram bin: left edge and relative frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left_edge: f64,
    pub relative_frequency: f64,
}

/// Uniform-bin relative-frequency histogram anchored at t = 0. Bar heights sum
/// to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub origin: f64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn total_mass(&self) -> f64 {
        self.bins.iter().map(|b| b.relative_frequency).sum()
    }
}

/// Histogram of escape times with uniform bins of `bin_width` from 0 to the
/// largest observed time. Errors on censored samples.
pub fn build_histogram(samples: &FptSamples, bin_width: f64) -> Result<Histogram> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let times = samples.escape_times()?;
    let max = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n_bins_f = (max / bin_width).floor() + 1.0;
    if n_bins_f > 1e7 {
        return Err(Error::InvalidParams(format!(
            "bin width {bin_width} over a range of {max} needs {n_bins_f:.0} bins; choose a wider bin"
        )));
    }
    let n_bins = n_bins_f as usize;
    let mut counts = vec![0usize; n_bins];
    for t in &times {
        let mut idx = (t / bin_width).floor() as usize;
        if idx >= n_bins {
            idx = n_bins - 1;
        }
        counts[idx] += 1;
    }
    let n = times.len() as f64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            left_edge: i as f64 * bin_width,
            relative_frequency: c as f64 / n,
        })
        .collect();
    Ok(Histogram {
        bin_width,
        origin: 0.0,
        bins,
    })
}

/// Bins that are strict maxima over `window` neighbors on each side, with ties
/// broken toward the earlier bin. Peaks are reported as `(left_edge,
/// relative_frequency)`; empty bins never qualify.
pub fn detect_peaks(hist: &Histogram, window: usize) -> Result<Vec<(f64, f64)>> {
    if window == 0 {
        return Err(Error::InvalidParams(
            "peak window must be at least 1 bin".to_string(),
        ));
    }
    let h = &hist.bins;
    let mut peaks = Vec::new();
    for i in 0..h.len() {
        let rf = h[i].relative_frequency;
        if rf <= 0.0 {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = usize::min(i + window, h.len().saturating_sub(1));
        let beats_left = (lo..i).all(|j| rf > h[j].relative_frequency);
        let beats_right = (i + 1..=hi).all(|j| rf >= h[j].relative_frequency);
        if beats_left && beats_right {
            peaks.push((h[i].left_edge, rf));
        }
    }
    Ok(peaks)
}

/// Exponential decay law `RF = a exp(-b t)` fitted to wave peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    /// Decay rate (1/time).
    pub b: f64,
    /// Coefficient of determination in the original (non-log) scale.
    pub r_squared: f64,
}

/// Least squares of `log(rf)` against time; `r_squared` is computed in the
/// original scale.
pub fn fit_exponential_decay(peaks: &[(f64, f64)]) -> Result<DecayFit> {
    if peaks.len() < 3 {
        return Err(Error::InsufficientPeaks(peaks.len()));
    }
    if peaks.iter().any(|&(_, rf)| rf <= 0.0) {
        return Err(Error::NonpositiveRf);
    }
    let n = peaks.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, rf) in peaks {
        let y = rf.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom.abs() < f64::EPSILON * n * stt.max(1.0) {
        return Err(Error::InvalidParams(
            "peak times are degenerate; cannot fit".to_string(),
        ));
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    let a = intercept.exp();
    let b = -slope;

    let mean_rf = peaks.iter().map(|&(_, rf)| rf).sum::<f64>() / n;
    let ss_res: f64 = peaks
        .iter()
        .map(|&(t, rf)| (rf - a * (-b * t).exp()).powi(2))
        .sum();
    let ss_tot: f64 = peaks.iter().map(|&(_, rf)| (rf - mean_rf).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).max(0.0)
    } else if ss_res <= f64::EPSILON {
        1.0
    } else {
        0.0
    };
    Ok(DecayFit { a, b, r_squared })
}

fn renewal_deterministic_times(times: &[f64], t_r: f64) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !t_r.is_finite() || t_r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "t_r must be positive, got {t_r}"
        )));
    }
    let successes = times.iter().filter(|&&t| t < t_r).count();
    if successes == 0 {
        return Err(Error::NoSuccessfulAttempt { t_r });
    }
    let sum_min: f64 = times.iter().map(|&t| t.min(t_r)).sum();
    Ok(sum_min / successes as f64)
}

fn renewal_poisson_times(times: &[f64], rate: f64) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "rate must be positive, got {rate}"
        )));
    }
    let laplace = times.iter().map(|&t| (-rate * t).exp()).sum::<f64>() / times.len() as f64;
    Ok((1.0 - laplace) / (rate * laplace))
}

/// MFPT predicted for restart with fixed period `t_r` from the no-reset
/// samples: the empirical plug-in of `E[min(T, t_r)] / P(T < t_r)`, the
/// i.i.d.-attempts restart identity.
pub fn renewal_mfpt_deterministic(no_reset: &FptSamples, t_r: f64) -> Result<f64> {
    renewal_deterministic_times(&no_reset.escape_times()?, t_r)
}

/// MFPT predicted for Poisson restarts at rate `r` from the no-reset samples:
/// `(1 - L(r)) / (r L(r))` with `L(r)` the sample mean of `exp(-r T)`.
pub fn renewal_mfpt_poisson(no_reset: &FptSamples, rate: f64) -> Result<f64> {
    renewal_poisson_times(&no_reset.escape_times()?, rate)
}

/// Bootstrap standard error of a statistic of the escape times: resample with
/// replacement `n_resamples` times and take the spread of the estimates.
pub fn bootstrap_se<F>(times: &[f64], estimator: F, n_resamples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if times.is_empty() {
        return Err(Error::EmptySamples);
    }
    if n_resamples < 2 {
        return Err(Error::InvalidParams(
            "need at least 2 bootstrap resamples".to_string(),
        ));
    }
    let mut estimates = Vec::with_capacity(n_resamples);
    let mut resample = vec![0.0; times.len()];
    for b in 0..n_resamples {
        let mut rng = RngStream::new(seed, b as u64);
        for slot in resample.iter_mut() {
            *slot = times[rng.index(times.len())];
        }
        estimates.push(estimator(&resample)?);
    }
    let m = estimates.iter().sum::<f64>() / n_resamples as f64;
    let var = estimates.iter().map(|e| (e - m) * (e - m)).sum::<f64>() / (n_resamples - 1) as f64;
    Ok(var.sqrt())
}

/// Renewal prediction and its bootstrap standard error for the given schedule,
/// from a no-reset sample set.
pub fn renewal_prediction_with_se(
    no_reset: &FptSamples,
    schedule: &ResetSchedule,
    n_resamples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let times = no_reset.escape_times()?;
    match *schedule {
        ResetSchedule::Deterministic { period } => {
            let pred = renewal_deterministic_times(&times, period)?;
            let se = bootstrap_se(
                &times,
                |ts| renewal_deterministic_times(ts, period),
                n_resamples,
                seed,
            )?;
            Ok((pred, se))
        }
        ResetSchedule::Poisson { rate } => {
            let pred = renewal_poisson_times(&times, rate)?;
            let se = bootstrap_se(
                &times,
                |ts| renewal_poisson_times(ts, rate),
                n_resamples,
                seed,
            )?;
            Ok((pred, se))
        }
        ResetSchedule::NoReset => Err(Error::InvalidParams(
            "renewal prediction needs a resetting schedule".to_string(),
        )),
    }
}
