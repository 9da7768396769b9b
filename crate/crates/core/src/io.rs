//! CSV and JSON serialization of samples, histograms, fits, and sweep curves.
//!
//! CSV output uses `.` as the decimal separator, no thousands separators, and
//! LF line endings. Floats are printed with Rust's shortest round-trip
//! formatting, so files are bitwise reproducible for identical inputs. JSON is
//! pretty-printed with the struct field order, which is stable for diffing.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{MinimaReport, SweepCurve};
use crate::error::Result;
use crate::fpt_engine::FptSamples;
use crate::stats::{summarize, DecayFit, Histogram, SummaryStats};

/// Self-describing JSON form of an ensemble: provenance, summary when the
/// sample is complete, and the raw outcomes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplesDocument {
    pub potential: crate::potential::PotentialSpec,
    pub params: crate::dynamics::SimParams,
    pub schedule: crate::resetting::ResetSchedule,
    pub reset_point: crate::resetting::ResetPoint,
    pub master_seed: u64,
    pub n_trajectories: usize,
    pub n_censored: usize,
    /// Absent when any trajectory was censored.
    pub summary: Option<SummaryStats>,
    pub outcomes: Vec<crate::fpt_engine::TrajectoryOutcome>,
}

impl From<&FptSamples> for SamplesDocument {
    fn from(samples: &FptSamples) -> Self {
        Self {
            potential: samples.potential,
            params: samples.params,
            schedule: samples.schedule,
            reset_point: samples.reset_point,
            master_seed: samples.master_seed,
            n_trajectories: samples.n(),
            n_censored: samples.n_censored(),
            summary: summarize(samples).ok(),
            outcomes: samples.outcomes.clone(),
        }
    }
}

impl From<SamplesDocument> for FptSamples {
    fn from(doc: SamplesDocument) -> Self {
        Self {
            potential: doc.potential,
            params: doc.params,
            schedule: doc.schedule,
            reset_point: doc.reset_point,
            master_seed: doc.master_seed,
            outcomes: doc.outcomes,
        }
    }
}

pub fn samples_to_json(samples: &FptSamples) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SamplesDocument::from(
        samples,
    ))?)
}

pub fn samples_from_json(json: &str) -> Result<FptSamples> {
    let doc: SamplesDocument = serde_json::from_str(json)?;
    Ok(doc.into())
}

pub fn samples_to_csv(samples: &FptSamples) -> String {
    let mut out = String::from("traj_index,fpt,n_resets,censored,max_x_reached\n");
    for (i, o) in samples.outcomes.iter().enumerate() {
        let fpt = o.fpt.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{i},{fpt},{},{},{}",
            o.n_resets, o.censored, o.max_x_reached
        );
    }
    out
}

pub fn histogram_to_csv(hist: &Histogram) -> String {
    let mut out = String::from("left_edge,relative_frequency\n");
    for b in &hist.bins {
        let _ = writeln!(out, "{},{}", b.left_edge, b.relative_frequency);
    }
    out
}

pub fn histogram_to_json(hist: &Histogram) -> Result<String> {
    Ok(serde_json::to_string_pretty(hist)?)
}

pub fn decay_fit_to_csv(fit: &DecayFit) -> String {
    format!("a,b,r_squared\n{},{},{}\n", fit.a, fit.b, fit.r_squared)
}

pub fn sweep_curve_to_csv(curve: &SweepCurve) -> String {
    let mut out = String::from("control,mean,std,ci95\n");
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.control, p.stats.mean, p.stats.std_dev, p.stats.ci95_half_width
        );
    }
    out
}

pub fn sweep_curve_to_json(curve: &SweepCurve) -> Result<String> {
    Ok(serde_json::to_string_pretty(curve)?)
}

pub fn minima_report_to_csv(report: &MinimaReport) -> String {
    let mut out = String::from("kind,control,mean\n");
    let _ = writeln!(out, "baseline,,{}", report.baseline);
    for (control, mean) in &report.local_minima {
        let _ = writeln!(out, "local_min,{control},{mean}");
    }
    if let Some((control, mean)) = report.global_min {
        let _ = writeln!(out, "global_min,{control},{mean}");
    }
    if let Some(ratio) = report.ratio_at_global {
        let _ = writeln!(out, "ratio_at_global,,{ratio}");
    }
    out
}

pub fn minima_report_to_json(report: &MinimaReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}
