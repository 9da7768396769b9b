use thiserror::Error;

/// Errors surfaced by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: alpha and beta must be positive and finite (alpha={alpha}, beta={beta})")]
    InvalidPotential { alpha: f64, beta: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid reset schedule: {0}")]
    InvalidSchedule(String),

    #[error("numerical blowup at t={t}: x={x}, v={v}")]
    NumericalBlowup { x: f64, v: f64, t: f64 },

    #[error("ensemble failed: {} trajectories blew up (indices {:?}{})",
        .indices.len(),
        &.indices[..usize::min(8, .indices.len())],
        if .indices.len() > 8 { ", ..." } else { "" })]
    EnsembleFailure { indices: Vec<usize> },

    #[error("{n_censored} of {n} trajectories were censored at t_max; this statistic requires complete samples")]
    CensoredSamples { n_censored: usize, n: usize },

    #[error("empty sample set")]
    EmptySamples,

    #[error("exponential decay fit needs at least 3 peaks, got {0}")]
    InsufficientPeaks(usize),

    #[error("all peak heights must be positive for the log-linear decay fit")]
    NonpositiveRf,

    #[error("no sample escapes before t_r={t_r}; restart prediction undefined")]
    NoSuccessfulAttempt { t_r: f64 },

    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
