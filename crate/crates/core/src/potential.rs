//! Cubic potential with a single escape and its landmark geometry.
//!
//! The potential is `V(x) = alpha x^2 / 2 - beta x^3 / 3`: a well at the
//! origin, a finite barrier on the right at `x_plus = alpha/beta`, and an
//! unbounded wall on the left. The basin of the origin at the barrier energy
//! is `(x_minus, x_plus)` with `x_minus = -alpha/(2 beta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the cubic potential `V(x) = alpha x^2/2 - beta x^3/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            alpha: 6.0,
            beta: 1.0,
        }
    }
}

/// Basin edges and barrier height derived from the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    /// Left basin edge at the barrier energy, `-alpha/(2 beta)`.
    pub x_minus: f64,
    /// Barrier top, `alpha/beta`.
    pub x_plus: f64,
    /// Barrier height `alpha^3 / (6 beta^2)`.
    pub barrier_height: f64,
}

impl PotentialSpec {
    /// Validated constructor; both coefficients must be positive and finite.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let spec = Self { alpha, beta };
        spec.landmarks()?;
        Ok(spec)
    }

    /// Potential energy at `x`.
    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        0.5 * self.alpha * x * x - self.beta * x * x * x / 3.0
    }

    /// `V'(x) = alpha x - beta x^2`.
    #[inline]
    pub fn gradient(&self, x: f64) -> f64 {
        self.alpha * x - self.beta * x * x
    }

    /// Closed-form landmarks; errors when the coefficients do not describe a
    /// well with a finite barrier.
    pub fn landmarks(&self) -> Result<Landmarks> {
        if !(self.alpha > 0.0 && self.beta > 0.0)
            || !self.alpha.is_finite()
            || !self.beta.is_finite()
        {
            return Err(Error::InvalidPotential {
                alpha: self.alpha,
                beta: self.beta,
            });
        }
        Ok(Landmarks {
            x_minus: -self.alpha / (2.0 * self.beta),
            x_plus: self.alpha / self.beta,
            barrier_height: self.alpha.powi(3) / (6.0 * self.beta * self.beta),
        })
    }

    /// Total mechanical energy `v^2/2 + V(x)` of a unit-mass particle.
    #[inline]
    pub fn total_energy(&self, x: f64, v: f64) -> f64 {
        0.5 * v * v + self.evaluate(x)
    }
}
