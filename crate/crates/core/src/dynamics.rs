//! Underdamped Langevin dynamics as a two-dimensional SDE with additive noise.
//!
//! The equation of motion for a unit-mass particle is
//! `x'' + eta x' + V'(x) = xi(t)` where `xi` is Gaussian white noise entering
//! the velocity equation with amplitude `eps`: over one step the velocity
//! receives `eps * dW` with `dW ~ Normal(0, dt)`. The force autocorrelation is
//! therefore `<xi(t) xi(t')> = eps^2 delta(t - t')`, and the Einstein relation
//! gives `D = eps^2 / 2` and `k_B T = eps^2 / (2 eta)`. Written as a
//! first-order system the noise is additive and enters the velocity only,
//! which is what the fixed-step stochastic Heun scheme in [`step`] relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::rng::RngStream;

/// Physics and integration parameters for one simulation setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Damping rate.
    pub eta: f64,
    /// Noise amplitude of the thermal force on the velocity equation.
    pub eps: f64,
    /// Initial position.
    pub x0: f64,
    /// Initial velocity.
    pub v0: f64,
    /// Integrator step.
    pub dt: f64,
    /// Censoring horizon: trajectories still trapped at `t_max` are censored.
    pub t_max: f64,
    /// Absorbing threshold; first contact ends the trajectory.
    pub absorb_x: f64,
    /// Position past which an escape is treated as final in the no-comeback
    /// validation.
    pub validate_x: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            eta: 0.1,
            eps: 1.8,
            x0: -2.899,
            v0: 0.0,
            dt: 1e-3,
            t_max: 1e5,
            absorb_x: 6.0,
            validate_x: 100.0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return bad("dt must be positive and finite");
        }
        if self.t_max.is_nan() || self.t_max <= 0.0 {
            return bad("t_max must be positive");
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad("eps must be non-negative and finite");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be non-negative and finite");
        }
        if self.validate_x.is_nan() || self.validate_x <= self.absorb_x {
            return bad("validate_x must lie beyond absorb_x");
        }
        if !(self.x0.is_finite() && self.v0.is_finite() && self.absorb_x.is_finite()) {
            return bad("x0, v0 and absorb_x must be finite");
        }
        Ok(())
    }

    /// Diffusion constant `D = eps^2 / 2`.
    pub fn diffusion_constant(&self) -> f64 {
        self.eps * self.eps / 2.0
    }

    /// Thermal energy `k_B T = eps^2 / (2 eta)`; undefined for undamped motion.
    pub fn thermal_energy(&self) -> Option<f64> {
        (self.eta > 0.0).then(|| self.eps * self.eps / (2.0 * self.eta))
    }

    /// Light damping holds when `eta^2` is below the squared natural frequency
    /// of the linearized well, which equals `alpha` for the cubic potential.
    pub fn is_light_damping(&self, spec: &PotentialSpec) -> bool {
        self.eta * self.eta < spec.alpha
    }
}

/// Phase-space point with elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub v: f64,
    pub t: f64,
}

/// Drift field `(dx/dt, dv/dt) = (v, -eta v - V'(x))`.
#[inline]
pub fn drift(spec: &PotentialSpec, params: &SimParams, s: &State) -> (f64, f64) {
    (s.v, -params.eta * s.v - spec.gradient(s.x))
}

/// One sample of `Normal(0, dt)`; advances the stream.
#[inline]
pub fn gaussian_increment(rng: &mut RngStream, dt: f64) -> f64 {
    rng.standard_normal() * dt.sqrt()
}

/// One stochastic Heun step: deterministic predictor-corrector on the drift,
/// then the noise kick `eps * dW` applied to the velocity once. Strong order
/// 1.0 for this additive-noise system.
#[inline]
pub fn step(spec: &PotentialSpec, params: &SimParams, s: &State, dw: f64) -> Result<State> {
    let dt = params.dt;
    let kx1 = s.v;
    let kv1 = -params.eta * s.v - spec.gradient(s.x);
    let xp = s.x + dt * kx1;
    let vp = s.v + dt * kv1;
    let kx2 = vp;
    let kv2 = -params.eta * vp - spec.gradient(xp);
    let x = s.x + 0.5 * dt * (kx1 + kx2);
    let v = s.v + 0.5 * dt * (kv1 + kv2) + params.eps * dw;
    let t = s.t + dt;
    if x.is_finite() && v.is_finite() {
        Ok(State { x, v, t })
    } else {
        Err(Error::NumericalBlowup { x, v, t })
    }
}
