//! Model-predictive selection of the rotation direction σ.
//!
//! Each candidate σ is forward-simulated over a short horizon with σ held
//! fixed, accumulating `Γ(σ) = ∫ τᵀRτ + nₑᵀQnₑ dζ`. The cheaper candidate
//! wins; ties go to `σ = +1`.

use crate::controllers::{ControlLaw, LawKind, Sigma};
use crate::dynamics::{BodyState, InertiaParams, Reference};
use crate::linalg::Mat3;
use crate::sim::{dp_step, SimError};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MpsError {
    #[error("invalid predictive-selection config: {0}")]
    InvalidConfig(&'static str),
    #[error("the {0} law has no rotation direction to select")]
    UnsupportedLaw(LawKind),
    #[error("both direction predictions diverged")]
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpsConfig {
    /// Prediction horizon `t_h`, s.
    pub horizon: f64,
    /// Torque weight.
    pub r: Mat3,
    /// Error-quaternion weight.
    pub q: Mat3,
    /// Integrator step used inside the prediction, s.
    pub prediction_step: f64,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self {
            horizon: 0.2,
            r: Mat3::IDENTITY,
            q: Mat3::IDENTITY.scaled(1e-6),
            prediction_step: 1e-3,
        }
    }
}

impl MpsConfig {
    pub fn validate(&self) -> Result<(), MpsError> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(MpsError::InvalidConfig("horizon must be positive"));
        }
        if !(self.prediction_step > 0.0) || self.prediction_step > self.horizon {
            return Err(MpsError::InvalidConfig("prediction step must lie in (0, horizon]"));
        }
        let psd = |m: &Mat3| m.is_finite() && m.asymmetry() <= 1e-12 && m.principal_minors_nonnegative();
        if !psd(&self.r) {
            return Err(MpsError::InvalidConfig("R must be symmetric positive semidefinite"));
        }
        if !psd(&self.q) {
            return Err(MpsError::InvalidConfig("Q must be symmetric positive semidefinite"));
        }
        Ok(())
    }

    fn steps(&self) -> (usize, f64) {
        let n = libm::ceil(self.horizon / self.prediction_step - 1e-9).max(1.0) as usize;
        (n, self.horizon / n as f64)
    }
}

/// Predicted cost of holding `sigma` from `s0` at time `t0`. A prediction that
/// leaves the finite range costs `+∞`.
pub fn predict_cost<R: Reference + ?Sized>(
    sigma: Sigma,
    s0: &BodyState,
    t0: f64,
    reference: &R,
    law: &ControlLaw,
    inertia: &InertiaParams,
    cfg: &MpsConfig,
) -> Result<f64, MpsError> {
    if !law.kind().takes_sigma() {
        return Err(MpsError::UnsupportedLaw(law.kind()));
    }
    cfg.validate()?;
    let (n, dt) = cfg.steps();

    let integrand = |t: f64, s: &BodyState| -> Result<f64, SimError> {
        let r = reference.sample(t, s)?;
        let tau = law.torque(s, &r, inertia, sigma);
        let n_e = sigma.apply(&r.attitude_error(&s.q)).vector();
        Ok(cfg.r.quadratic_form(tau) + cfg.q.quadratic_form(n_e))
    };

    let run = || -> Result<f64, SimError> {
        let mut s = *s0;
        let mut prev = integrand(t0, &s)?;
        let mut cost = 0.0;
        for k in 0..n {
            let t = t0 + k as f64 * dt;
            s = dp_step(t, &s, dt, inertia, |tt, ss| {
                let r = reference.sample(tt, ss)?;
                Ok(law.torque(ss, &r, inertia, sigma))
            })?;
            let next = integrand(t + dt, &s)?;
            cost += 0.5 * dt * (prev + next);
            prev = next;
        }
        Ok(cost)
    };

    Ok(match run() {
        Ok(c) if c.is_finite() => c,
        _ => f64::INFINITY,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub sigma: Sigma,
    /// `[Γ(+1), Γ(−1)]`
    pub costs: [f64; 2],
}

pub fn select_sigma<R: Reference + ?Sized>(
    s0: &BodyState,
    t0: f64,
    reference: &R,
    law: &ControlLaw,
    inertia: &InertiaParams,
    cfg: &MpsConfig,
) -> Result<Selection, MpsError> {
    let plus = predict_cost(Sigma::Positive, s0, t0, reference, law, inertia, cfg)?;
    let minus = predict_cost(Sigma::Negative, s0, t0, reference, law, inertia, cfg)?;
    if plus.is_infinite() && minus.is_infinite() {
        return Err(MpsError::Divergent);
    }
    let sigma = if minus < plus {
        Sigma::Negative
    } else {
        Sigma::Positive
    };
    Ok(Selection {
        sigma,
        costs: [plus, minus],
    })
}
