//! Closed-loop simulation: integration, episodes and their metrics.

mod episode;
mod integrator;
mod lyapunov;

pub use episode::{
    run_episode, ControllerSpec, DirectionPolicy, EpisodeResult, SimConfig, TrajectorySample,
};
pub use integrator::{dp_step, dp_step_embedded};
pub use lyapunov::{
    closed_loop_error_rate, lyapunov_sample, lyapunov_v, lyapunov_vdot, LyapunovSample,
};

use crate::controllers::GainError;
use crate::dynamics::DynamicsError;
use crate::mps::MpsError;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("state or torque became non-finite at t = {t} s")]
    NonFinite { t: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Reference(#[from] DynamicsError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Gains(#[from] GainError),
}
