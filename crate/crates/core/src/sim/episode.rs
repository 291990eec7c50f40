use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::controllers::{sea_terms, ControlLaw, LawKind, Sigma};
use crate::dynamics::{BodyState, InertiaParams, RefSample, Reference};
use crate::linalg::Vec3;
use crate::mps::{select_sigma, MpsConfig, MpsError};

use super::lyapunov::lyapunov_sample;
use super::{dp_step, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integrator step, s.
    pub step: f64,
    /// Simulated duration, s.
    pub horizon: f64,
    /// Error angle below which the body counts as stabilized, rad.
    pub stab_threshold: f64,
    /// Control effort is `∫₀^window ‖τ‖ dt`, s.
    pub effort_window: f64,
    /// Keep every n-th integration step in the trajectory log.
    pub log_decimation: usize,
    pub log_trajectory: bool,
    /// Optional dwell, s: the error must stay below the threshold this long
    /// after the crossing for it to count.
    pub dwell: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            horizon: 3.0,
            stab_threshold: 15.0 * PI / 180.0,
            effort_window: 1.0,
            log_decimation: 10,
            log_trajectory: true,
            dwell: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(SimError::InvalidConfig("step must be positive"));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.effort_window) {
            return Err(SimError::InvalidConfig("horizon must cover the effort window"));
        }
        if !(self.effort_window >= 0.0) {
            return Err(SimError::InvalidConfig("effort window must be non-negative"));
        }
        if !(self.stab_threshold > 0.0 && self.stab_threshold < PI) {
            return Err(SimError::InvalidConfig("threshold must lie in (0, pi)"));
        }
        if self.log_decimation == 0 {
            return Err(SimError::InvalidConfig("log decimation must be at least 1"));
        }
        if matches!(self.dwell, Some(d) if !(d >= 0.0)) {
            return Err(SimError::InvalidConfig("dwell must be non-negative"));
        }
        Ok(())
    }

    fn steps(&self, span: f64) -> usize {
        libm::round(span / self.step) as usize
    }
}

/// How the rotation direction is chosen at activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionPolicy {
    Fixed(Sigma),
    Predictive(MpsConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec {
    pub law: ControlLaw,
    pub direction: DirectionPolicy,
}

impl ControllerSpec {
    pub fn fixed(law: ControlLaw, sigma: Sigma) -> Self {
        Self {
            law,
            direction: DirectionPolicy::Fixed(sigma),
        }
    }

    /// σ chosen by prediction for the σ-laws; the geometric law runs as is.
    pub fn predictive(law: ControlLaw, cfg: MpsConfig) -> Self {
        let direction = if law.kind().takes_sigma() {
            DirectionPolicy::Predictive(cfg)
        } else {
            DirectionPolicy::Fixed(Sigma::Positive)
        };
        Self { law, direction }
    }
}

/// One logged instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    /// Error angle the law drives to zero, rad.
    pub theta_e: f64,
    pub n_e_norm: f64,
    /// `|γ(Θₑ)|` for the axis–angle law, NaN otherwise.
    pub alpha_e_norm: f64,
    pub omega: Vec3,
    pub tau: Vec3,
    /// Lyapunov value and rate for the axis–angle law, NaN otherwise.
    pub v: f64,
    pub v_dot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub law: LawKind,
    /// Stabilization time, s; `None` if the threshold was never reached.
    pub settling_time: Option<f64>,
    /// `∫‖τ‖ dt` over the effort window, N·m·s.
    pub effort: f64,
    /// Direction used, for the σ-laws.
    pub sigma: Option<Sigma>,
    /// `[Γ(+1), Γ(−1)]` when σ was predicted.
    pub mps_costs: Option<[f64; 2]>,
    pub initial_error_angle: f64,
    pub final_error_angle: f64,
    pub final_state: BodyState,
    pub trajectory: Vec<TrajectorySample>,
}

struct Probe {
    tau: Vec3,
    theta: f64,
    sample: TrajectorySample,
}

fn probe(
    t: f64,
    s: &BodyState,
    r: &RefSample,
    law: &ControlLaw,
    inertia: &InertiaParams,
    sigma: Sigma,
    detail: bool,
) -> Probe {
    let tau = law.torque(s, r, inertia, sigma);
    let q_e_raw = r.attitude_error(&s.q);
    let theta = law.error_angle(&q_e_raw, sigma);
    let mut sample = TrajectorySample {
        t,
        theta_e: theta,
        n_e_norm: f64::NAN,
        alpha_e_norm: f64::NAN,
        omega: s.omega,
        tau,
        v: f64::NAN,
        v_dot: f64::NAN,
    };
    if detail {
        let q_e = sigma.apply(&q_e_raw);
        sample.n_e_norm = q_e.vector().norm();
        if let ControlLaw::AxisAngle { gains, gamma } = law {
            let omega_e = r.omega_error(s.omega);
            sample.alpha_e_norm = sea_terms(&q_e, omega_e, gamma).gamma.abs();
            let l = lyapunov_sample(&q_e, omega_e, gains, gamma);
            sample.v = l.v;
            sample.v_dot = l.v_dot;
        }
    }
    Probe { tau, theta, sample }
}

/// Simulates one closed-loop episode from `initial` over `cfg.horizon`.
pub fn run_episode<R: Reference + ?Sized>(
    initial: &BodyState,
    reference: &R,
    spec: &ControllerSpec,
    inertia: &InertiaParams,
    cfg: &SimConfig,
) -> Result<EpisodeResult, SimError> {
    cfg.validate()?;
    if !initial.is_finite() {
        return Err(SimError::NonFinite { t: 0.0 });
    }
    let law = &spec.law;
    let (sigma, mps_costs) = match spec.direction {
        DirectionPolicy::Fixed(s) => (s, None),
        DirectionPolicy::Predictive(mps) => {
            if !law.kind().takes_sigma() {
                return Err(MpsError::UnsupportedLaw(law.kind()).into());
            }
            let sel = select_sigma(initial, 0.0, reference, law, inertia, &mps)?;
            (sel.sigma, Some(sel.costs))
        }
    };

    let dt = cfg.step;
    let n_steps = cfg.steps(cfg.horizon);
    let n_effort = cfg.steps(cfg.effort_window);
    let threshold = cfg.stab_threshold;
    let dwell = cfg.dwell.unwrap_or(0.0);

    let mut trajectory = Vec::new();
    if cfg.log_trajectory {
        trajectory.reserve(n_steps / cfg.log_decimation + 2);
    }

    let mut s = *initial;
    let mut effort = 0.0;
    let mut prev_tau_norm = 0.0;
    let mut prev_theta = 0.0;
    let mut crossing: Option<f64> = None;
    let mut settling_time = None;
    let mut initial_error_angle = 0.0;

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        let r = reference.sample(t, &s)?;
        let log_now = cfg.log_trajectory && (k % cfg.log_decimation == 0 || k == n_steps);
        let p = probe(t, &s, &r, law, inertia, sigma, log_now);
        if !p.tau.is_finite() {
            return Err(SimError::NonFinite { t });
        }
        if log_now {
            trajectory.push(p.sample);
        }

        let tau_norm = p.tau.norm();
        if k == 0 {
            initial_error_angle = p.theta;
        } else if k <= n_effort {
            effort += 0.5 * dt * (prev_tau_norm + tau_norm);
        }

        if settling_time.is_none() {
            if p.theta < threshold {
                if crossing.is_none() {
                    crossing = Some(if k == 0 {
                        0.0
                    } else {
                        // linear interpolation between the bracketing samples
                        let frac = (prev_theta - threshold) / (prev_theta - p.theta);
                        t - dt + dt * frac
                    });
                }
                if let Some(c) = crossing {
                    if t - c >= dwell || k == n_steps {
                        settling_time = Some(c);
                    }
                }
            } else {
                crossing = None;
            }
        }
        prev_tau_norm = tau_norm;
        prev_theta = p.theta;

        if k == n_steps {
            break;
        }
        s = dp_step(t, &s, dt, inertia, |tt, ss| {
            let r = reference.sample(tt, ss)?;
            Ok(law.torque(ss, &r, inertia, sigma))
        })?;
    }

    let r_end = reference.sample(n_steps as f64 * dt, &s)?;
    let final_error_angle = law.error_angle(&r_end.attitude_error(&s.q), sigma);

    Ok(EpisodeResult {
        law: law.kind(),
        settling_time,
        effort,
        sigma: law.kind().takes_sigma().then_some(sigma),
        mps_costs,
        initial_error_angle,
        final_error_angle,
        final_state: s,
        trajectory,
    })
}
