//! Open-loop rotational dynamics and reference kinematics.

use crate::linalg::{Mat3, Vec3};
use crate::so3::{AxisAngle, Quaternion, UnitQuaternion};

/// Crazyflie 2.1 principal inertia, kg·m².
pub const CRAZYFLIE_INERTIA: [f64; 3] = [16.6e-6, 16.7e-6, 29.3e-6];

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("inertia matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("inertia matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("non-finite value in dynamics input")]
    NonFinite,
    #[error("reference rate is inconsistent with a unit quaternion (scalar part {0:e})")]
    InconsistentReference(f64),
}

/// Body inertia `J` with its inverse cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaParams {
    j: Mat3,
    j_inv: Mat3,
}

impl InertiaParams {
    pub fn new(j: Mat3) -> Result<Self, DynamicsError> {
        if !j.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        let asym = j.asymmetry();
        if asym > 1e-12 {
            return Err(DynamicsError::NotSymmetric(asym));
        }
        if !j.leading_minors_positive() {
            return Err(DynamicsError::NotPositiveDefinite);
        }
        let j_inv = j.inverse().ok_or(DynamicsError::NotPositiveDefinite)?;
        Ok(Self { j, j_inv })
    }

    pub fn diagonal(d: [f64; 3]) -> Result<Self, DynamicsError> {
        Self::new(Mat3::from_diagonal(d))
    }

    pub fn crazyflie() -> Self {
        Self::diagonal(CRAZYFLIE_INERTIA).expect("positive diagonal")
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3 {
        &self.j
    }

    #[inline]
    pub fn inverse(&self) -> &Mat3 {
        &self.j_inv
    }

    /// Gyroscopic term `ω × Jω`.
    #[inline]
    pub fn gyroscopic(&self, omega: Vec3) -> Vec3 {
        omega.cross(self.j * omega)
    }
}

/// Attitude of the body frame and its angular velocity in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyState {
    pub q: UnitQuaternion,
    pub omega: Vec3,
}

impl BodyState {
    pub fn new(q: UnitQuaternion, omega: Vec3) -> Self {
        Self { q, omega }
    }

    /// Body rotated by `angle` about `axis` from the reference frame, spinning
    /// at `omega` (body coordinates).
    pub fn from_axis_angle(aa: &AxisAngle, omega: Vec3) -> Self {
        Self::new(UnitQuaternion::from_axis_angle(aa), omega)
    }

    pub fn is_finite(&self) -> bool {
        self.q.quaternion().is_finite() && self.omega.is_finite()
    }

    /// Rotational kinetic energy `½ωᵀJω`.
    pub fn kinetic_energy(&self, inertia: &InertiaParams) -> f64 {
        0.5 * inertia.matrix().quadratic_form(self.omega)
    }

    /// Angular momentum in the reference frame, `S·Jω`.
    pub fn inertial_momentum(&self, inertia: &InertiaParams) -> Vec3 {
        self.q.rotate(*inertia.matrix() * self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub q_dot: Quaternion,
    pub omega_dot: Vec3,
}

/// `q̇ = ½ q ⊗ [0, ω]`, `ω̇ = J⁻¹(τ − ω × Jω)`.
///
/// Takes a raw quaternion so integrator stages can be evaluated without
/// renormalizing.
#[inline]
pub fn raw_state_derivative(
    q: Quaternion,
    omega: Vec3,
    tau: Vec3,
    inertia: &InertiaParams,
) -> StateDerivative {
    StateDerivative {
        q_dot: (q * Quaternion::pure(omega)).scale(0.5),
        omega_dot: *inertia.inverse() * (tau - inertia.gyroscopic(omega)),
    }
}

pub fn state_derivative(s: &BodyState, tau: Vec3, inertia: &InertiaParams) -> StateDerivative {
    raw_state_derivative(s.q.quaternion(), s.omega, tau, inertia)
}

/// Desired angular velocity in desired-frame coordinates from the reference
/// attitude and its rate: vector part of `2 q_d⁻¹ ⊗ q̇_d`.
pub fn desired_omega_from_qd(
    q_d: &UnitQuaternion,
    q_d_dot: Quaternion,
) -> Result<Vec3, DynamicsError> {
    let w = (q_d.inverse().quaternion() * q_d_dot).scale(2.0);
    if !w.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    if w.w.abs() > 1e-6 {
        return Err(DynamicsError::InconsistentReference(w.w));
    }
    Ok(w.v)
}

/// `ω_d = Sᵀ S_d ω̂_d`: desired angular velocity moved into body coordinates.
pub fn transform_desired_omega(
    omega_hat_d: Vec3,
    q: &UnitQuaternion,
    q_d: &UnitQuaternion,
) -> Vec3 {
    q.inverse().rotate(q_d.rotate(omega_hat_d))
}

/// Reference quantities at one instant, all in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSample {
    pub q_d: UnitQuaternion,
    pub omega_d: Vec3,
    pub omega_d_dot: Vec3,
}

impl RefSample {
    pub const REST: RefSample = RefSample {
        q_d: UnitQuaternion::IDENTITY,
        omega_d: Vec3::ZERO,
        omega_d_dot: Vec3::ZERO,
    };

    /// Angular-velocity tracking error `ω_e = ω_d − ω`.
    #[inline]
    pub fn omega_error(&self, omega: Vec3) -> Vec3 {
        self.omega_d - omega
    }

    /// Attitude-error quaternion for the given body attitude.
    #[inline]
    pub fn attitude_error(&self, q: &UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion::error(q, &self.q_d)
    }
}

/// Time-indexed attitude reference. Implementations supply the feedforward
/// `ω̇_d` analytically.
pub trait Reference: Sync {
    fn sample(&self, t: f64, state: &BodyState) -> Result<RefSample, DynamicsError>;
}

/// Fixed desired attitude, zero desired angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantAttitude(pub UnitQuaternion);

impl Default for ConstantAttitude {
    fn default() -> Self {
        Self(UnitQuaternion::IDENTITY)
    }
}

impl Reference for ConstantAttitude {
    fn sample(&self, _t: f64, _state: &BodyState) -> Result<RefSample, DynamicsError> {
        Ok(RefSample {
            q_d: self.0,
            omega_d: Vec3::ZERO,
            omega_d_dot: Vec3::ZERO,
        })
    }
}

/// Desired frame spinning at a constant `rate` about a desired-frame-fixed
/// `axis`, starting from `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSpin {
    pub start: UnitQuaternion,
    pub axis: Vec3,
    pub rate: f64,
}

impl UniformSpin {
    pub fn attitude(&self, t: f64) -> UnitQuaternion {
        let aa = AxisAngle::new(self.axis, self.rate * t).expect("spin axis is non-zero");
        self.start * UnitQuaternion::from_axis_angle(&aa)
    }

    pub fn attitude_rate(&self, t: f64) -> Quaternion {
        let spin = Quaternion::pure(self.axis * (0.5 * self.rate));
        self.attitude(t).quaternion() * spin
    }
}

impl Reference for UniformSpin {
    fn sample(&self, t: f64, state: &BodyState) -> Result<RefSample, DynamicsError> {
        let q_d = self.attitude(t);
        let omega_hat = desired_omega_from_qd(&q_d, self.attitude_rate(t))?;
        let omega_d = transform_desired_omega(omega_hat, &state.q, &q_d);
        // d/dt (SᵀS_d ω̂_d) with constant ω̂_d
        let omega_d_dot = omega_d.cross(state.omega);
        Ok(RefSample {
            q_d,
            omega_d,
            omega_d_dot,
        })
    }
}
