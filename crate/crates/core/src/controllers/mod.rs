//! Attitude control laws.
//!
//! Three torque laws share the same feedback-linearizing structure
//! `τ = J(…) + ω × Jω`:
//!
//! * [`tau_quaternion`]: proportional action on the error-quaternion vector
//!   part `nₑ = uₑ sin(Θₑ/2)`.
//! * [`tau_axis_angle`]: proportional action on the scaled Euler axis
//!   `αₑ = γ(Θₑ)uₑ` plus a derivative term on `αₑ`.
//! * [`tau_geometric`]: the rotation-matrix tracking law.
//!
//! The first two take a rotation direction [`Sigma`]. `Sigma::Negative`
//! applies the law to the antipodal error quaternion `−q̄ₑ`, which is the same
//! attitude error described by the opposite axis and the complementary angle
//! `Φₑ = 2π − Θₑ`, i.e. the long way round.

mod gains;
mod shaping;

pub use gains::{
    check_gains_axis_angle, GainCertificate, GainError, GainsAxisAngle, GainsGeometric,
    GainsQuaternion,
};
pub use shaping::{
    check_shaping, integrate, sigmoid_gamma, sigmoid_gamma_deriv, Gamma, GammaFunction, Linear,
    ShapingError, ShapingReport, Sigmoid,
};

use core::f64::consts::TAU;
use core::fmt;

use crate::dynamics::{BodyState, InertiaParams, RefSample};
use crate::linalg::Vec3;
use crate::so3::{vee, AxisAngle, UnitQuaternion};

/// Axis-rate singularity guard around `Θₑ ∈ {0, 2π}`, rad.
pub const AXIS_RATE_EPS: f64 = 1e-6;

/// Rotation direction selector σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sigma {
    #[default]
    Positive,
    Negative,
}

impl Sigma {
    pub const BOTH: [Sigma; 2] = [Sigma::Positive, Sigma::Negative];

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sigma::Positive => 1.0,
            Sigma::Negative => -1.0,
        }
    }

    /// `σ q̄ₑ`.
    #[inline]
    pub fn apply(self, q_e: &UnitQuaternion) -> UnitQuaternion {
        match self {
            Sigma::Positive => *q_e,
            Sigma::Negative => q_e.antipode(),
        }
    }

    /// `Φₑ = (1 − σ)π + σΘₑ`.
    pub fn effective_angle(self, theta_e: f64) -> f64 {
        match self {
            Sigma::Positive => theta_e,
            Sigma::Negative => TAU - theta_e,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sigma::Positive => "+1",
            Sigma::Negative => "-1",
        })
    }
}

/// Time derivative of the error axis `u̇ₑ` under `q̄̇ₑ = ½[0; ωₑ] ⊗ q̄ₑ`:
///
/// `u̇ₑ = ½ (cot(Θₑ/2)(ωₑ − (uₑᵀωₑ)uₑ) + ωₑ × uₑ)`.
///
/// Returns zero within [`AXIS_RATE_EPS`] of `Θₑ = 0` or `Θₑ = 2π`, where
/// the axis is undefined.
pub fn axis_rate(q_e: &UnitQuaternion, omega_e: Vec3) -> Vec3 {
    let aa = q_e.to_axis_angle();
    let theta = aa.angle();
    if !(AXIS_RATE_EPS..=TAU - AXIS_RATE_EPS).contains(&theta) {
        return Vec3::ZERO;
    }
    let u = aa.axis();
    let cot_half = q_e.scalar() / q_e.vector().norm();
    let perp = omega_e - u * u.dot(omega_e);
    (perp * cot_half + omega_e.cross(u)) * 0.5
}

/// Scaled Euler axis and its rate for one error quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeaTerms {
    pub axis: Vec3,
    pub angle: f64,
    pub gamma: f64,
    pub gamma_rate: f64,
    /// `αₑ = γ(Θₑ)uₑ`
    pub alpha: Vec3,
    /// `α̇ₑ = ∂γ/∂Θₑ (uₑᵀωₑ) uₑ + γ(Θₑ) u̇ₑ`
    pub alpha_dot: Vec3,
}

/// `αₑ` and `α̇ₑ` for the error quaternion `q_e` (already σ-adjusted).
///
/// The product `γ(Θₑ)u̇ₑ` is formed as `½(γ/sin(Θₑ/2))(cos(Θₑ/2) ωₑ⊥ + sin(Θₑ/2) ωₑ × uₑ)`,
/// whose limit at `Θₑ → 0` is `∂γ/∂Θₑ(0) ωₑ⊥`, so `α̇ₑ` stays continuous
/// through the origin.
pub fn sea_terms<G: GammaFunction + ?Sized>(
    q_e: &UnitQuaternion,
    omega_e: Vec3,
    gamma: &G,
) -> SeaTerms {
    let aa = q_e.to_axis_angle();
    let (u, theta) = (aa.axis(), aa.angle());
    let g = gamma.value(theta);
    let dg = gamma.derivative(theta);
    let along = u.dot(omega_e);
    let perp = omega_e - u * along;

    let scaled_axis_rate = if theta > TAU - AXIS_RATE_EPS {
        Vec3::ZERO
    } else {
        let s = q_e.vector().norm();
        let m = q_e.scalar();
        // γ(Θ)/sin(Θ/2) → 2γ'(0) at the origin
        let ratio = if theta > AXIS_RATE_EPS { g / s } else { 2.0 * dg };
        (perp * (ratio * m) + omega_e.cross(u) * (ratio * s)) * 0.5
    };

    SeaTerms {
        axis: u,
        angle: theta,
        gamma: g,
        gamma_rate: dg,
        alpha: u * g,
        alpha_dot: u * (dg * along) + scaled_axis_rate,
    }
}

/// Quaternion law: `τ = J(k_q σnₑ + k_ω ωₑ + ω̇_d) + ω × Jω`.
pub fn tau_quaternion(
    s: &BodyState,
    r: &RefSample,
    g: &GainsQuaternion,
    inertia: &InertiaParams,
    sigma: Sigma,
) -> Vec3 {
    let q_e = sigma.apply(&r.attitude_error(&s.q));
    let omega_e = r.omega_error(s.omega);
    let accel = q_e.vector() * g.k_q + omega_e * g.k_omega + r.omega_d_dot;
    *inertia.matrix() * accel + inertia.gyroscopic(s.omega)
}

/// Axis–angle law: `τ = J(k_α αₑ(σ) + k_δ α̇ₑ(σ) + k_ω ωₑ + ω̇_d) + ω × Jω`
/// with `αₑ(σ) = σγ(Φₑ)uₑ`.
pub fn tau_axis_angle<G: GammaFunction + ?Sized>(
    s: &BodyState,
    r: &RefSample,
    g: &GainsAxisAngle,
    gamma: &G,
    inertia: &InertiaParams,
    sigma: Sigma,
) -> Vec3 {
    let q_e = sigma.apply(&r.attitude_error(&s.q));
    let omega_e = r.omega_error(s.omega);
    let sea = sea_terms(&q_e, omega_e, gamma);
    let accel =
        sea.alpha * g.k_alpha + sea.alpha_dot * g.k_delta + omega_e * g.k_omega + r.omega_d_dot;
    *inertia.matrix() * accel + inertia.gyroscopic(s.omega)
}

/// Attitude error of the geometric law, `e_R = ½ vee(R_dᵀR − RᵀR_d)`.
pub fn geometric_attitude_error(q: &UnitQuaternion, q_d: &UnitQuaternion) -> Vec3 {
    let r = *q.to_rotation_matrix().matrix();
    let r_d = *q_d.to_rotation_matrix().matrix();
    vee(&(r_d.transpose() * r - r.transpose() * r_d)) * 0.5
}

/// Geometric law:
/// `τ = −k_R e_R − k_Ω e_Ω + ω × Jω − J(ω̂ RᵀR_d Ω_d − RᵀR_d Ω̇_d)`,
/// `e_Ω = ω − RᵀR_d Ω_d`.
///
/// `RefSample` already carries `RᵀR_d Ω_d` as `omega_d`, and `omega_d_dot`
/// is the body-frame derivative of that vector, which equals the bracketed
/// feedforward with its sign flipped.
pub fn tau_geometric(
    s: &BodyState,
    r: &RefSample,
    g: &GainsGeometric,
    inertia: &InertiaParams,
) -> Vec3 {
    let e_r = geometric_attitude_error(&s.q, &r.q_d);
    let e_omega = s.omega - r.omega_d;
    -(g.k_r * e_r) - g.k_omega * e_omega
        + inertia.gyroscopic(s.omega)
        + *inertia.matrix() * r.omega_d_dot
}

/// Which of the three laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawKind {
    Quaternion,
    AxisAngle,
    Geometric,
}

impl LawKind {
    pub const ALL: [LawKind; 3] = [LawKind::Quaternion, LawKind::Geometric, LawKind::AxisAngle];

    pub fn name(self) -> &'static str {
        match self {
            LawKind::Quaternion => "tau_b",
            LawKind::AxisAngle => "tau_gamma",
            LawKind::Geometric => "tau_g",
        }
    }

    pub fn from_name(name: &str) -> Option<LawKind> {
        LawKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the law has a rotation direction to choose.
    pub fn takes_sigma(self) -> bool {
        !matches!(self, LawKind::Geometric)
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized control law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlLaw {
    Quaternion(GainsQuaternion),
    AxisAngle { gains: GainsAxisAngle, gamma: Gamma },
    Geometric(GainsGeometric),
}

impl ControlLaw {
    /// Axis–angle law with gains that pass the stability certificate.
    pub fn axis_angle(gains: GainsAxisAngle, gamma: Gamma) -> Result<Self, GainError> {
        if !check_gains_axis_angle(&gains)?.pd {
            return Err(GainError::NotCertified);
        }
        Ok(ControlLaw::AxisAngle { gains, gamma })
    }

    pub fn kind(&self) -> LawKind {
        match self {
            ControlLaw::Quaternion(_) => LawKind::Quaternion,
            ControlLaw::AxisAngle { .. } => LawKind::AxisAngle,
            ControlLaw::Geometric(_) => LawKind::Geometric,
        }
    }

    /// Torque at one instant. `sigma` is ignored by the geometric law.
    #[inline]
    pub fn torque(
        &self,
        s: &BodyState,
        r: &RefSample,
        inertia: &InertiaParams,
        sigma: Sigma,
    ) -> Vec3 {
        match self {
            ControlLaw::Quaternion(g) => tau_quaternion(s, r, g, inertia, sigma),
            ControlLaw::AxisAngle { gains, gamma } => {
                tau_axis_angle(s, r, gains, gamma, inertia, sigma)
            }
            ControlLaw::Geometric(g) => tau_geometric(s, r, g, inertia),
        }
    }

    /// The error angle the law drives to zero: the angle of `σq̄ₑ` for the
    /// σ-laws, the principal rotation angle in `[0, π]` for the geometric law.
    pub fn error_angle(&self, q_e: &UnitQuaternion, sigma: Sigma) -> f64 {
        match self {
            ControlLaw::Geometric(_) => q_e.principal_angle(),
            _ => sigma.apply(q_e).to_axis_angle().angle(),
        }
    }
}

/// Axis–angle pair of `σq̄ₑ`, for callers that want `(uₑ, Φₑ)` directly.
pub fn effective_axis_angle(q_e: &UnitQuaternion, sigma: Sigma) -> AxisAngle {
    sigma.apply(q_e).to_axis_angle()
}
