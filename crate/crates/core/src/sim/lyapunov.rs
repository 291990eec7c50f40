//! Lyapunov certificate for the axis–angle closed loop.

use crate::controllers::{axis_rate, GainsAxisAngle, GammaFunction};
use crate::linalg::Vec3;
use crate::so3::UnitQuaternion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    pub v: f64,
    pub v_dot: f64,
}

/// `V = (k_δ²/2k_α)γ² + (k_δ/k_α)γ uₑᵀωₑ + (1/2k_α)ωₑᵀωₑ + ∫₀^Θₑ γ`.
pub fn lyapunov_v<G: GammaFunction + ?Sized>(
    q_e: &UnitQuaternion,
    omega_e: Vec3,
    gains: &GainsAxisAngle,
    gamma: &G,
) -> f64 {
    let aa = q_e.to_axis_angle();
    let g = gamma.value(aa.angle());
    let ka = gains.k_alpha;
    let kd = gains.k_delta;
    kd * kd / (2.0 * ka) * g * g
        + kd / ka * g * aa.axis().dot(omega_e)
        + omega_e.norm_squared() / (2.0 * ka)
        + gamma.integral(aa.angle())
}

/// `V̇ = −k_δγ² − (k_δk_ω/k_α)γ uₑᵀωₑ − (k_ω/k_α)ωₑᵀωₑ`, the quadratic form
/// of `W` in `[γuₑ; ωₑ]`.
pub fn lyapunov_vdot<G: GammaFunction + ?Sized>(
    q_e: &UnitQuaternion,
    omega_e: Vec3,
    gains: &GainsAxisAngle,
    gamma: &G,
) -> f64 {
    let aa = q_e.to_axis_angle();
    let g = gamma.value(aa.angle());
    let (ka, kd, kw) = (gains.k_alpha, gains.k_delta, gains.k_omega);
    -(kd * g * g + kd * kw / ka * g * aa.axis().dot(omega_e) + kw / ka * omega_e.norm_squared())
}

pub fn lyapunov_sample<G: GammaFunction + ?Sized>(
    q_e: &UnitQuaternion,
    omega_e: Vec3,
    gains: &GainsAxisAngle,
    gamma: &G,
) -> LyapunovSample {
    LyapunovSample {
        v: lyapunov_v(q_e, omega_e, gains, gamma),
        v_dot: lyapunov_vdot(q_e, omega_e, gains, gamma),
    }
}

/// Closed-loop error acceleration under the axis–angle law,
/// `ω̇ₑ = −k_α γuₑ − k_δ(γu̇ₑ + ∂γ/∂Θₑ (uₑᵀωₑ)uₑ) − k_ω ωₑ`.
pub fn closed_loop_error_rate<G: GammaFunction + ?Sized>(
    q_e: &UnitQuaternion,
    omega_e: Vec3,
    gains: &GainsAxisAngle,
    gamma: &G,
) -> Vec3 {
    let aa = q_e.to_axis_angle();
    let (u, theta) = (aa.axis(), aa.angle());
    let g = gamma.value(theta);
    let dg = gamma.derivative(theta);
    let u_dot = axis_rate(q_e, omega_e);
    -(u * (gains.k_alpha * g))
        - (u_dot * g + u * (dg * u.dot(omega_e))) * gains.k_delta
        - omega_e * gains.k_omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::Sigmoid;
    use crate::so3::AxisAngle;

    fn gains() -> GainsAxisAngle {
        GainsAxisAngle::new(1e3, 10.0, 1e2)
    }

    #[test]
    fn zero_at_fixed_point() {
        let g = Sigmoid::new(1.0, 1.5).unwrap();
        let s = lyapunov_sample(&UnitQuaternion::IDENTITY, Vec3::ZERO, &gains(), &g);
        assert_eq!(s, LyapunovSample { v: 0.0, v_dot: 0.0 });
    }

    #[test]
    fn static_error_drops_cross_terms() {
        let g = Sigmoid::new(1.0, 1.5).unwrap();
        let theta = 2.2;
        let q_e = UnitQuaternion::from_axis_angle(&AxisAngle::new(Vec3::Y, theta).unwrap());
        let gv = g.value(theta);
        let want = 100.0 / 2000.0 * gv * gv + g.integral(theta);
        assert!((lyapunov_v(&q_e, Vec3::ZERO, &gains(), &g) - want).abs() < 1e-15);
        assert!((lyapunov_vdot(&q_e, Vec3::ZERO, &gains(), &g) + 10.0 * gv * gv).abs() < 1e-13);
    }
}
