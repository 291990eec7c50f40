use core::f64::consts::FRAC_PI_4;

use crate::dynamics::InertiaParams;
use crate::linalg::Mat3;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GainError {
    #[error("gain {name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("gain matrix {0} is not symmetric positive definite")]
    NotPositiveDefinite(&'static str),
    #[error("axis-angle gains fail the stability condition k_alpha > k_delta*k_omega/4")]
    NotCertified,
}

fn positive(name: &'static str, value: f64) -> Result<f64, GainError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(GainError::NonPositive { name, value })
    }
}

/// Gains of the axis–angle law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainsAxisAngle {
    pub k_alpha: f64,
    pub k_delta: f64,
    pub k_omega: f64,
}

impl GainsAxisAngle {
    pub const fn new(k_alpha: f64, k_delta: f64, k_omega: f64) -> Self {
        Self {
            k_alpha,
            k_delta,
            k_omega,
        }
    }

    /// The stability inequality itself, `k_α > k_δ k_ω / 4`.
    pub fn satisfies_condition(&self) -> bool {
        self.k_alpha > 0.25 * self.k_delta * self.k_omega
    }
}

/// Positive-definiteness certificate for the axis–angle gains.
///
/// `w` is the matrix of the negated Lyapunov rate:
/// `V̇ = −[γuᵀ ωᵀ] W [γu; ω]` with `W = [[k_δ, k_δk_ω/2k_α], [k_δk_ω/2k_α, k_ω/k_α]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCertificate {
    pub w: [[f64; 2]; 2],
    pub det_w: f64,
    /// Both leading principal minors of `W` positive.
    pub pd: bool,
    /// Eigenvalues of the quadratic part of `V`: `0` and `(k_δ² + 1)/2k_α`.
    pub v_eigenvalues: [f64; 2],
}

pub fn check_gains_axis_angle(g: &GainsAxisAngle) -> Result<GainCertificate, GainError> {
    let k_alpha = positive("k_alpha", g.k_alpha)?;
    let k_delta = positive("k_delta", g.k_delta)?;
    let k_omega = positive("k_omega", g.k_omega)?;
    let off = k_delta * k_omega / (2.0 * k_alpha);
    let w = [[k_delta, off], [off, k_omega / k_alpha]];
    let det_w = w[0][0] * w[1][1] - w[0][1] * w[1][0];
    Ok(GainCertificate {
        w,
        det_w,
        pd: w[0][0] > 0.0 && det_w > 0.0,
        v_eigenvalues: [0.0, (k_delta * k_delta + 1.0) / (2.0 * k_alpha)],
    })
}

/// Gains of the quaternion law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainsQuaternion {
    pub k_q: f64,
    pub k_omega: f64,
}

impl GainsQuaternion {
    pub fn new(k_q: f64, k_omega: f64) -> Result<Self, GainError> {
        Ok(Self {
            k_q: positive("k_q", k_q)?,
            k_omega: positive("k_omega", k_omega)?,
        })
    }
}

/// Matrix gains of the geometric law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainsGeometric {
    pub k_r: Mat3,
    pub k_omega: Mat3,
}

impl GainsGeometric {
    pub fn new(k_r: Mat3, k_omega: Mat3) -> Result<Self, GainError> {
        let spd = |m: &Mat3| m.is_finite() && m.asymmetry() <= 1e-12 * m.frobenius_norm() && m.leading_minors_positive();
        if !spd(&k_r) {
            return Err(GainError::NotPositiveDefinite("k_R"));
        }
        if !spd(&k_omega) {
            return Err(GainError::NotPositiveDefinite("k_Omega"));
        }
        Ok(Self { k_r, k_omega })
    }

    /// `k_R = k_q sin(π/4) J`, `k_Ω = k_ω J`: the same damping as the
    /// quaternion law and equal proportional torque at a quarter-turn error.
    pub fn matched(q: &GainsQuaternion, inertia: &InertiaParams) -> Self {
        Self::scaled(q.k_q * libm::sin(FRAC_PI_4), q.k_omega, inertia)
            .expect("positive multiples of an SPD inertia are SPD")
    }

    /// `k_R = k_r J`, `k_Ω = k_omega J`.
    pub fn scaled(k_r: f64, k_omega: f64, inertia: &InertiaParams) -> Result<Self, GainError> {
        let j = inertia.matrix();
        Self::new(
            j.scaled(positive("k_R", k_r)?),
            j.scaled(positive("k_Omega", k_omega)?),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn published_gain_set_is_certified() {
        let c = check_gains_axis_angle(&GainsAxisAngle::new(1e3, 10.0, 1e2)).unwrap();
        assert!(c.pd);
        assert_eq!(c.w, [[10.0, 0.5], [0.5, 0.1]]);
        assert!((c.det_w - 0.75).abs() < 1e-15);
        assert!((c.v_eigenvalues[1] - 101.0 / 2000.0).abs() < 1e-15);
    }

    #[test]
    fn weak_proportional_gain_is_rejected() {
        let g = GainsAxisAngle::new(100.0, 10.0, 100.0);
        assert!(!g.satisfies_condition());
        assert!(!check_gains_axis_angle(&g).unwrap().pd);
    }

    #[test]
    fn non_positive_gains_are_errors() {
        assert!(matches!(
            check_gains_axis_angle(&GainsAxisAngle::new(1.0, 0.0, 1.0)),
            Err(GainError::NonPositive { name: "k_delta", .. })
        ));
        assert!(check_gains_axis_angle(&GainsAxisAngle::new(1.0, 1.0, -1.0)).is_err());
        assert!(GainsQuaternion::new(0.0, 1.0).is_err());
        assert!(GainsGeometric::new(Mat3::from_diagonal([1.0, -1.0, 1.0]), Mat3::IDENTITY).is_err());
    }

    #[test]
    fn matched_geometric_gains() {
        let j = InertiaParams::crazyflie();
        let g = GainsGeometric::matched(&GainsQuaternion::new(1e3, 1e2).unwrap(), &j);
        assert!((g.k_r.m[0][0] - 1e3 * libm::sin(FRAC_PI_4) * 16.6e-6).abs() < 1e-15);
        assert!((g.k_omega.m[2][2] - 1e2 * 29.3e-6).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn pd_verdict_equals_inequality(
            k_alpha in 1e-2..1e4f64, k_delta in 1e-2..1e2f64, k_omega in 1e-2..1e3f64,
        ) {
            let g = GainsAxisAngle::new(k_alpha, k_delta, k_omega);
            let bound = 0.25 * k_delta * k_omega;
            prop_assume!((k_alpha - bound).abs() > 1e-9 * bound);
            prop_assert_eq!(check_gains_axis_angle(&g).unwrap().pd, g.satisfies_condition());
        }
    }
}
