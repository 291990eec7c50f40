//! Quaternion and rotation algebra.
//!
//! Quaternions are scalar-first, `[m, n]`, with the Hamilton product. A unit
//! quaternion `q` describes the attitude of a body frame relative to a
//! reference frame; `q.to_rotation_matrix()` maps body coordinates into
//! reference coordinates.

use core::f64::consts::TAU;
use core::ops::{Add, Mul, Neg};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{Mat3, Vec3};

/// Below this vector-part norm the rotation axis is taken as [`CONVENTION_AXIS`].
pub const AXIS_EPS: f64 = 1e-9;

/// Axis reported for the trivial rotation.
pub const CONVENTION_AXIS: Vec3 = Vec3::Z;

/// Largest representable angle strictly below 2π.
pub const ANGLE_SUP: f64 = f64::from_bits(TAU.to_bits() - 1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum So3Error {
    #[error("rotation axis has zero length")]
    ZeroAxis,
    #[error("non-finite input")]
    NonFinite,
    #[error("quaternion has zero norm")]
    ZeroNorm,
}

/// General (not necessarily unit) quaternion. Used for rates and raw
/// integrator state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub v: Vec3,
}

impl Quaternion {
    pub const fn new(w: f64, v: Vec3) -> Self {
        Self { w, v }
    }

    /// Pure quaternion `[0, v]`.
    pub const fn pure(v: Vec3) -> Self {
        Self { w: 0.0, v }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], Vec3::new(a[1], a[2], a[3]))
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.v.x, self.v.y, self.v.z]
    }

    pub fn dot(self, o: Quaternion) -> f64 {
        self.w * o.w + self.v.dot(o.v)
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn conjugate(self) -> Quaternion {
        Quaternion::new(self.w, -self.v)
    }

    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.v * s)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.v.is_finite()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, b: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * b.w - self.v.dot(b.v),
            b.v * self.w + self.v * b.w + self.v.cross(b.v),
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.v + o.v)
    }
}

/// Unit quaternion. The norm is restored after every operation that could
/// drift it. `q` and `-q` are the same attitude; nothing here picks a sign
/// implicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::new(1.0, Vec3::ZERO));

    pub fn new_normalize(q: Quaternion) -> Result<Self, So3Error> {
        if !q.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let n = q.norm();
        if n == 0.0 {
            return Err(So3Error::ZeroNorm);
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Normalizes `[m, n]`.
    pub fn from_parts(m: f64, n: Vec3) -> Result<Self, So3Error> {
        Self::new_normalize(Quaternion::new(m, n))
    }

    /// Caller guarantees `q` is already unit length to rounding.
    pub(crate) fn renormalized(q: Quaternion) -> Self {
        Self(q.scale(1.0 / q.norm()))
    }

    #[inline]
    pub fn scalar(&self) -> f64 {
        self.0.w
    }

    #[inline]
    pub fn vector(&self) -> Vec3 {
        self.0.v
    }

    #[inline]
    pub fn quaternion(&self) -> Quaternion {
        self.0
    }

    /// Inverse of a unit quaternion: its conjugate `(m, -n)`.
    pub fn inverse(&self) -> UnitQuaternion {
        Self(self.0.conjugate())
    }

    /// The other representation, `-q`, of the same attitude.
    pub fn antipode(&self) -> UnitQuaternion {
        Self(self.0.scale(-1.0))
    }

    /// Attitude-error quaternion `q⁻¹ ⊗ q_d`: the rotation taking the current
    /// frame to the desired one, expressed in the current frame.
    pub fn error(q: &UnitQuaternion, q_d: &UnitQuaternion) -> UnitQuaternion {
        q.inverse() * *q_d
    }

    /// Rotation angle in `[0, 2π)` and unit axis.
    pub fn to_axis_angle(&self) -> AxisAngle {
        let n = self.0.v;
        let n_norm = n.norm();
        let mut angle = 2.0 * libm::atan2(n_norm, self.0.w);
        if angle >= TAU {
            angle = ANGLE_SUP;
        }
        let axis = if n_norm > AXIS_EPS {
            n * (1.0 / n_norm)
        } else {
            CONVENTION_AXIS
        };
        AxisAngle { axis, angle }
    }

    pub fn from_axis_angle(aa: &AxisAngle) -> UnitQuaternion {
        let half = 0.5 * aa.angle;
        Self::renormalized(Quaternion::new(libm::cos(half), aa.axis * libm::sin(half)))
    }

    /// Angle of the physical rotation in `[0, π]`, ignoring the cover sign.
    pub fn principal_angle(&self) -> f64 {
        2.0 * libm::atan2(self.0.v.norm(), self.0.w.abs())
    }

    pub fn to_rotation_matrix(&self) -> RotationMatrix {
        let m = self.0.w;
        let n = self.0.v;
        let diag = m * m - n.norm_squared();
        let mut r = [[0.0; 3]; 3];
        let nv = n.to_array();
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = 2.0 * nv[i] * nv[j] + if i == j { diag } else { 0.0 };
            }
        }
        let skew = n.hat().scaled(2.0 * m);
        RotationMatrix(Mat3::from_rows(r) + skew)
    }

    /// `q ⊗ [0, v] ⊗ q⁻¹`.
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        (self.0 * Quaternion::pure(v) * self.0.conjugate()).v
    }

    pub fn norm_error(&self) -> f64 {
        (self.0.norm() - 1.0).abs()
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    #[inline]
    fn mul(self, b: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion::renormalized(self.0 * b.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        self.antipode()
    }
}

/// Euler axis and rotation angle, angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    axis: Vec3,
    angle: f64,
}

impl AxisAngle {
    /// Normalizes the axis and wraps the angle into `[0, 2π)`. Wrapping keeps
    /// the physical rotation; for negative angles the quaternion produced by
    /// [`UnitQuaternion::from_axis_angle`] is the antipodal representation.
    pub fn new(axis: Vec3, angle: f64) -> Result<Self, So3Error> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let axis = axis.try_normalize(0.0).ok_or(So3Error::ZeroAxis)?;
        let mut angle = libm::fmod(angle, TAU);
        if angle < 0.0 {
            angle += TAU;
        }
        if angle >= TAU {
            angle = ANGLE_SUP;
        }
        Ok(Self { axis, angle })
    }

    #[inline]
    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    #[inline]
    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Proper orthogonal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix(Mat3::IDENTITY);

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.0 * v
    }

    /// Frobenius distance of `SᵀS` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::IDENTITY).frobenius_norm()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, o: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * o.0)
    }
}

/// `vee` of a skew-symmetric matrix; inverse of [`Vec3::hat`].
pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(m.m[2][1], m.m[0][2], m.m[1][0])
}

/// Uniformly distributed direction on the unit sphere (normalized Gaussian
/// triple).
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        if let Some(u) = v.try_normalize(1e-12) {
            return u;
        }
    }
}
