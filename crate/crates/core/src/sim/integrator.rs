//! Fixed-step Dormand–Prince 5(4).

use crate::dynamics::{raw_state_derivative, BodyState, InertiaParams};
use crate::linalg::Vec3;
use crate::so3::{Quaternion, UnitQuaternion};

use super::SimError;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (the last stage row of `A`, seventh weight zero).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type Y = [f64; 7];

fn pack(q: Quaternion, omega: Vec3) -> Y {
    [q.w, q.v.x, q.v.y, q.v.z, omega.x, omega.y, omega.z]
}

fn unpack(y: &Y) -> (Quaternion, Vec3) {
    (
        Quaternion::new(y[0], Vec3::new(y[1], y[2], y[3])),
        Vec3::new(y[4], y[5], y[6]),
    )
}

fn rhs<F>(t: f64, y: &Y, inertia: &InertiaParams, torque: &mut F) -> Result<Y, SimError>
where
    F: FnMut(f64, &BodyState) -> Result<Vec3, SimError>,
{
    let (q, omega) = unpack(y);
    let unit = UnitQuaternion::new_normalize(q).map_err(|_| SimError::NonFinite { t })?;
    let tau = torque(t, &BodyState::new(unit, omega))?;
    if !tau.is_finite() {
        return Err(SimError::NonFinite { t });
    }
    let d = raw_state_derivative(q, omega, tau, inertia);
    Ok(pack(d.q_dot, d.omega_dot))
}

fn finish(y: Y, t: f64) -> Result<BodyState, SimError> {
    let (q, omega) = unpack(&y);
    if !omega.is_finite() {
        return Err(SimError::NonFinite { t });
    }
    let q = UnitQuaternion::new_normalize(q).map_err(|_| SimError::NonFinite { t })?;
    Ok(BodyState::new(q, omega))
}

fn stages<F>(
    t: f64,
    s: &BodyState,
    dt: f64,
    inertia: &InertiaParams,
    torque: &mut F,
    count: usize,
) -> Result<(Y, [Y; 7]), SimError>
where
    F: FnMut(f64, &BodyState) -> Result<Vec3, SimError>,
{
    let y0 = pack(s.q.quaternion(), s.omega);
    let mut k = [[0.0; 7]; 7];
    for i in 0..count {
        let mut yi = y0;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for (y, d) in yi.iter_mut().zip(kj) {
                    *y += dt * a * d;
                }
            }
        }
        k[i] = rhs(t + C[i] * dt, &yi, inertia, torque)?;
    }
    Ok((y0, k))
}

fn combine(y0: &Y, k: &[Y; 7], weights: &[f64; 7], dt: f64) -> Y {
    let mut y = *y0;
    for (w, ki) in weights.iter().zip(k) {
        if *w != 0.0 {
            for (yv, d) in y.iter_mut().zip(ki) {
                *yv += dt * w * d;
            }
        }
    }
    y
}

/// One fifth-order Dormand–Prince step of the closed loop. The torque
/// provider is evaluated at every stage with a normalized attitude; the
/// returned attitude is renormalized.
pub fn dp_step<F>(
    t: f64,
    s: &BodyState,
    dt: f64,
    inertia: &InertiaParams,
    mut torque: F,
) -> Result<BodyState, SimError>
where
    F: FnMut(f64, &BodyState) -> Result<Vec3, SimError>,
{
    if !(dt > 0.0) {
        return Err(SimError::InvalidConfig("step must be positive"));
    }
    // The seventh stage only feeds the embedded estimate.
    let (y0, k) = stages(t, s, dt, inertia, &mut torque, 6)?;
    finish(combine(&y0, &k, &B5, dt), t + dt)
}

/// Like [`dp_step`] but also returns the embedded fourth-order solution.
pub fn dp_step_embedded<F>(
    t: f64,
    s: &BodyState,
    dt: f64,
    inertia: &InertiaParams,
    mut torque: F,
) -> Result<(BodyState, BodyState), SimError>
where
    F: FnMut(f64, &BodyState) -> Result<Vec3, SimError>,
{
    if !(dt > 0.0) {
        return Err(SimError::InvalidConfig("step must be positive"));
    }
    let (y0, k) = stages(t, s, dt, inertia, &mut torque, 7)?;
    Ok((
        finish(combine(&y0, &k, &B5, dt), t + dt)?,
        finish(combine(&y0, &k, &B4, dt), t + dt)?,
    ))
}
