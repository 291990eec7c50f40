use std::f64::consts::TAU;

use axang_core::controllers::{axis_rate, ControlLaw, GainsAxisAngle, Sigma, Sigmoid};
use axang_core::dynamics::{BodyState, InertiaParams, RefSample};
use axang_core::linalg::Vec3;
use axang_core::sim::{dp_step, SimError};
use axang_core::so3::{sample_unit_sphere, AxisAngle, Quaternion, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact flow of `q̇ₑ = ½[0; ωₑ] ⊗ qₑ` for constant `ωₑ` over `h`.
fn flow(q_e: &UnitQuaternion, omega_e: Vec3, h: f64) -> UnitQuaternion {
    let rate = omega_e.norm();
    let half = 0.5 * rate * h;
    let v = if rate > 0.0 { omega_e * (half.sin() / rate) } else { Vec3::ZERO };
    let step = UnitQuaternion::new_normalize(Quaternion::new(half.cos(), v)).unwrap();
    step * *q_e
}

#[test]
fn axis_rate_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let h = 1e-7;
    for _ in 0..1000 {
        let theta = rng.random_range(0.05..TAU - 0.05);
        let q_e = UnitQuaternion::from_axis_angle(&AxisAngle::new(sample_unit_sphere(&mut rng), theta).unwrap());
        let w = sample_unit_sphere(&mut rng) * rng.random_range(0.1..30.0);
        let plus = flow(&q_e, w, h).to_axis_angle().axis();
        let minus = flow(&q_e, w, -h).to_axis_angle().axis();
        let fd = (plus - minus) * (0.5 / h);
        let exact = axis_rate(&q_e, w);
        assert!((fd - exact).norm() <= 1e-4 * exact.norm(), "Θ={theta}: {fd:?} vs {exact:?}");
    }
}

#[test]
fn spin_about_the_error_axis_leaves_it_fixed() {
    let j = InertiaParams::diagonal([1.0, 1.0, 1.0]).unwrap();
    let u = Vec3::new(0.3, -0.5, 0.8).try_normalize(0.0).unwrap();
    let mut s = BodyState::from_axis_angle(&AxisAngle::new(u, 1.0).unwrap(), u * 4.0);
    let dt = 1e-4;
    for k in 0..2000 {
        let q_e = RefSample::REST.attitude_error(&s.q);
        assert!(axis_rate(&q_e, -s.omega).norm() < 1e-9);
        let before = q_e.to_axis_angle().axis();
        s = dp_step(k as f64 * dt, &s, dt, &j, |_, _| Ok(Vec3::ZERO)).unwrap();
        let after = RefSample::REST.attitude_error(&s.q).to_axis_angle().axis();
        assert!((after - before).norm() / dt < 1e-6);
    }
}

#[test]
fn torque_free_motion_conserves_energy_and_momentum() {
    let j = InertiaParams::crazyflie();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let q0 = UnitQuaternion::from_axis_angle(
            &AxisAngle::new(sample_unit_sphere(&mut rng), rng.random_range(0.0..TAU)).unwrap(),
        );
        let mut s = BodyState::new(q0, sample_unit_sphere(&mut rng) * 30.0);
        let e0 = s.kinetic_energy(&j);
        let h0 = s.inertial_momentum(&j).norm();
        let m0 = s.inertial_momentum(&j);
        for k in 0..10_000 {
            s = dp_step(k as f64 * 1e-4, &s, 1e-4, &j, |_, _| Ok(Vec3::ZERO)).unwrap();
            assert!(s.q.norm_error() < 1e-12);
        }
        assert!((s.kinetic_energy(&j) - e0).abs() <= 1e-6 * e0);
        assert!((s.inertial_momentum(&j).norm() - h0).abs() <= 1e-6 * h0);
        assert!((s.inertial_momentum(&j) - m0).norm() <= 1e-6 * h0);
    }
}

fn closed_loop_endpoint(dt: f64) -> BodyState {
    let j = InertiaParams::crazyflie();
    let law = ControlLaw::axis_angle(GainsAxisAngle::new(1e3, 10.0, 1e2), Sigmoid::new(1.0, 1.5).unwrap().into())
        .unwrap();
    let u = Vec3::new(0.6, -0.2, 0.77).try_normalize(0.0).unwrap();
    let mut s = BodyState::from_axis_angle(&AxisAngle::new(u, 2.4).unwrap(), Vec3::new(10.0, 5.0, -20.0));
    let n = (1.0 / dt).round() as usize;
    for k in 0..n {
        s = dp_step(k as f64 * dt, &s, dt, &j, |_, x| -> Result<Vec3, SimError> {
            Ok(law.torque(x, &RefSample::REST, &j, Sigma::Positive))
        })
        .unwrap();
    }
    s
}

fn distance(a: &BodyState, b: &BodyState) -> f64 {
    let dq = (a.q.quaternion().to_array().iter())
        .zip(b.q.quaternion().to_array())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    dq.max((a.omega - b.omega).max_abs())
}

#[test]
fn dormand_prince_converges_at_high_order() {
    let reference = closed_loop_endpoint(1e-4 / 8.0);
    let coarse = [4e-3, 2e-3, 1e-3];
    let errs: Vec<f64> = coarse.iter().map(|&dt| distance(&closed_loop_endpoint(dt), &reference)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 4.0, "observed order {order} from {errs:?}");
    }
    let fine = distance(&closed_loop_endpoint(1e-4), &closed_loop_endpoint(0.5e-4));
    assert!(fine < 1e-8, "{fine}");
}
