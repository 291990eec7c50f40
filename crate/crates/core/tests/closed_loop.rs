use std::f64::consts::{PI, TAU};

use axang_core::controllers::{
    ControlLaw, GainsAxisAngle, GainsGeometric, GainsQuaternion, Gamma, LawKind, Sigma, Sigmoid,
};
use axang_core::dynamics::{BodyState, ConstantAttitude, InertiaParams, RefSample};
use axang_core::mps::MpsConfig;
use axang_core::sim::{
    closed_loop_error_rate, dp_step, lyapunov_v, lyapunov_vdot, run_episode, ControllerSpec, SimConfig,
};
use axang_core::so3::{sample_unit_sphere, AxisAngle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAINS: GainsAxisAngle = GainsAxisAngle::new(1e3, 10.0, 1e2);

fn gamma() -> Gamma {
    Sigmoid::new(1.0, 1.5).unwrap().into()
}

fn axis_angle_law() -> ControlLaw {
    ControlLaw::axis_angle(GAINS, gamma()).unwrap()
}

fn all_laws(j: &InertiaParams) -> [ControlLaw; 3] {
    let gq = GainsQuaternion::new(1e3, 1e2).unwrap();
    [
        ControlLaw::Quaternion(gq),
        ControlLaw::Geometric(GainsGeometric::matched(&gq, j)),
        axis_angle_law(),
    ]
}

fn random_state(rng: &mut ChaCha8Rng, max_rate: f64) -> BodyState {
    let u = sample_unit_sphere(rng);
    let theta = rng.random_range(1e-3..TAU - 1e-3);
    let w = sample_unit_sphere(rng) * rng.random_range(0.0..max_rate);
    BodyState::from_axis_angle(&AxisAngle::new(u, theta).unwrap(), w)
}

#[test]
fn simulated_error_acceleration_matches_closed_loop_model() {
    let j = InertiaParams::crazyflie();
    let law = axis_angle_law();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let s = random_state(&mut rng, 30.0);
        let r = RefSample::REST;
        let tau = law.torque(&s, &r, &j, Sigma::Positive);
        // constant setpoint: ω̇ₑ = −ω̇
        let simulated = -(*j.inverse() * (tau - j.gyroscopic(s.omega)));
        let model =
            closed_loop_error_rate(&r.attitude_error(&s.q), r.omega_error(s.omega), &GAINS, &gamma());
        assert!((simulated - model).max_abs() < 1e-6, "{simulated:?} vs {model:?}");
    }
}

#[test]
fn lyapunov_value_never_increases_along_trajectories() {
    let j = InertiaParams::crazyflie();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = SimConfig { log_decimation: 1, horizon: 1.0, ..SimConfig::default() };
    for _ in 0..10 {
        let s0 = random_state(&mut rng, 30.0);
        for sigma in Sigma::BOTH {
            let spec = ControllerSpec::fixed(axis_angle_law(), sigma);
            let res = run_episode(&s0, &ConstantAttitude::default(), &spec, &j, &cfg).unwrap();
            for w in res.trajectory.windows(2) {
                assert!(
                    w[1].v <= w[0].v + 1e-9 * w[0].v.max(1.0),
                    "t={}: {} -> {}",
                    w[1].t,
                    w[0].v,
                    w[1].v
                );
                assert!(w[1].v_dot <= 0.0);
            }
        }
    }
}

#[test]
fn lyapunov_rate_matches_trajectory_differences() {
    let j = InertiaParams::crazyflie();
    let law = axis_angle_law();
    let g = gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let dt = 1e-4;
    let torque = |_: f64, s: &BodyState| Ok(law.torque(s, &RefSample::REST, &j, Sigma::Positive));
    let v_at = |s: &BodyState| lyapunov_v(&RefSample::REST.attitude_error(&s.q), -s.omega, &GAINS, &g);
    for _ in 0..100 {
        let mut prev = random_state(&mut rng, 30.0);
        let skip = rng.random_range(0..1000);
        for k in 0..skip {
            prev = dp_step(k as f64 * dt, &prev, dt, &j, torque).unwrap();
        }
        let mid = dp_step(0.0, &prev, dt, &j, torque).unwrap();
        let next = dp_step(0.0, &mid, dt, &j, torque).unwrap();
        let fd = (v_at(&next) - v_at(&prev)) / (2.0 * dt);
        let exact = lyapunov_vdot(&RefSample::REST.attitude_error(&mid.q), -mid.omega, &GAINS, &g);
        assert!((fd - exact).abs() <= 1e-3 * exact.abs(), "fd {fd} vs {exact}");
    }
}

#[test]
fn every_law_converges_to_the_single_equilibrium() {
    let j = InertiaParams::crazyflie();
    let laws = all_laws(&j);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let cfg = SimConfig { log_trajectory: false, ..SimConfig::default() };
    for i in 0..1000 {
        let s0 = random_state(&mut rng, 30.0);
        let law = laws[i % 3];
        let sigma = if rng.random_bool(0.5) { Sigma::Positive } else { Sigma::Negative };
        let spec = ControllerSpec::fixed(law, sigma);
        let res = run_episode(&s0, &ConstantAttitude::default(), &spec, &j, &cfg).unwrap();
        let principal = res.final_state.q.principal_angle();
        assert!(principal < 1e-3, "{} from {s0:?}: {principal}", law.kind());
        assert!(res.final_state.omega.norm() < 1e-3);
        assert!(res.settling_time.is_some());
    }
}

#[test]
fn tumble_recovery_scenario() {
    let j = InertiaParams::crazyflie();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let cfg = SimConfig { log_trajectory: false, ..SimConfig::default() };
    for _ in 0..3 {
        let u0 = sample_unit_sphere(&mut rng);
        let s0 = BodyState::from_axis_angle(&AxisAngle::new(u0, 136.0 * PI / 180.0).unwrap(), u0 * 30.0);
        for law in all_laws(&j) {
            let spec = ControllerSpec::predictive(law, MpsConfig::default());
            let res = run_episode(&s0, &ConstantAttitude::default(), &spec, &j, &cfg).unwrap();
            let ts = res.settling_time.unwrap();
            let (want, tol) = match law.kind() {
                LawKind::AxisAngle => (0.45, 0.05),
                LawKind::Quaternion => (0.58, 0.05),
                LawKind::Geometric => (0.49, 0.10),
            };
            assert!((ts - want).abs() <= tol, "{}: {ts}", law.kind());
            if law.kind().takes_sigma() {
                assert_eq!(res.sigma, Some(Sigma::Negative));
                assert!((res.initial_error_angle - 224.0 * PI / 180.0).abs() < 1e-9);
            } else {
                assert!((res.initial_error_angle - 136.0 * PI / 180.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn axis_angle_law_beats_quaternion_law_on_the_long_path() {
    let j = InertiaParams::crazyflie();
    let gq = GainsQuaternion::new(1e3, 1e2).unwrap();
    let cfg = SimConfig { log_trajectory: false, ..SimConfig::default() };
    let u0 = AxisAngle::new(sample_unit_sphere(&mut ChaCha8Rng::seed_from_u64(16)), 176.0 * PI / 180.0).unwrap();
    let s0 = BodyState::from_axis_angle(&u0, u0.axis() * 30.0);
    let run = |law| {
        run_episode(&s0, &ConstantAttitude::default(), &ControllerSpec::predictive(law, MpsConfig::default()), &j, &cfg)
            .unwrap()
    };
    let b = run(ControlLaw::Quaternion(gq));
    let a = run(axis_angle_law());
    assert!(a.settling_time.unwrap() < b.settling_time.unwrap());
}
