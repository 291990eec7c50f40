//! TOML benchmark configuration.
//!
//! Every key is optional; an empty file gives the published setup. Angles
//! are radians unless the key ends in `_deg`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;

use axang_core::controllers::{
    check_gains_axis_angle, ControlLaw, GainError, Gamma, GainsAxisAngle, GainsGeometric,
    GainsQuaternion, LawKind, Linear, ShapingError, Sigma, Sigmoid,
};
use axang_core::dynamics::{DynamicsError, InertiaParams, CRAZYFLIE_INERTIA};
use axang_core::linalg::{Mat3, Vec3};
use axang_core::mps::{MpsConfig, MpsError};
use axang_core::sim::{ControllerSpec, SimConfig, SimError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("inertia: {0}")]
    Inertia(#[from] DynamicsError),
    #[error("gains: {0}")]
    Gains(#[from] GainError),
    #[error("shaping function: {0}")]
    Shaping(#[from] ShapingError),
    #[error("sim: {0}")]
    Sim(SimError),
    #[error("mps: {0}")]
    Mps(#[from] MpsError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub inertia: InertiaSection,
    pub sim: SimSection,
    pub mps: MpsSection,
    pub quaternion: QuaternionSection,
    pub axis_angle: AxisAngleSection,
    pub geometric: GeometricSection,
    pub sweep: SweepSection,
    pub episode: EpisodeSection,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            inertia: InertiaSection::default(),
            sim: SimSection::default(),
            mps: MpsSection::default(),
            quaternion: QuaternionSection::default(),
            axis_angle: AxisAngleSection::default(),
            geometric: GeometricSection::default(),
            sweep: SweepSection::default(),
            episode: EpisodeSection::default(),
        }
    }
}

/// kg·m². A full `matrix` overrides `diagonal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InertiaSection {
    pub diagonal: [f64; 3],
    pub matrix: Option<[[f64; 3]; 3]>,
}

impl Default for InertiaSection {
    fn default() -> Self {
        Self {
            diagonal: CRAZYFLIE_INERTIA,
            matrix: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub step: f64,
    pub horizon: f64,
    pub stab_threshold_deg: f64,
    pub effort_window: f64,
    pub log_decimation: usize,
    /// Seconds the error must stay below threshold; off when absent.
    pub dwell: Option<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            step: d.step,
            horizon: d.horizon,
            stab_threshold_deg: 15.0,
            effort_window: d.effort_window,
            log_decimation: d.log_decimation,
            dwell: None,
        }
    }
}

/// `R` and `Q` are multiples of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpsSection {
    pub enabled: bool,
    pub horizon: f64,
    pub r: f64,
    pub q: f64,
    pub prediction_step: f64,
}

impl Default for MpsSection {
    fn default() -> Self {
        Self {
            enabled: true,
            horizon: 0.2,
            r: 1.0,
            q: 1e-6,
            prediction_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuaternionSection {
    pub k_q: f64,
    pub k_omega: f64,
}

impl Default for QuaternionSection {
    fn default() -> Self {
        Self {
            k_q: 1e3,
            k_omega: 1e2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaShape {
    Sigmoid,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxisAngleSection {
    pub k_alpha: f64,
    pub k_delta: f64,
    pub k_omega: f64,
    pub gamma: GammaShape,
    /// Sigmoid saturation, rad.
    pub theta_max: f64,
    pub xi: f64,
    /// Slope of the linear shaping function.
    pub slope: f64,
}

impl Default for AxisAngleSection {
    fn default() -> Self {
        Self {
            k_alpha: 1e3,
            k_delta: 10.0,
            k_omega: 1e2,
            gamma: GammaShape::Sigmoid,
            theta_max: 1.0,
            xi: 1.5,
            slope: 1.0,
        }
    }
}

impl AxisAngleSection {
    pub fn gains(&self) -> GainsAxisAngle {
        GainsAxisAngle::new(self.k_alpha, self.k_delta, self.k_omega)
    }

    pub fn gamma(&self) -> Result<Gamma, ShapingError> {
        Ok(match self.gamma {
            GammaShape::Sigmoid => Sigmoid::new(self.theta_max, self.xi)?.into(),
            GammaShape::Linear => Linear::new(self.slope)?.into(),
        })
    }
}

/// Matrix gains as multiples of `J`. Absent values follow the quaternion
/// law: `k_r = k_q sin(π/4)`, `k_omega = k_ω`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometricSection {
    pub k_r: Option<f64>,
    pub k_omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub theta0_deg: Vec<f64>,
    /// Signed angular-rate magnitudes along `u₀`, rad/s.
    pub omega_mag: Vec<f64>,
    pub controllers: Vec<String>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            theta0_deg: default_theta0_grid(),
            omega_mag: default_omega_grid(),
            controllers: all_controller_names(),
        }
    }
}

pub fn default_theta0_grid() -> Vec<f64> {
    (0..36).map(|i| 1.0 + 5.0 * i as f64).collect()
}

pub fn default_omega_grid() -> Vec<f64> {
    (0..=100).map(|i| -30.0 + 0.6 * i as f64).collect()
}

fn all_controller_names() -> Vec<String> {
    LawKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeSection {
    pub theta0_deg: f64,
    pub omega_mag: f64,
    /// Rotation axis `u₀`; drawn from the seed like the sweep when absent.
    pub axis: Option<[f64; 3]>,
    pub controllers: Vec<String>,
    /// Fixed direction `+1`/`-1` instead of predictive selection.
    pub sigma: Option<i8>,
}

impl Default for EpisodeSection {
    fn default() -> Self {
        Self {
            theta0_deg: 136.0,
            omega_mag: 30.0,
            axis: None,
            controllers: all_controller_names(),
            sigma: None,
        }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// SHA-256 of the canonical serialization of the effective config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything and builds the simulation objects.
    pub fn resolve(&self) -> Result<Setup, ConfigError> {
        let inertia = match self.inertia.matrix {
            Some(m) => InertiaParams::new(Mat3::from_rows(m))?,
            None => InertiaParams::diagonal(self.inertia.diagonal)?,
        };

        let s = &self.sim;
        let sim = SimConfig {
            step: s.step,
            horizon: s.horizon,
            stab_threshold: s.stab_threshold_deg * PI / 180.0,
            effort_window: s.effort_window,
            log_decimation: s.log_decimation,
            log_trajectory: true,
            dwell: s.dwell,
        };
        sim.validate().map_err(ConfigError::Sim)?;

        let m = &self.mps;
        let mps = MpsConfig {
            horizon: m.horizon,
            r: Mat3::IDENTITY.scaled(m.r),
            q: Mat3::IDENTITY.scaled(m.q),
            prediction_step: m.prediction_step,
        };
        mps.validate()?;

        let gq = GainsQuaternion::new(self.quaternion.k_q, self.quaternion.k_omega)?;
        let aa = &self.axis_angle;
        let cert = check_gains_axis_angle(&aa.gains())?;
        if !cert.pd {
            return invalid(format!(
                "axis-angle gains (k_alpha={}, k_delta={}, k_omega={}) fail k_alpha > k_delta*k_omega/4",
                aa.k_alpha, aa.k_delta, aa.k_omega
            ));
        }
        let axis_angle = ControlLaw::axis_angle(aa.gains(), aa.gamma()?)?;
        let geometric = GainsGeometric::scaled(
            self.geometric.k_r.unwrap_or(gq.k_q * FRAC_PI_4.sin()),
            self.geometric.k_omega.unwrap_or(gq.k_omega),
            &inertia,
        )?;

        Ok(Setup {
            inertia,
            sim,
            mps: m.enabled.then_some(mps),
            laws: [
                ControlLaw::Quaternion(gq),
                ControlLaw::Geometric(geometric),
                axis_angle,
            ],
        })
    }

    pub fn sweep_controllers(&self) -> Result<Vec<LawKind>, ConfigError> {
        parse_controllers(&self.sweep.controllers)
    }

    pub fn episode_controllers(&self) -> Result<Vec<LawKind>, ConfigError> {
        parse_controllers(&self.episode.controllers)
    }

    pub fn episode_sigma(&self) -> Result<Option<Sigma>, ConfigError> {
        match self.episode.sigma {
            None => Ok(None),
            Some(1) => Ok(Some(Sigma::Positive)),
            Some(-1) => Ok(Some(Sigma::Negative)),
            Some(v) => invalid(format!("episode.sigma must be 1 or -1, got {v}")),
        }
    }

    pub fn episode_axis(&self) -> Result<Option<Vec3>, ConfigError> {
        match self.episode.axis {
            None => Ok(None),
            Some(a) => match Vec3::from_array(a).try_normalize(1e-12) {
                Some(u) if u.is_finite() => Ok(Some(u)),
                _ => invalid("episode.axis must be a finite non-zero vector"),
            },
        }
    }
}

pub fn parse_controllers<S: AsRef<str>>(names: &[S]) -> Result<Vec<LawKind>, ConfigError> {
    if names.is_empty() {
        return invalid("controller list is empty");
    }
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let n = n.as_ref().trim();
        let kind = LawKind::from_name(n).ok_or_else(|| {
            ConfigError::Invalid(format!("unknown controller '{n}' (expected tau_b, tau_g or tau_gamma)"))
        })?;
        if out.contains(&kind) {
            return invalid(format!("controller '{n}' listed twice"));
        }
        out.push(kind);
    }
    Ok(out)
}

/// Validated simulation objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub inertia: InertiaParams,
    pub sim: SimConfig,
    /// `None` runs the σ-laws with `σ = +1`.
    pub mps: Option<MpsConfig>,
    /// Indexed like [`LawKind::ALL`].
    pub laws: [ControlLaw; 3],
}

impl Setup {
    pub fn law(&self, kind: LawKind) -> ControlLaw {
        *self.laws.iter().find(|l| l.kind() == kind).expect("every kind is configured")
    }

    pub fn controller(&self, kind: LawKind, fixed: Option<Sigma>) -> ControllerSpec {
        let law = self.law(kind);
        match (fixed, self.mps) {
            (Some(s), _) => ControllerSpec::fixed(law, s),
            (None, Some(mps)) => ControllerSpec::predictive(law, mps),
            (None, None) => ControllerSpec::fixed(law, Sigma::Positive),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_published_setup() {
        let cfg = BenchConfig::parse("").unwrap();
        assert_eq!(cfg, BenchConfig::default());
        let setup = cfg.resolve().unwrap();
        assert_eq!(setup.sim.step, 1e-4);
        assert!((setup.sim.stab_threshold - 15f64.to_radians()).abs() < 1e-15);
        assert_eq!(cfg.sweep.theta0_deg.len(), 36);
        assert_eq!(*cfg.sweep.theta0_deg.last().unwrap(), 176.0);
        assert_eq!(cfg.sweep.omega_mag.len(), 101);
        assert!((cfg.sweep.omega_mag[100] - 30.0).abs() < 1e-12);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = BenchConfig::default();
        cfg.seed = 9;
        cfg.sim.dwell = Some(0.1);
        cfg.geometric.k_r = Some(300.0);
        let back = BenchConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_ne!(BenchConfig::default().hash(), cfg.hash());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "seeed = 3",
            "[axis_angle]\nk_alpha = 100.0",
            "[sim]\nstab_threshold_deg = 200.0",
            "[inertia]\ndiagonal = [1.0, -1.0, 1.0]",
            "[mps]\nprediction_step = 1.0",
            "[sweep]\ncontrollers = [\"tau_x\"]",
            "[quaternion]\nk_q = 0.0",
        ] {
            let r = BenchConfig::parse(text).and_then(|c| {
                c.resolve()?;
                c.sweep_controllers()
            });
            assert!(r.is_err(), "{text}");
        }
        let cfg = BenchConfig::parse("[episode]\nsigma = 0").unwrap();
        assert!(cfg.episode_sigma().is_err());
    }

    #[test]
    fn geometric_defaults_follow_quaternion_gains() {
        let setup = BenchConfig::default().resolve().unwrap();
        let ControlLaw::Geometric(g) = setup.law(LawKind::Geometric) else { panic!() };
        let want = 1e3 * FRAC_PI_4.sin() * CRAZYFLIE_INERTIA[0];
        assert!((g.k_r.m[0][0] - want).abs() < 1e-15);
        assert!((g.k_omega.m[2][2] - 1e2 * CRAZYFLIE_INERTIA[2]).abs() < 1e-15);
    }
}
