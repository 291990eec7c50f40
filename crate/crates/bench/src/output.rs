//! CSV tables and the JSON run record.

use std::fs;
use std::io;
use std::path::Path;

use axang_core::controllers::LawKind;
use axang_core::sim::TrajectorySample;
use serde::{Deserialize, Serialize};

use crate::config::BenchConfig;
use crate::sweep::{AggregateRow, EpisodeRecord};

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const RUN_FILE: &str = "run.json";

pub fn trajectory_file(law: LawKind) -> String {
    format!("trajectory_{}.csv", law.name())
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {msg}")]
    Content { path: String, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |source| OutputError::Csv { path: path.display().to_string(), source }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), OutputError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, OutputError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCsvRow {
    pub controller: String,
    pub theta0_deg: f64,
    pub n_episodes: usize,
    pub n_failed: usize,
    pub n_unstabilized: usize,
    pub mean_ts: Option<f64>,
    pub sd_ts: Option<f64>,
    pub mean_lambda: Option<f64>,
    pub sd_lambda: Option<f64>,
    pub flagged: bool,
}

impl From<&AggregateRow> for AggregateCsvRow {
    fn from(r: &AggregateRow) -> Self {
        Self {
            controller: r.controller.name().to_string(),
            theta0_deg: r.theta0_deg,
            n_episodes: r.n_episodes,
            n_failed: r.n_failed,
            n_unstabilized: r.n_unstabilized,
            mean_ts: r.mean_ts,
            sd_ts: r.sd_ts,
            mean_lambda: r.mean_lambda,
            sd_lambda: r.sd_lambda,
            flagged: r.flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeCsvRow {
    pub index: usize,
    pub controller: String,
    pub theta0_deg: f64,
    pub omega_mag: f64,
    pub u0_x: f64,
    pub u0_y: f64,
    pub u0_z: f64,
    pub sigma: Option<i8>,
    pub cost_plus: Option<f64>,
    pub cost_minus: Option<f64>,
    pub t_s: Option<f64>,
    pub lambda: Option<f64>,
    pub initial_error_deg: Option<f64>,
    pub final_error_deg: Option<f64>,
    pub error: Option<String>,
}

impl From<&EpisodeRecord> for EpisodeCsvRow {
    fn from(r: &EpisodeRecord) -> Self {
        let e = &r.spec;
        let ok = r.outcome.as_ref().ok();
        Self {
            index: e.index,
            controller: e.law.name().to_string(),
            theta0_deg: e.theta0_deg,
            omega_mag: e.omega_mag,
            u0_x: e.axis.x,
            u0_y: e.axis.y,
            u0_z: e.axis.z,
            sigma: ok.and_then(|s| s.sigma).map(|s| s.value() as i8),
            // an infinite cost marks a diverged prediction and is left empty
            cost_plus: ok.and_then(|s| s.mps_costs).and_then(|c| finite(c[0])),
            cost_minus: ok.and_then(|s| s.mps_costs).and_then(|c| finite(c[1])),
            t_s: ok.and_then(|s| s.settling_time),
            lambda: ok.map(|s| s.effort),
            initial_error_deg: ok.map(|s| s.initial_error_deg),
            final_error_deg: ok.map(|s| s.final_error_deg),
            error: r.outcome.as_ref().err().map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryCsvRow {
    pub t: f64,
    pub theta_e_deg: f64,
    pub n_e_norm: f64,
    pub alpha_e_norm: Option<f64>,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_3: f64,
    pub tau_1: f64,
    pub tau_2: f64,
    pub tau_3: f64,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "Vdot")]
    pub v_dot: Option<f64>,
}

impl From<&TrajectorySample> for TrajectoryCsvRow {
    fn from(p: &TrajectorySample) -> Self {
        Self {
            t: p.t,
            theta_e_deg: p.theta_e.to_degrees(),
            n_e_norm: p.n_e_norm,
            alpha_e_norm: finite(p.alpha_e_norm),
            omega_1: p.omega.x,
            omega_2: p.omega.y,
            omega_3: p.omega.z,
            tau_1: p.tau.x,
            tau_2: p.tau.y,
            tau_3: p.tau.z,
            v: finite(p.v),
            v_dot: finite(p.v_dot),
        }
    }
}

pub fn write_trajectory(path: &Path, samples: &[TrajectorySample]) -> Result<(), OutputError> {
    write_rows(path, samples.iter().map(TrajectoryCsvRow::from))
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<(), OutputError> {
    write_rows(path, rows.iter().map(AggregateCsvRow::from))
}

pub fn write_episodes(path: &Path, records: &[EpisodeRecord]) -> Result<(), OutputError> {
    write_rows(path, records.iter().map(EpisodeCsvRow::from))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAxis {
    pub theta0_deg: f64,
    pub u0: [f64; 3],
}

/// Run metadata written next to the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub seed: u64,
    pub config_sha256: String,
    pub sd_convention: String,
    pub n_episodes: usize,
    pub n_failed: usize,
    pub controllers: Vec<String>,
    pub theta0_deg: Vec<f64>,
    pub omega_mag: Vec<f64>,
    pub cell_axes: Vec<CellAxis>,
    pub config: BenchConfig,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), OutputError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| OutputError::Content {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

pub fn read_run(path: &Path) -> Result<RunRecord, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| OutputError::Content {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use axang_core::linalg::Vec3;

    #[test]
    fn trajectory_round_trip_keeps_missing_values_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("traj.csv");
        let p = TrajectorySample {
            t: 0.5,
            theta_e: std::f64::consts::PI,
            n_e_norm: 1.0,
            alpha_e_norm: f64::NAN,
            omega: Vec3::new(1.0, 2.0, 3.0),
            tau: Vec3::new(-1e-3, 0.0, 2.5e-4),
            v: f64::NAN,
            v_dot: f64::NAN,
        };
        write_trajectory(&path, &[p]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "t,theta_e_deg,n_e_norm,alpha_e_norm,omega_1,omega_2,omega_3,tau_1,tau_2,tau_3,V,Vdot"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "0.5,180.0,1.0,,1.0,2.0,3.0,-0.001,0.0,0.00025,,");
        let back: Vec<TrajectoryCsvRow> = read_rows(&path).unwrap();
        assert_eq!(back, vec![TrajectoryCsvRow::from(&p)]);
    }
}
