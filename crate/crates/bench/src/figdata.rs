//! Plottable series shaped like the four panels of the simulation figure:
//! (a) `t_s` and (b) `Λ` mean ± SD against `Θₑ,₀`, (c) the error angle of the
//! tumble-recovery episode and (d) the SEA magnitudes of the same episode.
//! Nothing here simulates; inputs are the files written by `sweep` and
//! `episode`.

use std::path::{Path, PathBuf};

use axang_core::controllers::{GammaFunction, LawKind};
use serde::Serialize;

use crate::output::{
    read_rows, trajectory_file, write_rows, AggregateCsvRow, OutputError, TrajectoryCsvRow,
    AGGREGATE_FILE,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub controller: String,
    pub theta0_deg: f64,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    SettlingTime,
    Effort,
}

pub fn band(rows: &[AggregateCsvRow], metric: Metric) -> Vec<BandRow> {
    rows.iter()
        .map(|r| {
            let (mean, sd) = match metric {
                Metric::SettlingTime => (r.mean_ts, r.sd_ts),
                Metric::Effort => (r.mean_lambda, r.sd_lambda),
            };
            let spread = sd.unwrap_or(0.0);
            BandRow {
                controller: r.controller.clone(),
                theta0_deg: r.theta0_deg,
                mean,
                sd,
                lower: mean.map(|m| m - spread),
                upper: mean.map(|m| m + spread),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub controller: String,
    pub t: f64,
    pub theta_e_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeaRow {
    pub controller: String,
    pub t: f64,
    pub theta_e_deg: f64,
    /// `‖nₑ‖` for the quaternion law, `‖αₑ‖` for the axis–angle law.
    pub sea_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeaShapeRow {
    pub theta_e_deg: f64,
    pub n_e_norm: f64,
    pub alpha_e_norm: f64,
}

pub fn error_series(trajectories: &[(LawKind, Vec<TrajectoryCsvRow>)]) -> Vec<ErrorRow> {
    trajectories
        .iter()
        .flat_map(|(law, rows)| {
            rows.iter().map(move |r| ErrorRow {
                controller: law.name().to_string(),
                t: r.t,
                theta_e_deg: r.theta_e_deg,
            })
        })
        .collect()
}

pub fn sea_series(trajectories: &[(LawKind, Vec<TrajectoryCsvRow>)]) -> Vec<SeaRow> {
    let mut out = Vec::new();
    for (law, rows) in trajectories {
        for r in rows {
            let sea = match law {
                LawKind::Quaternion => Some(r.n_e_norm),
                LawKind::AxisAngle => r.alpha_e_norm,
                LawKind::Geometric => None,
            };
            if let Some(sea_norm) = sea {
                out.push(SeaRow {
                    controller: law.name().to_string(),
                    t: r.t,
                    theta_e_deg: r.theta_e_deg,
                    sea_norm,
                });
            }
        }
    }
    out
}

/// `‖nₑ‖ = sin(Θₑ/2)` and `‖αₑ‖ = γ(Θₑ)` over `[0°, 360°)` in steps of
/// `1/per_degree` degrees.
pub fn sea_shape<G: GammaFunction + ?Sized>(gamma: &G, per_degree: usize) -> Vec<SeaShapeRow> {
    (0..360 * per_degree)
        .map(|i| {
            let deg = i as f64 / per_degree as f64;
            let th = deg.to_radians();
            SeaShapeRow {
                theta_e_deg: deg,
                n_e_norm: (0.5 * th).sin(),
                alpha_e_norm: gamma.value(th).abs(),
            }
        })
        .collect()
}

pub const FIG2A_FILE: &str = "fig2a.csv";
pub const FIG2B_FILE: &str = "fig2b.csv";
pub const FIG2C_FILE: &str = "fig2c.csv";
pub const FIG2D_FILE: &str = "fig2d.csv";
pub const FIG2D_SHAPE_FILE: &str = "fig2d_shape.csv";

/// Writes every panel whose input exists in `results`; returns the files
/// written. The shape curve is always written.
pub fn emit<G: GammaFunction + ?Sized>(
    results: &Path,
    out: &Path,
    gamma: &G,
) -> Result<Vec<PathBuf>, OutputError> {
    let mut written = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&Path) -> Result<(), OutputError>| {
        let p = out.join(name);
        f(&p).map(|_| written.push(p))
    };

    let agg_path = results.join(AGGREGATE_FILE);
    if agg_path.exists() {
        let rows: Vec<AggregateCsvRow> = read_rows(&agg_path)?;
        put(FIG2A_FILE, &|p| write_rows(p, band(&rows, Metric::SettlingTime)))?;
        put(FIG2B_FILE, &|p| write_rows(p, band(&rows, Metric::Effort)))?;
    }

    let mut trajectories = Vec::new();
    for law in LawKind::ALL {
        let p = results.join(trajectory_file(law));
        if p.exists() {
            trajectories.push((law, read_rows::<TrajectoryCsvRow>(&p)?));
        }
    }
    if !trajectories.is_empty() {
        put(FIG2C_FILE, &|p| write_rows(p, error_series(&trajectories)))?;
        put(FIG2D_FILE, &|p| write_rows(p, sea_series(&trajectories)))?;
    }
    put(FIG2D_SHAPE_FILE, &|p| write_rows(p, sea_shape(gamma, 4)))?;
    Ok(written)
}
