//! Parallel execution of the grid and per-cell statistics.

use axang_core::controllers::{LawKind, Sigma};
use axang_core::dynamics::ConstantAttitude;
use axang_core::sim::{run_episode, EpisodeResult, SimConfig, SimError};
use rayon::prelude::*;

use crate::config::Setup;
use crate::grid::EpisodeSpec;

/// Scalar outcome of one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub settling_time: Option<f64>,
    pub effort: f64,
    pub sigma: Option<Sigma>,
    pub mps_costs: Option<[f64; 2]>,
    pub initial_error_deg: f64,
    pub final_error_deg: f64,
}

impl From<&EpisodeResult> for EpisodeSummary {
    fn from(r: &EpisodeResult) -> Self {
        Self {
            settling_time: r.settling_time,
            effort: r.effort,
            sigma: r.sigma,
            mps_costs: r.mps_costs,
            initial_error_deg: r.initial_error_angle.to_degrees(),
            final_error_deg: r.final_error_angle.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub spec: EpisodeSpec,
    pub outcome: Result<EpisodeSummary, SimError>,
}

/// Runs one grid episode, optionally keeping its trajectory.
pub fn simulate(spec: &EpisodeSpec, setup: &Setup, log: bool) -> Result<EpisodeResult, SimError> {
    let cfg = SimConfig { log_trajectory: log, ..setup.sim };
    run_episode(
        &spec.initial_state(),
        &ConstantAttitude::default(),
        &setup.controller(spec.law, None),
        &setup.inertia,
        &cfg,
    )
}

/// Runs every episode on a pool of `workers` threads. Results come back in
/// grid order whatever the scheduling.
pub fn run_sweep(
    episodes: &[EpisodeSpec],
    setup: &Setup,
    workers: usize,
) -> Result<Vec<EpisodeRecord>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    Ok(pool.install(|| {
        episodes
            .par_iter()
            .map(|spec| EpisodeRecord {
                spec: *spec,
                outcome: simulate(spec, setup, false).map(|r| EpisodeSummary::from(&r)),
            })
            .collect()
    }))
}

/// Statistics of one `(controller, θ₀)` cell. Moments use the sample standard
/// deviation (`n − 1`); failed episodes are excluded from them and
/// `t_s` moments also leave out episodes that never stabilized.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub controller: LawKind,
    pub theta0_deg: f64,
    pub n_episodes: usize,
    pub n_failed: usize,
    pub n_unstabilized: usize,
    pub mean_ts: Option<f64>,
    pub sd_ts: Option<f64>,
    pub mean_lambda: Option<f64>,
    pub sd_lambda: Option<f64>,
    /// Every episode of the cell failed.
    pub flagged: bool,
}

/// Mean and sample SD. Values are sorted first so the result does not depend
/// on input order.
pub fn mean_sd(values: &mut [f64]) -> (Option<f64>, Option<f64>) {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (Some(mean), None);
    }
    let mut dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    (Some(mean), Some((dev.iter().sum::<f64>() / (n - 1) as f64).sqrt()))
}

fn law_rank(k: LawKind) -> usize {
    LawKind::ALL.iter().position(|x| *x == k).expect("listed")
}

/// One row per `(controller, θ₀)`, ordered by `θ₀` then controller.
pub fn aggregate(records: &[EpisodeRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(f64, LawKind)> = records.iter().map(|r| (r.spec.theta0_deg, r.spec.law)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(law_rank(a.1).cmp(&law_rank(b.1))));
    keys.dedup();

    keys.into_iter()
        .map(|(theta0, law)| {
            let cell: Vec<&EpisodeRecord> = records
                .iter()
                .filter(|r| r.spec.law == law && r.spec.theta0_deg == theta0)
                .collect();
            let ok: Vec<&EpisodeSummary> = cell.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let mut ts: Vec<f64> = ok.iter().filter_map(|s| s.settling_time).collect();
            let mut lambda: Vec<f64> = ok.iter().map(|s| s.effort).collect();
            let n_unstabilized = ok.len() - ts.len();
            let (mean_ts, sd_ts) = mean_sd(&mut ts);
            let (mean_lambda, sd_lambda) = mean_sd(&mut lambda);
            AggregateRow {
                controller: law,
                theta0_deg: theta0,
                n_episodes: cell.len(),
                n_failed: cell.len() - ok.len(),
                n_unstabilized,
                mean_ts,
                sd_ts,
                mean_lambda,
                sd_lambda,
                flagged: ok.is_empty(),
            }
        })
        .collect()
}
