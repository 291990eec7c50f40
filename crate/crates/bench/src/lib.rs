//! Benchmark harness for the attitude controllers: TOML configuration, the
//! initial-condition grid, parallel sweeps with per-cell statistics, CSV/JSON
//! output, figure series and the `axang` command line.

pub mod cli;
pub mod config;
pub mod figdata;
pub mod grid;
pub mod output;
pub mod sweep;
