//! Per-trial trajectory files for plotting.
//!
//! Each trial becomes `trial_NNN.csv` (or `.json`) with one row per pose:
//! `t, x, y, z, yaw, medium, reward`, starting with the initial pose at
//! `t = 0`. A `summary.csv` lists every exported trial.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::eval::{EpisodeLog, TrialRow};
use crate::harness::train::write_rows;
use crate::sim::Medium;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Config(format!("unknown export format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: u64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub medium: Medium,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub trial: u64,
    pub rows: Vec<TrajectoryRow>,
}

impl From<&EpisodeLog> for Trajectory {
    fn from(log: &EpisodeLog) -> Self {
        let s = &log.start;
        let mut rows = vec![TrajectoryRow {
            t: 0,
            x: s.x,
            y: s.y,
            z: s.z,
            yaw: s.yaw,
            medium: s.medium,
            reward: 0.0,
        }];
        rows.extend(log.records.iter().map(|r| TrajectoryRow {
            t: r.t,
            x: r.x,
            y: r.y,
            z: r.z,
            yaw: r.yaw,
            medium: r.medium,
            reward: r.reward,
        }));
        Self {
            trial: log.trial,
            rows,
        }
    }
}

pub const EXPORT_SUMMARY: &str = "summary.csv";

pub fn trajectory_path(dir: &Path, trial: u64, format: ExportFormat) -> PathBuf {
    dir.join(format!("trial_{trial:03}.{}", format.extension()))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, format: ExportFormat) -> Result<()> {
    match format {
        ExportFormat::Csv => write_rows(path, &traj.rows),
        ExportFormat::Json => {
            let text = serde_json::to_string_pretty(traj)?;
            std::fs::write(path, text).map_err(|e| Error::io(path, e))
        }
    }
}

pub fn read_trajectory(path: &Path, trial: u64, format: ExportFormat) -> Result<Trajectory> {
    match format {
        ExportFormat::Csv => Ok(Trajectory {
            trial,
            rows: crate::harness::train::read_rows(path)?,
        }),
        ExportFormat::Json => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// Writes one file per log and the summary. Returns the trajectory paths.
pub fn export_trajectories(
    logs: &[EpisodeLog],
    dir: &Path,
    format: ExportFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::with_capacity(logs.len());
    for log in logs {
        let path = trajectory_path(dir, log.trial, format);
        write_trajectory(&path, &Trajectory::from(log), format)?;
        paths.push(path);
    }
    let rows: Vec<TrialRow> = logs.iter().map(TrialRow::from).collect();
    let summary = dir.join(EXPORT_SUMMARY);
    if rows.is_empty() {
        // The csv writer emits no header without rows; keep the schema visible.
        std::fs::write(&summary, "trial,success,event,steps,reward,t_air,t_water\n")
            .map_err(|e| Error::io(&summary, e))?;
    } else {
        write_rows(&summary, &rows)?;
    }
    Ok(paths)
}
