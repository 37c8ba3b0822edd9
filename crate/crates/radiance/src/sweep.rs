//! One-parameter sweeps with a resumable manifest.
//!
//! The manifest `<out>.manifest.json` records the sweep configuration and
//! the outcome of every finished point. A rerun with the same configuration
//! skips points marked `done` or `not_converged` and retries failed ones.

use crate::config::{Mode, RunConfig, SweepParam};
use crate::error::CliError;
use crate::output::{Cell, Report};
use crate::run::execute;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Done,
    NotConverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub value: f64,
    pub status: PointStatus,
    pub total: Option<f64>,
    pub error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: Value,
    pub points: Vec<PointRecord>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Grid values `from + i (to - from)/(steps - 1)`; a single step is `from`.
pub fn grid_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect()
}

fn point_config(cfg: &RunConfig, mode: Mode, param: SweepParam, value: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.mode = Some(mode);
    c.out = None;
    c.threads = None;
    c.sweep_mode = None;
    c.sweep_param = None;
    c.sweep_from = None;
    c.sweep_to = None;
    c.sweep_steps = None;
    match param {
        SweepParam::Xi => c.xi = Some(value),
        SweepParam::Pminus => c.pminus = Some(value),
        SweepParam::Dphi => c.dphi = Some(value),
        SweepParam::OmegaMax => c.omega_max = Some(value),
        SweepParam::RelTol => c.rel_tol = Some(value),
    }
    c
}

/// Identity of a sweep for resumption: everything except output plumbing.
fn fingerprint(cfg: &RunConfig) -> Value {
    let mut c = cfg.clone();
    c.threads = None;
    c.out = None;
    c.format = None;
    c.to_json()
}

fn write_manifest(path: &Path, m: &Manifest) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(m)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let need = |k: &str| crate::config::missing(k);
    let mode = cfg.sweep_mode.ok_or_else(|| need("sweep_mode"))?;
    if matches!(mode, Mode::Sweep | Mode::OracleCompare | Mode::ClassicalLimit) {
        return Err(CliError::Usage(format!("mode {} cannot be swept", mode.name())));
    }
    let param = cfg.sweep_param.ok_or_else(|| need("sweep_param"))?;
    let from = cfg.sweep_from.ok_or_else(|| need("sweep_from"))?;
    let to = cfg.sweep_to.ok_or_else(|| need("sweep_to"))?;
    let steps = cfg.sweep_steps.ok_or_else(|| need("sweep_steps"))?;
    if steps == 0 {
        return Err(CliError::Usage("sweep_steps must be positive".into()));
    }
    let out = cfg.out.clone().ok_or_else(|| need("out"))?;
    let mpath = manifest_path(&out);
    let values = grid_values(from, to, steps);
    // Fail on configuration errors before any point runs.
    point_config(cfg, mode, param, values[0]).grid()?;

    let fp = fingerprint(cfg);
    let mut manifest = match std::fs::read(&mpath) {
        Ok(bytes) => {
            let m: Manifest = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Usage(format!("unreadable manifest {}: {e}", mpath.display())))?;
            if m.config != fp {
                return Err(CliError::Usage(format!(
                    "manifest {} belongs to a different sweep configuration",
                    mpath.display()
                )));
            }
            m
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Manifest { config: fp, points: Vec::new() },
        Err(e) => return Err(e.into()),
    };

    for (i, &v) in values.iter().enumerate() {
        let finished = manifest
            .points
            .iter()
            .any(|p| p.index == i && p.status != PointStatus::Failed);
        if finished {
            continue;
        }
        let rec = match execute(&point_config(cfg, mode, param, v)) {
            Ok(r) => {
                let (total, error) = r.total.map_or((None, None), |(t, e)| (Some(t), Some(e)));
                let status = if r.converged { PointStatus::Done } else { PointStatus::NotConverged };
                PointRecord { index: i, value: v, status, total, error, message: None }
            }
            Err(e) => PointRecord {
                index: i,
                value: v,
                status: PointStatus::Failed,
                total: None,
                error: None,
                message: Some(e.to_string()),
            },
        };
        manifest.points.retain(|p| p.index != i);
        manifest.points.push(rec);
        manifest.points.sort_by_key(|p| p.index);
        write_manifest(&mpath, &manifest)?;
    }

    let mut r = Report::table(&["index", param.name(), "total", "error", "converged"]);
    let mut ok = true;
    for p in &manifest.points {
        ok &= p.status == PointStatus::Done;
        r.rows.push(vec![
            Cell::Int(p.index as i64),
            Cell::Float(p.value),
            Cell::opt(p.total),
            Cell::opt(p.error),
            Cell::Text(
                match p.status {
                    PointStatus::Done => "true",
                    PointStatus::NotConverged => "false",
                    PointStatus::Failed => "failed",
                }
                .into(),
            ),
        ]);
    }
    r.converged = ok;
    r.result = json!({ "points": manifest.points });
    let failed = manifest.points.iter().filter(|p| p.status != PointStatus::Done).count();
    r.summary = format!("{} points, {failed} not done, manifest {}", manifest.points.len(), mpath.display());
    r.write(cfg, &out)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid_values(0.1, 2.0, 1), vec![0.1]);
        let g = grid_values(0.1, 2.0, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[19], 2.0);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.manifest.json"));
    }
}
