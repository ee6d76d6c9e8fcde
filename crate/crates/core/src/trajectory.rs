//! Trajectory files: one CSV row per sample plus a JSON sidecar with the metadata.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{ActionConfig, SystemParams};
use crate::loops::{action_report, equivariance_residual, ActionReport, EquivariantLoop, COLLISION_THRESHOLD};
use crate::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    /// SHA-256 of the compact JSON of `config`, if one is attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ActionConfig>,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub period: f64,
    pub samples: usize,
    pub masses: Vec<f64>,
    pub report: ActionReport,
}

/// `traj.csv` → `traj.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn config_hash(config: &ActionConfig) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn header(n: usize, d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=n {
        for a in 1..=d {
            h.push(format!("x{i}_{a}"));
        }
    }
    h
}

/// Writes the CSV and its sidecar; returns the sidecar path.
pub fn write_trajectory<S: Scalar>(
    path: &Path,
    lp: &EquivariantLoop<S>,
    config: Option<&ActionConfig>,
) -> Result<PathBuf> {
    let mut report = action_report(lp)?;
    if let Some(c) = config {
        let action = c.build::<S>()?;
        report.equivariance_residual = Some(equivariance_residual(lp, &action)?.to_f64_lossy());
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header(lp.n(), lp.d()))?;
    for j in 0..lp.samples() {
        let mut row = vec![lp.time(j).to_f64_lossy().to_string()];
        row.extend(lp.config(j).iter().map(|v| v.to_f64_lossy().to_string()));
        w.write_record(row)?;
    }
    w.flush()?;
    let p = &lp.params;
    let side = Sidecar {
        format_version: FORMAT_VERSION,
        config_hash: config.map(config_hash),
        config: config.cloned(),
        n: p.n,
        d: p.d,
        alpha: p.alpha.to_f64_lossy(),
        period: p.period.to_f64_lossy(),
        samples: lp.samples(),
        masses: p.masses.iter().map(|m| m.to_f64_lossy()).collect(),
        report,
    };
    let sp = sidecar_path(path);
    std::fs::write(&sp, serde_json::to_string_pretty(&side)?)?;
    Ok(sp)
}

/// Raw samples and metadata as stored, before any centering.
#[derive(Clone, Debug)]
pub struct RawTrajectory {
    pub sidecar: Sidecar,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

pub fn read_trajectory(path: &Path) -> Result<RawTrajectory> {
    let sp = sidecar_path(path);
    let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(&sp)?)?;
    if side.format_version != FORMAT_VERSION {
        return Err(Error::MalformedTrajectory(format!(
            "unsupported format version {}",
            side.format_version
        )));
    }
    if side.masses.len() != side.n {
        return Err(Error::MalformedTrajectory("mass list does not match n".into()));
    }
    if let Some(c) = &side.config {
        if side.config_hash.as_deref() != Some(config_hash(c).as_str()) {
            return Err(Error::MalformedTrajectory(
                "config hash does not match the attached config".into(),
            ));
        }
        if c.n != side.n || c.d != side.d || c.alpha != side.alpha || c.period != side.period {
            return Err(Error::MalformedTrajectory(
                "metadata disagrees with the attached config".into(),
            ));
        }
    }
    let mut r = csv::Reader::from_path(path)?;
    let expect = header(side.n, side.d);
    let got: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if got != expect {
        return Err(Error::MalformedTrajectory(format!(
            "header has {} columns, expected {} for n = {}, d = {}",
            got.len(),
            expect.len(),
            side.n,
            side.d
        )));
    }
    let mut times = Vec::new();
    let mut positions = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedTrajectory(format!("row {}: {e}", row + 1)))?;
        times.push(vals[0]);
        positions.extend_from_slice(&vals[1..]);
    }
    if times.len() != side.samples {
        return Err(Error::MalformedTrajectory(format!(
            "{} rows, sidecar says {} samples",
            times.len(),
            side.samples
        )));
    }
    Ok(RawTrajectory {
        sidecar: side,
        times,
        positions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyThresholds {
    pub newton_residual: f64,
    pub energy_drift: f64,
    pub center_of_mass: f64,
    pub equivariance: f64,
    pub min_distance: f64,
    /// Relative agreement of the recomputed and stored action.
    pub action_agreement: f64,
}

impl Default for VerifyThresholds {
    fn default() -> Self {
        Self {
            newton_residual: 1e-6,
            energy_drift: 1e-6,
            center_of_mass: 1e-10,
            equivariance: 1e-10,
            min_distance: COLLISION_THRESHOLD,
            action_agreement: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub report: ActionReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn at_most(name: &str, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value,
        threshold,
        pass: value <= threshold,
    }
}

/// Recomputes the verification bundle from the stored samples.
pub fn verify_trajectory(path: &Path, th: &VerifyThresholds) -> Result<VerifyOutcome> {
    let raw = read_trajectory(path)?;
    let s = &raw.sidecar;
    let params = SystemParams::new(s.n, s.d, s.alpha, s.period, s.masses.clone())
        .map_err(|e| Error::MalformedTrajectory(e.to_string()))?;
    let mut checks = Vec::new();
    let grid = raw
        .times
        .iter()
        .enumerate()
        .map(|(j, t)| (t - s.period * j as f64 / s.samples as f64).abs())
        .fold(0.0, f64::max);
    checks.push(at_most("time grid", grid, 1e-12 * s.period.max(1.0)));
    let w = s.n * s.d;
    let total: f64 = s.masses.iter().sum();
    let mut com = 0.0f64;
    for c in raw.positions.chunks(w) {
        for a in 0..s.d {
            let m: f64 = (0..s.n).map(|i| s.masses[i] * c[i * s.d + a]).sum();
            com = com.max((m / total).abs());
        }
    }
    checks.push(at_most("center of mass", com, th.center_of_mass));
    let lp = EquivariantLoop::new(params, s.samples, raw.positions.clone())?;
    let min_d = lp.min_pairwise_distance();
    checks.push(Check {
        name: "min pairwise distance".into(),
        value: min_d,
        threshold: th.min_distance,
        pass: min_d > th.min_distance,
    });
    if !(min_d > COLLISION_THRESHOLD) {
        return Ok(VerifyOutcome {
            report: s.report.clone(),
            pass: false,
            checks,
        });
    }
    let mut report = action_report(&lp)?;
    checks.push(at_most("newton residual", report.newton_residual, th.newton_residual));
    checks.push(at_most("energy drift", report.energy_drift, th.energy_drift));
    let rel = (report.action - s.report.action).abs() / report.action.abs().max(f64::MIN_POSITIVE);
    checks.push(at_most("stored action", rel, th.action_agreement));
    if let Some(c) = &s.config {
        let action = c.build::<f64>()?;
        if action.masses() != s.masses.as_slice() {
            return Err(Error::MalformedTrajectory(
                "config masses differ from the sidecar".into(),
            ));
        }
        let r = equivariance_residual(&lp, &action)?;
        report.equivariance_residual = Some(r);
        checks.push(at_most("equivariance residual", r, th.equivariance));
    }
    Ok(VerifyOutcome {
        report,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
