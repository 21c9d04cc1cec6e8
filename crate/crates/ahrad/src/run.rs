//! Run directories keyed by configuration hash, artifact writing and manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, RunConfig, Tolerances};
use crate::error::{io_at, Error, Result};
use crate::experiments;
use crate::output::{Check, Outcome};

/// Environment variable overriding the output root.
pub const OUT_ENV: &str = "AHRAD_OUT";
pub const DEFAULT_OUT: &str = "runs";
pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_COPY: &str = "config.json";

/// Characters of the hash used as directory name.
const DIR_HASH_LEN: usize = 16;

/// SHA-256 of the canonical configuration with the experiment filled in and the output root left out.
pub fn config_hash(exp: Experiment, cfg: &RunConfig) -> String {
    let mut canonical = cfg.clone();
    canonical.experiment = Some(exp);
    canonical.output = None;
    let text = serde_json::to_string(&canonical).expect("config serializes");
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// AHRAD_OUT, then the config's `output`, then `runs`.
pub fn output_root(cfg: &RunConfig) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub ahrad: String,
    pub ahrad_core: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: Option<f64>,
    pub relation: String,
    pub limit: f64,
    pub passed: bool,
}

impl From<&Check> for CheckEntry {
    fn from(c: &Check) -> Self {
        CheckEntry {
            name: c.name.clone(),
            value: c.value.is_finite().then_some(c.value),
            relation: c.relation.to_string(),
            limit: c.limit,
            passed: c.passed,
        }
    }
}

/// Run record written next to the artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub experiment: Experiment,
    pub grid: crate::config::GridConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub versions: Versions,
    pub jobs: usize,
    pub wall_time_s: f64,
    pub checks: Vec<CheckEntry>,
    pub passed: bool,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Result of [`execute`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// True when an existing run with the same hash was kept.
    pub reused: bool,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.manifest.passed
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_at(&path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Runs `exp` into `root/<hash>`; an existing complete run is reused unless `force`.
pub fn execute(exp: Experiment, cfg: &RunConfig, root: &Path, force: bool) -> Result<RunReport> {
    cfg.validate()?;
    if let Some(declared) = cfg.experiment {
        if declared != exp {
            return Err(Error::config(
                "experiment",
                format!("config declares {}, command line asks for {}", declared.name(), exp.name()),
            ));
        }
    }
    let hash = config_hash(exp, cfg);
    let dir = root.join(&hash[..DIR_HASH_LEN]);
    if !force && dir.join(MANIFEST).is_file() {
        let manifest = read_manifest(&dir)?;
        if manifest.config_hash == hash {
            return Ok(RunReport { dir, manifest, reused: true });
        }
    }
    let start = Instant::now();
    let outcome = experiments::run(exp, cfg, &hash)?;
    let wall = start.elapsed().as_secs_f64();
    let manifest = write_run(&dir, exp, cfg, &hash, &outcome, wall)?;
    Ok(RunReport { dir, manifest, reused: false })
}

fn write_run(dir: &Path, exp: Experiment, cfg: &RunConfig, hash: &str, out: &Outcome, wall: f64) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let _ = fs::remove_file(dir.join(MANIFEST));
    let mut entries = Vec::with_capacity(out.artifacts.len());
    for a in &out.artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(io_at(&path))?;
        entries.push(ArtifactEntry {
            file: a.name.clone(),
            sha256: format!("{:x}", Sha256::digest(&a.bytes)),
            bytes: a.bytes.len(),
        });
    }
    let mut canonical = cfg.clone();
    canonical.experiment = Some(exp);
    let path = dir.join(CONFIG_COPY);
    fs::write(&path, canonical.to_json()).map_err(io_at(&path))?;
    let manifest = Manifest {
        config_hash: hash.to_string(),
        experiment: exp,
        grid: cfg.grid.clone(),
        tolerances: cfg.tolerances.clone(),
        seed: cfg.seed,
        versions: Versions { ahrad: env!("CARGO_PKG_VERSION").into(), ahrad_core: ahrad_core::VERSION.into() },
        jobs: rayon::current_num_threads(),
        wall_time_s: wall,
        checks: out.checks.iter().map(CheckEntry::from).collect(),
        passed: out.passed(),
        artifacts: entries,
    };
    let path = dir.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(io_at(&path))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{BumpConfig, DataConfig, GridConfig, MetricConfig, ModeEntry, ModeKey};

    fn small() -> RunConfig {
        let mut cfg = RunConfig::new(MetricConfig::funnel(0.1), GridConfig::new(8e-3, 6.0, 0.02, 1));
        cfg.data = Some(DataConfig::single(vec![ModeEntry {
            k: ModeKey::One(1),
            f1: vec![],
            f2: vec![BumpConfig::new(0.35, 0.15)],
        }]));
        cfg
    }

    #[test]
    fn hash_ignores_output_root_but_not_experiment() {
        let a = small();
        let mut b = small();
        b.output = Some("elsewhere".into());
        assert_eq!(config_hash(Experiment::Field, &a), config_hash(Experiment::Field, &b));
        assert_ne!(config_hash(Experiment::Field, &a), config_hash(Experiment::Evolve, &a));
        b.seed = 1;
        assert_ne!(config_hash(Experiment::Field, &a), config_hash(Experiment::Field, &b));
    }

    #[test]
    fn rerun_is_a_no_op_unless_forced() {
        let root = tempfile::tempdir().unwrap();
        let cfg = small();
        let first = execute(Experiment::Field, &cfg, root.path(), false).unwrap();
        assert!(!first.reused);
        assert!(first.dir.join(MANIFEST).is_file() && first.dir.join(CONFIG_COPY).is_file());
        let second = execute(Experiment::Field, &cfg, root.path(), false).unwrap();
        assert!(second.reused);
        assert_eq!(second.manifest, first.manifest);
        let third = execute(Experiment::Field, &cfg, root.path(), true).unwrap();
        assert!(!third.reused);
        assert_eq!(third.manifest.artifacts, first.manifest.artifacts);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = small();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ra = execute(Experiment::Field, &cfg, a.path(), false).unwrap();
        let rb = execute(Experiment::Field, &cfg, b.path(), false).unwrap();
        assert_eq!(ra.manifest.config_hash, rb.manifest.config_hash);
        assert_eq!(ra.manifest.artifacts, rb.manifest.artifacts);
        for entry in &ra.manifest.artifacts {
            let x = fs::read(ra.dir.join(&entry.file)).unwrap();
            let y = fs::read(rb.dir.join(&entry.file)).unwrap();
            assert_eq!(x, y, "{}", entry.file);
        }
    }

    #[test]
    fn experiment_mismatch_is_a_config_error() {
        let mut cfg = small();
        cfg.experiment = Some(Experiment::Scatter);
        let root = tempfile::tempdir().unwrap();
        let e = execute(Experiment::Field, &cfg, root.path(), false).unwrap_err();
        assert_eq!(e.config_path(), Some("experiment"));
    }
}
