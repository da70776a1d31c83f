//! Run manifests, output-directory locking, and deterministic writers.
//!
//! Every run writes a `manifest.json` binding its outputs to the config
//! hash, even when the command exits with an error. Data files (CSV/JSON
//! results) are byte-reproducible from (config, seed, tool version); the
//! manifest is the one file carrying wall-clock timing.

use anyhow::Context;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TRAJECTORY_CSV_SCHEMA: &str = "trajectory-observables-v1";
pub const HISTOGRAM_CSV_SCHEMA: &str = "histogram-v1";
pub const KERNEL_CSV_SCHEMA: &str = "kernel-snapshot-v1";
pub const SWEEP_CSV_SCHEMA: &str = "topology-sweep-v1";
pub const CROSSOVER_CSV_SCHEMA: &str = "steady-crossover-v1";

#[derive(Serialize, Clone, Debug, Default)]
pub struct ConvergenceRecord {
    pub quantity: String,
    pub grid_sizes: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Serialize, Clone, Debug)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub rng_algorithm: String,
    pub schema_versions: Vec<String>,
    pub duration_seconds: f64,
    pub dark_trapped: u64,
    pub boundary_flagged: bool,
    pub convergence: Vec<ConvergenceRecord>,
    pub files: Vec<String>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: &str) -> Self {
        RunManifest {
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            config_hash: config_hash.into(),
            rng_algorithm: jumptime_core::trajectory::RNG_ALGORITHM.into(),
            schema_versions: Vec::new(),
            duration_seconds: 0.0,
            dark_trapped: 0,
            boundary_flagged: false,
            convergence: Vec::new(),
            files: Vec::new(),
            status: "ok".into(),
            error: None,
            notes: Vec::new(),
        }
    }
}

/// Exclusive ownership of an output directory for the duration of a run.
pub struct OutputDir {
    pub path: PathBuf,
    lock_path: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl OutputDir {
    pub fn create(path: &Path, command: &str, config_hash: &str) -> anyhow::Result<Self> {
        fs::create_dir_all(path)
            .with_context(|| format!("creating output directory {}", path.display()))?;
        let lock_path = path.join(".lock");
        // One run per output directory.
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock_path)
        {
            Ok(mut f) => {
                let _ = writeln!(f, "pid {}", std::process::id());
            }
            Err(e) => {
                anyhow::bail!(
                    "output directory {} is locked ({}); remove {} if no run is active",
                    path.display(),
                    e,
                    lock_path.display()
                );
            }
        }
        Ok(OutputDir {
            path: path.to_path_buf(),
            lock_path,
            manifest: RunManifest::new(command, config_hash),
            started: Instant::now(),
        })
    }

    pub fn manifest(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    /// Write a CSV file with the given header and stringified rows.
    pub fn write_csv(
        &mut self,
        name: &str,
        schema: &str,
        header: &str,
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> anyhow::Result<()> {
        let path = self.path.join(name);
        let mut out = String::new();
        out.push_str(header);
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.files.push(name.to_string());
        if !self.manifest.schema_versions.iter().any(|s| s == schema) {
            self.manifest.schema_versions.push(schema.to_string());
        }
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let path = self.path.join(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    /// Write the manifest and release the lock. Called on both success and
    /// error paths.
    pub fn finish(mut self, error: Option<String>) -> anyhow::Result<()> {
        self.manifest.duration_seconds = self.started.elapsed().as_secs_f64();
        if let Some(e) = error {
            self.manifest.status = "error".into();
            self.manifest.error = Some(e);
        }
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(self.path.join("manifest.json"), text)?;
        let _ = fs::remove_file(&self.lock_path);
        Ok(())
    }
}

/// Shortest round-trip decimal formatting: deterministic and re-parsable.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}
