//! Per-run bookkeeping: checks, output files and the manifest.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Float formatting for every CSV cell: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub achieved: f64,
    /// Bound after --tol-scale; null for pass/fail checks.
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config_sha256: String,
    pub config: &'a serde_json::Value,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub serial: bool,
    pub tol_scale: f64,
    pub checks: &'a [Check],
    pub outputs: &'a [String],
    pub status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct Run {
    pub out: PathBuf,
    pub tol_scale: f64,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
    pub summary: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn new(out: PathBuf, tol_scale: f64) -> Result<Self, CliError> {
        std::fs::create_dir_all(&out).map_err(|e| CliError::Output(format!("{}: {e}", out.display())))?;
        Ok(Self { out, tol_scale, checks: Vec::new(), outputs: Vec::new(), summary: Vec::new(), started: Instant::now() })
    }

    /// Record `achieved ≤ tolerance·tol_scale`.
    pub fn check_le(&mut self, name: impl Into<String>, achieved: f64, tolerance: f64) -> bool {
        let tol = tolerance * self.tol_scale;
        let passed = achieved <= tol;
        self.checks.push(Check { name: name.into(), passed, achieved, tolerance: Some(tol), detail: None });
        passed
    }

    pub fn check_flag(&mut self, name: impl Into<String>, passed: bool, achieved: f64, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, achieved, tolerance: None, detail: Some(detail.into()) });
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn csv(&mut self, name: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(csv::Writer::from_writer(BufWriter::new(f)))
    }

    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}

pub fn config_hash(config: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(config).expect("JSON values serialise");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let f = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(BufWriter::new(f), manifest).map_err(|e| CliError::Output(e.to_string()))
}
