//! File writers: CSV tables, JSON results and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pohozaev::{RadialFunction, SolveResult, SolverConfig};
use serde::{Deserialize, Serialize};

/// Fixed five-decimal formatting used for table-facing values.
pub fn fixed5(x: f64) -> String {
    format!("{x:.5}")
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes files under one output directory and remembers their names.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    /// Write a CSV file from a header and string records.
    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// profile.csv: `r,u` at five decimals.
    pub fn profile(&mut self, name: &str, w: &RadialFunction) -> Result<()> {
        let rows = w.grid().nodes().zip(w.values()).map(|(r, u)| [fixed5(r), fixed5(*u)]);
        self.csv(name, &["r", "u"], rows)
    }

    /// trace.csv: one row per accepted iteration at full precision.
    pub fn trace(&mut self, name: &str, result: &SolveResult) -> Result<()> {
        let rows = result.trace.iter().map(|e| {
            [
                e.iteration.to_string(),
                full(e.action),
                full(e.t_star),
                full(e.alpha),
                full(e.grad_norm),
            ]
        });
        self.csv(name, &["iter", "I", "t_star", "alpha", "v_norm"], rows)
    }

    /// profile.csv, trace.csv and result.json of one solve.
    pub fn solve_outputs(&mut self, result: &SolveResult) -> Result<()> {
        self.profile("profile.csv", &result.solution)?;
        self.trace("trace.csv", result)?;
        self.json("result.json", &result.summary())
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub command: String,
    pub seed: u64,
    pub parallel: usize,
    pub parallel_feature: bool,
    /// Model parameters when the command has a single model.
    pub model: Option<pohozaev::ModelSpec>,
    /// Solver configuration after applying the flags.
    pub config: Option<SolverConfig>,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
    pub exit_code: i32,
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
