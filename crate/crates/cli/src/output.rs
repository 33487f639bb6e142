//! CSV/JSON writers and the run manifest.
//!
//! CSV files carry `#`-prefixed metadata lines, a header row and numbers with
//! 17 significant digits. Nothing time-dependent goes into a CSV, so identical
//! invocations produce identical bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    pub timestamp: String,
}

/// Output directory plus the list of files written so far.
pub struct Run {
    command: String,
    dir: PathBuf,
    outputs: Vec<PathBuf>,
    metadata: Vec<String>,
}

impl Run {
    pub fn new(command: &str, dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| {
            CliError::Failure(format!("cannot create output directory {}: {e}", dir.display()))
        })?;
        Ok(Self {
            command: command.to_string(),
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
            metadata: vec![
                format!("regcal {TOOL_VERSION} {command}"),
                "units: entropies in bits; cutoff reported as d2 = d^2".to_string(),
            ],
        })
    }

    /// Adds a `#`-line to every CSV written afterwards.
    pub fn add_metadata(&mut self, line: String) {
        self.metadata.push(line);
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        Ok((path, BufWriter::new(file)))
    }

    pub fn csv<I>(&mut self, name: &str, header: &[String], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let (path, mut out) = self.create(name)?;
        for line in &self.metadata {
            writeln!(out, "# {line}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(&row)?;
        }
        writer.flush()?;
        self.outputs.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let (path, mut out) = self.create(name)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        self.outputs.push(path);
        Ok(())
    }

    /// Writes `<command>.manifest.json` listing every output of the run.
    pub fn finish<P: Serialize>(self, parameters: &P) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: self.command.clone(),
            parameters: serde_json::to_value(parameters)?,
            output_paths: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        let mut out = BufWriter::new(File::create(&path).map_err(|e| {
            CliError::Failure(format!("cannot write {}: {e}", path.display()))
        })?);
        serde_json::to_writer_pretty(&mut out, &manifest)?;
        writeln!(out)?;
        out.flush()?;
        Ok(path)
    }
}
