use std::fmt;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use cmdiv::subsets::format_mask;
use cmdiv::{Scalar, ScalarKind};

use crate::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Core(cmdiv::Error),
    Io { path: String, source: std::io::Error },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<cmdiv::Error> for CliError {
    fn from(e: cmdiv::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// A finished analysis: the verdict and its JSON payload.
pub struct Report {
    pub affirmative: bool,
    pub result: Value,
    /// Optional CSV rows (header first), written when `--csv` is set.
    pub csv: Option<Vec<String>>,
}

impl Report {
    pub fn new(affirmative: bool, result: Value) -> Self {
        Report {
            affirmative,
            result,
            csv: None,
        }
    }

    pub fn with_csv(mut self, rows: Vec<String>) -> Self {
        self.csv = Some(rows);
        self
    }
}

pub fn mask(m: u32) -> Value {
    json!({ "mask": m, "set": format_mask(m) })
}

/// Exact scalars as fraction strings, floats as numbers.
pub fn scalar<S: Scalar>(v: &S) -> Value {
    match S::KIND {
        ScalarKind::Exact => Value::String(v.to_string()),
        ScalarKind::Float => json!(v.to_f64()),
    }
}

pub fn scalars<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn emit(command: &str, config: &RunConfig, report: Report) -> CliResult<bool> {
    let doc = json!({
        "command": command,
        "config": config,
        "verdict": if report.affirmative { "affirmative" } else { "negative" },
        "result": report.result,
    });
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    match &config.out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(rows)) = (&config.csv, &report.csv) {
        write_text(p, &(rows.join("\n") + "\n"))?;
    }
    Ok(report.affirmative)
}
