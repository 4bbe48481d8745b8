//! Driver for `connexion-lab`: resolves inputs, runs the analysis and L² pipelines
//! and renders deterministic reports.

mod analyze;
mod l2;

use std::path::{Path, PathBuf};

use connexion_core::catalog;
use connexion_core::l2lab::GridPreset;
use connexion_core::model::ConnectionSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use analyze::{analyze, AnalysisReport, IndexSummary, MetricRow, MetricSummary};
pub use l2::{l2verify, L2Line, L2Report, L2Tables};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("unknown example or file {name:?}{}", suggestion.as_ref().map(|s| format!("; did you mean {s:?}?")).unwrap_or_default())]
    Unknown { name: String, suggestion: Option<String> },
    #[error("DecompositionError: {name}: {message}")]
    Decomposition { name: &'static str, message: String },
    #[error("NumericalInstability: {0}")]
    Numerical(String),
    #[error("BoundViolated: {0}")]
    BoundViolated(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Parse(_) | CliError::Unknown { .. } => 2,
            CliError::Decomposition { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::BoundViolated(_) => 5,
        }
    }
}

/// Settings shared by all commands; echoed verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    /// Trusted series terms past the valuation.
    pub trunc: i64,
    pub grid: GridPreset,
    pub tol: f64,
    pub seed: u64,
    /// Metric sample points for `analyze`.
    pub samples: usize,
    /// Manufactured forms per line for `l2verify`.
    pub trials: usize,
    pub beta: f64,
    pub kappa: i32,
    /// Inner sector override for `l2verify`.
    pub sector: Option<(f64, f64)>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            trunc: connexion_core::series::DEFAULT_BUDGET,
            grid: GridPreset::Default,
            tol: 1e-8,
            seed: 1,
            samples: 256,
            trials: 3,
            beta: 0.0,
            kappa: 0,
            sector: None,
        }
    }
}

/// A resolved input: catalog entry or file.
#[derive(Clone, Debug)]
pub struct Input {
    pub label: String,
    pub spec: ConnectionSpec,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub label: String,
    pub name: Option<String>,
    /// SHA-256 of the canonical JSON form of the spec.
    pub digest: String,
}

impl Input {
    pub fn echo(&self) -> InputEcho {
        let canonical = serde_json::to_string(&self.spec).expect("specs serialize");
        let digest = format!("{:x}", Sha256::digest(canonical.as_bytes()));
        InputEcho { label: self.label.clone(), name: self.spec.name().map(str::to_owned), digest }
    }
}

/// Reads `arg` as a file when it exists, otherwise looks it up in the catalog.
pub fn resolve(arg: &str) -> Result<Input, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{arg}: {e}")))?;
        let spec = ConnectionSpec::parse(&text).map_err(|e| CliError::Parse(format!("{arg}: {e}")))?;
        return Ok(Input { label: arg.to_owned(), spec });
    }
    if let Some(e) = catalog::get(arg) {
        return Ok(Input { label: e.name.to_owned(), spec: e.spec() });
    }
    if path.extension().is_some() || arg.contains(std::path::MAIN_SEPARATOR) {
        return Err(CliError::Parse(format!("{arg}: no such file")));
    }
    Err(CliError::Unknown { name: arg.to_owned(), suggestion: suggest(arg) })
}

/// Closest catalog name, if any is reasonably close.
pub fn suggest(name: &str) -> Option<String> {
    catalog::entries()
        .iter()
        .map(|e| (strsim::levenshtein(name, e.name), e.name))
        .filter(|(d, n)| *d <= n.len().max(name.len()) / 2 || n.contains(name))
        .min()
        .map(|(_, n)| n.to_owned())
}

/// `report.json` → `report.<table>.csv` beside it.
pub fn side_path(out: &Path, table: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{table}.csv"))
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Output { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Output { path: path.display().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Output { path: path.display().to_string(), message: e.to_string() })
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogItem {
    pub name: &'static str,
    pub description: &'static str,
}

pub fn catalog_list() -> Vec<CatalogItem> {
    catalog::entries().iter().map(|e| CatalogItem { name: e.name, description: e.description }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suggestions() {
        assert_eq!(suggest("airyy").as_deref(), Some("airy"));
        assert_eq!(suggest("kummer").as_deref(), Some("kummer-half"));
        assert_eq!(suggest("zzzzzzzzzzzzzzzz"), None);
    }

    #[test]
    fn resolve_errors() {
        assert!(matches!(resolve("trivial"), Ok(_)));
        assert_eq!(resolve("triv").unwrap_err().exit_code(), 2);
        assert_eq!(resolve("missing.json").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn digest_ignores_layout() {
        let a = Input { label: "a".into(), spec: ConnectionSpec::parse(catalog::get("airy").unwrap().source()).unwrap() };
        let text = catalog::get("airy").unwrap().source().replace('\n', " ");
        let b = Input { label: "b".into(), spec: ConnectionSpec::parse(&text).unwrap() };
        assert_eq!(a.echo().digest, b.echo().digest);
    }

    #[test]
    fn side_paths() {
        assert_eq!(side_path(Path::new("/tmp/r.json"), "metric"), PathBuf::from("/tmp/r.metric.csv"));
    }
}
