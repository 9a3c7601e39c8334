use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{RunOutput, RunSummary};
use crate::error::{Error, Result};

/// Contents of `<stem>.summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ExperimentConfig,
    pub summary: RunSummary,
}

/// `<case>_<mode>_<seed>`, with `_staged` after the mode for the
/// asynchronous variant.
pub fn file_stem(out: &RunOutput) -> String {
    let s = &out.summary;
    let staged = if s.async_staged { "_staged" } else { "" };
    format!("{}_{}{}_{}", s.case, s.mode, staged, s.seed)
}

fn write(dir: &Path, name: String, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

/// Write ledger, series, snapshots and summaries of `out` into `dir`,
/// creating it if needed. Returns the paths written.
pub fn emit_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let stem = file_stem(out);
    let mut written = Vec::new();
    write(dir, format!("{stem}.ledger.csv"), &out.run.ledger.to_csv(), &mut written)?;
    write(dir, format!("{stem}.series.csv"), &out.run.series.to_csv(), &mut written)?;
    for (step, csv) in &out.run.snapshots {
        write(dir, format!("{stem}.snapshot_{step:06}.csv"), csv, &mut written)?;
    }
    write(dir, format!("{stem}.summary.csv"), &out.summary.to_csv(), &mut written)?;
    let file = SummaryFile { config: out.config.clone(), summary: out.summary.clone() };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))?;
    write(dir, format!("{stem}.summary.json"), &json, &mut written)?;
    Ok(written)
}

/// Read back a summary JSON, validating its config echo.
pub fn read_summary(path: &Path) -> Result<SummaryFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file: SummaryFile = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    file.config.validate()?;
    Ok(file)
}
