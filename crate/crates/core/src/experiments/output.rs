use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Header line prefix carrying the resolved config.
pub const CONFIG_ECHO_PREFIX: &str = "# config: ";

/// Writes `bytes` next to `path` and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Provenance written at the top of every dataset.
#[derive(Clone, Debug)]
pub struct Provenance<'a> {
    pub config: &'a ExperimentConfig,
    pub series: Option<&'a str>,
    pub extra: Vec<(String, String)>,
}

impl Provenance<'_> {
    fn header(&self) -> String {
        let mut h = String::new();
        h.push_str(&format!("# experiment: {}\n", self.config.experiment));
        if let Some(series) = self.series {
            h.push_str(&format!("# series: {series}\n"));
        }
        h.push_str(&format!("# version: {}\n", super::VERSION));
        h.push_str(&format!("# convention: {}\n", self.config.system.convention_label()));
        for (k, v) in &self.extra {
            h.push_str(&format!("# {k}: {v}\n"));
        }
        h.push_str(CONFIG_ECHO_PREFIX);
        h.push_str(&self.config.to_json());
        h.push('\n');
        h
    }
}

/// CSV dataset with a commented provenance block.
pub fn write_csv<'r>(
    path: &Path,
    provenance: &Provenance<'_>,
    columns: &[&str],
    rows: impl IntoIterator<Item = &'r [f64]>,
) -> Result<()> {
    let mut buf = provenance.header().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns).map_err(csv_error)?;
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::invalid(format!(
                    "row has {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("non-finite value {bad} in dataset")));
            }
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Recovers the embedded config from a dataset written by [`write_csv`].
pub fn config_from_dataset(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let line = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(CONFIG_ECHO_PREFIX))
        .ok_or_else(|| Error::config(path.display().to_string(), "no config echo in header"))?;
    ExperimentConfig::from_json(line)
}

/// Numeric columns of a dataset, skipping the comment block.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_error)?;
    let header = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::invalid(format!("bad number `{f}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
