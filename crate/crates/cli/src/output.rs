//! CSV emission: `#` comment header carrying the code version and the full
//! config, then plain comma-separated records with round-trip floats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};

pub const VERSION: &str = concat!("zstab ", env!("CARGO_PKG_VERSION"));

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// What every output file says about where it came from.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: String,
    pub config_json: String,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(command: &str, config: &ScenarioConfig) -> Self {
        Provenance {
            command: command.to_string(),
            config_json: config.canonical_json(),
            config_sha256: config.sha256(),
        }
    }

    pub fn header_lines(&self) -> Vec<String> {
        vec![
            format!("version: {VERSION}"),
            format!("command: {}", self.command),
            format!("config_sha256: {}", self.config_sha256),
            format!("config: {}", self.config_json),
        ]
    }
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv<I>(
    path: &Path,
    provenance: &Provenance,
    notes: &[String],
    columns: &[String],
    rows: I,
) -> CliResult<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: std::io::Error| CliError::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    for line in provenance.header_lines().iter().chain(notes) {
        writeln!(out, "# {line}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
    w.write_record(columns).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> CliResult<PathBuf> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Parsed CSV file: comment lines (without `# `), column names and records.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let comments = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim_start().to_string())
            .collect();
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let bad = |e: csv::Error| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e));
        let columns = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(bad)?;
        Ok(CsvFile {
            comments,
            columns,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[k].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }
}
