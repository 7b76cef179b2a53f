use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Loaded;
use crate::CliError;

/// Deterministic work counters; wall-clock time is deliberately absent so
/// reports are reproducible byte for byte.
#[derive(Debug, Default, Serialize)]
pub struct Work {
    pub ball_words: usize,
    pub elements_scored: usize,
    pub samples: usize,
    pub pairings: u64,
}

pub struct Report<'a> {
    pub command: &'a str,
    pub work: Work,
    pub result: Value,
    pub outputs: Vec<String>,
}

impl Report<'_> {
    pub fn write(&self, loaded: &Loaded, dir: &Path, file: &str) -> Result<(), CliError> {
        let mut outputs = self.outputs.clone();
        outputs.push(file.to_string());
        outputs.sort();
        let doc = json!({
            "command": self.command,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "input_hash": loaded.input_hash,
            "config": loaded.echo,
            "timing": self.work,
            "result": self.result,
            "outputs": outputs,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.into()))?;
        text.push('\n');
        fs::write(dir.join(file), text)?;
        Ok(())
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Writes a CSV with the given header and rows already formatted.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<(), CliError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    Ok(())
}
