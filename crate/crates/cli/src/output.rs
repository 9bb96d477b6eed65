//! Output directory, CSV assembly and JSON summaries.

use std::fmt::Display;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::{CliError, ExperimentConfig};

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(path: &str) -> Result<Self, CliError> {
        let root = PathBuf::from(path);
        std::fs::create_dir_all(&root).map_err(|source| CliError::Io {
            path: root.clone(),
            source,
        })?;
        Ok(Self { root })
    }

    pub fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })
    }
}

/// CSV text with a fixed header. Floats use `Display`, which prints the
/// shortest string that round-trips.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
            columns: header.split(',').count(),
        }
    }

    pub fn row(&mut self, fields: &[&dyn Display]) {
        debug_assert_eq!(fields.len(), self.columns);
        let line: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    Value::from(x)
}

pub fn summary_json(config: &ExperimentConfig, aggregates: &Map<String, Value>) -> String {
    let echo: Map<String, Value> = config
        .parameters
        .echo()
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let doc = json!({
        "mode": config.mode.name(),
        "seed": config.seed,
        "replicas": config.replicas,
        "config": echo,
        "aggregates": aggregates,
    });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
}

/// Wall-clock lives in its own file so the other outputs stay reproducible.
pub fn timing_json(seconds: f64, threads: usize) -> String {
    let doc = json!({ "wall_clock_seconds": seconds, "threads": threads });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_and_float_format() {
        let mut csv = Csv::new("a,b,c");
        csv.row(&[&1u64, &0.1f64, &f64::INFINITY]);
        csv.row(&[&"", &1e-20f64, &true]);
        assert_eq!(csv.finish(), "a,b,c\n1,0.1,inf\n,0.00000000000000000001,true\n");
    }
}
