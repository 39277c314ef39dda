use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dimest::Result;

/// Self-describing record of one command run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub argv: Vec<String>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub results: Vec<ResultRow>,
    /// Per-run autoencoder training losses, one entry per epoch.
    pub histories: Vec<History>,
    pub failures: Vec<Failure>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub label: String,
    pub rule: String,
    /// Mean over successful runs; `None` when every run failed.
    pub value: Option<f64>,
    pub std_dev: Option<f64>,
    pub count: usize,
    pub failures: usize,
    /// Per-run values, or curve points / spectrum entries.
    pub series: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct History {
    pub label: String,
    pub seed: u64,
    pub loss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub label: String,
    pub seed: u64,
    pub error: String,
}

impl RunReport {
    pub fn new(command: &str, argv: Vec<String>, params: BTreeMap<String, serde_json::Value>) -> Self {
        RunReport {
            command: command.to_string(),
            argv,
            params,
            results: Vec::new(),
            histories: Vec::new(),
            failures: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }

    pub fn row(&self, label: &str, rule: &str) -> Option<&ResultRow> {
        self.results.iter().find(|r| r.label == label && r.rule == rule)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, json)?;
        Ok(())
    }
}

/// `<out>.report.json`
pub fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (Some(mean), Some(var.sqrt()))
}

pub fn summary_row(label: String, rule: &str, values: Vec<f64>, failures: usize) -> ResultRow {
    let (value, std_dev) = mean_std(&values);
    ResultRow {
        label,
        rule: rule.to_string(),
        value,
        std_dev,
        count: values.len(),
        failures,
        series: values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        assert_eq!(mean_std(&[]), (None, None));
        assert_eq!(mean_std(&[3.0]), (Some(3.0), Some(0.0)));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, Some(2.0));
        assert!((s.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(report_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.report.json"));
    }
}
