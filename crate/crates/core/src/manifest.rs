//! Run manifests: every output directory gets exactly one append-only
//! `manifest.txt` recording the subcommand, inputs, parameter echo, library
//! version and precision. All volatile data (the run date and per-stage
//! wall-clock timings) live on the single `timestamp=` line, so repeated runs
//! differ only there.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub struct RunManifest {
    subcommand: String,
    inputs: Vec<String>,
    params: Vec<(String, String)>,
    precision: String,
    stages: Vec<(String, u128)>,
    started: Instant,
    current_stage: Option<(String, Instant)>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            params: Vec::new(),
            precision: "double".into(),
            stages: Vec::new(),
            started: Instant::now(),
            current_stage: None,
        }
    }

    pub fn input(&mut self, path: &str) {
        self.inputs.push(path.to_string());
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn precision(&mut self, tag: &str) {
        self.precision = tag.to_string();
    }

    /// Starts a named stage, closing the previous one.
    pub fn stage(&mut self, name: &str) {
        self.finish_stage();
        self.current_stage = Some((name.to_string(), Instant::now()));
    }

    fn finish_stage(&mut self) {
        if let Some((name, t0)) = self.current_stage.take() {
            self.stages.push((name, t0.elapsed().as_millis()));
        }
    }

    /// Appends this record to `<dir>/manifest.txt`.
    pub fn write(mut self, dir: &Path) -> std::io::Result<()> {
        self.finish_stage();
        let mut record = String::new();
        record.push_str(&format!("subcommand={}\n", self.subcommand));
        for i in &self.inputs {
            record.push_str(&format!("input={i}\n"));
        }
        for (k, v) in &self.params {
            record.push_str(&format!("param {k}={v}\n"));
        }
        record.push_str(&format!("version={}\n", crate::VERSION));
        record.push_str(&format!("precision={}\n", self.precision));
        let unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let timings: Vec<String> = self
            .stages
            .iter()
            .map(|(name, ms)| format!("{name}:{ms}"))
            .collect();
        record.push_str(&format!(
            "timestamp={} total_ms={} timings_ms={}\n",
            unix,
            self.started.elapsed().as_millis(),
            timings.join(",")
        ));
        let path = dir.join("manifest.txt");
        let existing = std::fs::read_to_string(&path).unwrap_or_default();
        let combined = if existing.is_empty() {
            record
        } else {
            format!("{existing}\n{record}")
        };
        std::fs::write(&path, combined)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_appends_and_isolates_volatile_line() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("demo");
        m.input("a.txt");
        m.param("degree", 12);
        m.stage("compute");
        m.write(dir.path()).unwrap();
        let first = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(first.contains("subcommand=demo"));
        assert!(first.contains("param degree=12"));
        // Exactly one volatile line.
        assert_eq!(first.lines().filter(|l| l.starts_with("timestamp=")).count(), 1);

        let mut m2 = RunManifest::new("demo");
        m2.input("a.txt");
        m2.write(dir.path()).unwrap();
        let both = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert_eq!(both.lines().filter(|l| l.starts_with("subcommand=")).count(), 2);
    }
}
