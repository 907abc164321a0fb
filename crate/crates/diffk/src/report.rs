//! Line-delimited reports.
//!
//! One JSON object per evaluation, sorted by key, so reports from identical
//! configurations are byte-identical whatever the evaluation order. Wall
//! clock checks are kept apart and never written to report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Passes when `value < limit`.
    Below,
    /// Passes when `value > limit`.
    Above,
    /// Recorded only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub key: String,
    pub value: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    records: Vec<Record>,
    timings: Vec<Record>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    fn push(&mut self, key: String, value: f64, relation: Relation, limit: Option<f64>) -> bool {
        let pass = match (relation, limit) {
            (Relation::Below, Some(l)) => value < l,
            (Relation::Above, Some(l)) => value > l,
            _ => true,
        };
        self.records.push(Record { key, value, relation, limit, pass, note: None });
        pass
    }

    /// Records `value < limit`.
    pub fn below(&mut self, key: impl Into<String>, value: f64, limit: f64) -> bool {
        self.push(key.into(), value, Relation::Below, Some(limit))
    }

    /// Records `value > limit`.
    pub fn above(&mut self, key: impl Into<String>, value: f64, limit: f64) -> bool {
        self.push(key.into(), value, Relation::Above, Some(limit))
    }

    pub fn info(&mut self, key: impl Into<String>, value: f64) {
        self.push(key.into(), value, Relation::Info, None);
    }

    /// A failed evaluation; `value` is NaN and the error goes in the note.
    pub fn error(&mut self, key: impl Into<String>, message: impl Into<String>) {
        let note = Some(message.into());
        self.records.push(Record { key: key.into(), value: f64::NAN, relation: Relation::Info, limit: None, pass: false, note });
    }

    /// Wall-clock seconds that must stay below `limit`; never written to files.
    pub fn timing(&mut self, key: impl Into<String>, seconds: f64, limit: f64) -> bool {
        let pass = seconds < limit;
        self.timings.push(Record { key: key.into(), value: seconds, relation: Relation::Below, limit: Some(limit), pass, note: None });
        pass
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        self.timings.extend(other.timings);
    }

    /// Rewrites every record and timing key.
    pub fn rename(&mut self, mut f: impl FnMut(&str) -> String) {
        for r in self.records.iter_mut().chain(&mut self.timings) {
            r.key = f(&r.key);
        }
    }

    /// Keeps the records and timings whose key satisfies `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.records.retain(|r| keep(&r.key));
        self.timings.retain(|r| keep(&r.key));
    }

    /// Records sorted by key.
    pub fn records(&self) -> Vec<&Record> {
        let mut out: Vec<_> = self.records.iter().collect();
        out.sort_by(|a, b| a.key.cmp(&b.key));
        out
    }

    pub fn timings(&self) -> &[Record] {
        &self.timings
    }

    pub fn passed(&self) -> bool {
        self.records.iter().chain(&self.timings).all(|r| r.pass)
    }

    /// Keys of failing records and timings, sorted.
    pub fn failures(&self) -> Vec<&str> {
        let mut out: Vec<_> = self.records.iter().chain(&self.timings).filter(|r| !r.pass).map(|r| r.key.as_str()).collect();
        out.sort_unstable();
        out
    }

    /// The JSONL body: one sorted record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Plain-text summary: counts, then failing keys.
    pub fn summary(&self) -> String {
        let records = self.records();
        let checks = records.iter().filter(|r| r.relation != Relation::Info || !r.pass).count();
        let failures = self.records.iter().filter(|r| !r.pass).count();
        let mut out = format!("{}: {checks} checks, {failures} failed\n", self.command);
        for r in records.iter().filter(|r| !r.pass) {
            let _ = writeln!(out, "FAIL {}: {}", r.key, describe(r));
        }
        out
    }

    /// Writes `<command>.jsonl` and `<command>.summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, Error> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, body) in [(format!("{}.jsonl", self.command), self.to_jsonl()), (format!("{}.summary.txt", self.command), self.summary())] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `value < limit` style description of a record.
pub fn describe(r: &Record) -> String {
    match (r.relation, r.limit, &r.note) {
        (_, _, Some(note)) => note.clone(),
        (Relation::Below, Some(l), _) => format!("{:e} < {l:e}", r.value),
        (Relation::Above, Some(l), _) => format!("{:e} > {l:e}", r.value),
        _ => format!("{}", r.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_sorted_and_timings_stay_out() {
        let mut r = Report::new("t");
        r.below("b", 1.0, 2.0);
        r.above("a", 1.0, 2.0);
        r.timing("clock", 0.5, 1.0);
        assert_eq!(r.to_jsonl().lines().next().unwrap(), r#"{"key":"a","value":1.0,"relation":"above","limit":2.0,"pass":false}"#);
        assert!(!r.to_jsonl().contains("clock"));
        assert_eq!(r.failures(), vec!["a"]);
    }
}
