//! Fixed-schema JSON reports.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// `{command, medium_digest, params, results, failures}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub medium_digest: String,
    pub params: Value,
    pub results: Value,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).context("cannot encode report")?;
        s.push('\n');
        Ok(s)
    }

    /// Writes to `path`, or to standard output when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let text = self.to_json()?;
        match path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write report {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).context("cannot write report")
            }
        }
    }
}

/// Accumulates asserted checks.
#[derive(Debug, Default)]
pub struct Failures(pub Vec<String>);

impl Failures {
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) -> bool {
        if !ok {
            self.0.push(msg());
        }
        ok
    }
}
