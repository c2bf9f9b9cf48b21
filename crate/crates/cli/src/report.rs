//! Reports printed by every command.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// How a command ended; maps onto the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Exhausted,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Exhausted => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, Value>,
    pub witnesses: BTreeMap<String, Value>,
    pub seed: u64,
    pub parallel: bool,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64, parallel: bool, timings: bool) -> Self {
        Report {
            command,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            seed,
            parallel,
            outcome: Outcome::Pass,
            timings: timings.then(BTreeMap::new),
            started: timings.then(Instant::now),
        }
    }

    pub fn verdict(&mut self, name: &str, value: impl Serialize) {
        self.verdicts.insert(
            name.into(),
            serde_json::to_value(value).expect("verdict serializes"),
        );
    }

    pub fn witness(&mut self, name: &str, value: impl Serialize) {
        self.witnesses.insert(
            name.into(),
            serde_json::to_value(value).expect("witness serializes"),
        );
    }

    /// Reads a file, recording its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs
            .insert(path.display().to_string(), digest(text.as_bytes()));
        Ok(text)
    }

    /// Writes a file, recording its digest.
    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs
            .insert(path.display().to_string(), digest(text.as_bytes()));
        Ok(())
    }

    pub fn lap(&mut self, name: &str) {
        if let (Some(t), Some(start)) = (self.timings.as_mut(), self.started) {
            t.insert(name.into(), start.elapsed().as_secs_f64());
        }
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
