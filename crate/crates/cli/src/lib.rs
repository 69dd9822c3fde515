//! Commands behind the `chameleon` binary.
//!
//! Each command returns a [`RunReport`] and an [`ExitStatus`]; the binary
//! only parses arguments and prints.

#![allow(clippy::result_large_err)]

use std::collections::BTreeMap;
use std::time::Duration;

use chameleon::Error;
use serde::Serialize;
use serde_json::Value;

pub mod golden;
pub mod partition;
pub mod roundtrip;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    InputError,
    /// The input is well formed but the mathematics refuses it, or a
    /// verification failed.
    Refused,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::InputError => 1,
            ExitStatus::Refused => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

/// Machine-readable record of one command run. Wall time is kept out of
/// the serialized form so reports are reproducible byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    text: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            checks: Vec::new(),
            error: None,
            wall_time: Duration::ZERO,
            text: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Records `err` and picks the exit status it maps to.
    pub fn fail(&mut self, err: &Error) -> ExitStatus {
        self.error = Some(ErrorReport {
            kind: error_kind(err),
            message: err.to_string(),
        });
        status_for(err)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for l in &self.text {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("{tag} {}\n", c.name));
            } else {
                out.push_str(&format!("{tag} {} ({})\n", c.name, c.detail));
            }
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error [{}]: {}\n", e.kind, e.message));
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// Variant name of an error, e.g. `DivergentCycle`.
pub fn error_kind(err: &Error) -> String {
    let dbg = format!("{err:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

pub fn status_for(err: &Error) -> ExitStatus {
    match err {
        Error::Parse(_) | Error::InvalidPartition(_) | Error::InvalidBase(_) | Error::BadLength(_) => {
            ExitStatus::InputError
        }
        _ => ExitStatus::Refused,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chameleon::arith::rat;

    #[test]
    fn errors_map_to_exit_codes() {
        let e = Error::DivergentFixedPoint { point: rat(0, 1), break_value: 1 };
        assert_eq!(error_kind(&e), "DivergentFixedPoint");
        assert_eq!(status_for(&e).code(), 2);
        assert_eq!(status_for(&Error::Parse("x".into())).code(), 1);
        assert_eq!(error_kind(&Error::NotPl), "NotPl");
    }

    #[test]
    fn text_report_lists_checks() {
        let mut r = RunReport::new("demo");
        r.line("hello");
        r.check("one", true, "");
        r.check("two", false, "why");
        assert_eq!(r.render_text(), "hello\nPASS one\nFAIL two (why)\n");
        assert!(!r.all_passed());
        assert!(!r.render_json().contains("wall_time"));
    }
}
