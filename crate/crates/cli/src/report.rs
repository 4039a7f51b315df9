//! Machine-readable run reports.

use serde::Serialize;
use std::collections::BTreeMap;
use uqinv::scalars::{format_rational, format_sig};
use uqinv::suites::Suite;
use uqinv::{Error, Rational, C64};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub residual: String,
    pub tolerance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexValue {
    pub re: String,
    pub im: String,
    pub abs: String,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        Self { re: format_sig(z.re), im: format_sig(z.im), abs: format_sig(z.norm()) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    /// Offending residues, keyed by component, when the class is incompatible.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub residues: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub values: BTreeMap<String, ComplexValue>,
    pub details: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    /// Wall-clock times in milliseconds; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, String>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            config: BTreeMap::new(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            details: BTreeMap::new(),
            warnings: Vec::new(),
            passed: true,
            error: None,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.into(), value.to_string());
    }

    pub fn detail(&mut self, key: &str, value: impl ToString) {
        self.details.insert(key.into(), value.to_string());
    }

    pub fn value(&mut self, key: &str, z: C64) {
        self.values.insert(key.into(), z.into());
    }

    pub fn timing(&mut self, key: &str, ms: f64) {
        self.timings_ms.insert(key.into(), format_sig(ms));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, residual: f64, tolerance: f64) {
        self.passed &= passed;
        self.checks.push(CheckRecord {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            residual: format_sig(residual),
            tolerance: format_sig(tolerance),
        });
    }

    pub fn suite(&mut self, s: &Suite) {
        for c in &s.checks {
            self.check(format!("{}: {}", s.name, c.name), c.passed, c.residual, c.tolerance);
        }
    }

    pub fn fail_with(&mut self, e: &Error) {
        self.passed = false;
        let mut residues = BTreeMap::new();
        if let Error::Incompatible { component, residue } = e {
            residues.insert(component.to_string(), format_rational(*residue));
        }
        self.error = Some(ErrorRecord { kind: error_kind(e).into(), message: e.to_string(), residues });
    }

    pub fn residues(&mut self, key: &str, r: &BTreeMap<usize, Rational>) {
        let text: Vec<String> = r.iter().map(|(k, v)| format!("{k}:{}", format_rational(*v))).collect();
        self.detail(key, text.join(","));
    }

    pub fn failing_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect()
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::InvalidConfig(_) => "invalid_config",
        Error::Incompatible { .. } | Error::FractionalResidue { .. } => "incompatible",
        Error::NotAdmissible(_) | Error::NotSemisimpleDegree { .. } => "not_admissible",
        Error::DegenerateRoot { .. } => "degenerate_root",
        _ => "numeric",
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const PARSE: u8 = 2;
    pub const INCOMPATIBLE: u8 = 3;
    pub const NOT_ADMISSIBLE: u8 = 4;
    pub const NUMERIC: u8 = 5;
}

pub fn exit_code(e: &Error) -> u8 {
    match error_kind(e) {
        "parse" | "invalid_config" => exit::PARSE,
        "incompatible" => exit::INCOMPATIBLE,
        "not_admissible" => exit::NOT_ADMISSIBLE,
        _ => exit::NUMERIC,
    }
}
