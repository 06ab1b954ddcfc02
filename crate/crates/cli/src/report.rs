//! Report rendering and the exit-code contract.

use ln_deform::{BaseRing, Verdict, VERSION};
use serde_json::{json, Value};

/// Exit statuses. Every outcome maps to exactly one of these.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const PARSE: u8 = 4;
    pub const BOUND: u8 = 5;
    pub const VALIDATION: u8 = 6;
    pub const NEGATIVE: u8 = 7;
    pub const INTERNAL: u8 = 70;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] ln_deform::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ln_deform::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Engine(e) => match e {
                E::Io { .. } => exit::IO,
                E::Malformed(_) | E::RankMismatch { .. } | E::DegreeOverflow { .. } | E::Json(_) => exit::PARSE,
                E::BoundMismatch(_) | E::BaseMismatch(_) => exit::BOUND,
                E::NotDerivation(_) | E::NotCocycle(_) | E::Invalid(_) => exit::VALIDATION,
                E::NonIntegral => exit::NEGATIVE,
                E::Internal(_) => exit::INTERNAL,
            },
        }
    }

    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            exit::USAGE => "usage",
            exit::IO => "io",
            exit::PARSE => "parse",
            exit::BOUND => "bound",
            exit::VALIDATION => "validation",
            exit::NEGATIVE => "negative",
            _ => "internal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A validator found a violation.
    Failed,
    /// The computation succeeded with a negative answer (obstructed, not certified, unknown).
    Negative,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => exit::OK,
            Status::Failed => exit::VALIDATION,
            Status::Negative => exit::NEGATIVE,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "fail",
            Status::Negative => "negative",
        }
    }
}

/// What a subcommand produced: text lines for people, a JSON value for tools.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub bound: Option<usize>,
    pub base: Option<BaseRing>,
    pub seed: Option<u64>,
    pub status: Status,
    pub lines: Vec<String>,
    pub result: Value,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, bound: None, base: None, seed: None, status: Status::Ok, lines: Vec::new(), result: json!({}) }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn context(&mut self, bound: usize, base: BaseRing) {
        self.bound = Some(bound);
        self.base = Some(base);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool": "ln-deform",
            "version": VERSION,
            "command": self.command,
            "status": self.status.name(),
            "bound": self.bound,
            "base": self.base.map(|b| b.to_string()),
            "seed": self.seed,
            "result": self.result,
        })
    }
}

pub fn error_json(command: &str, err: &CliError) -> Value {
    json!({
        "tool": "ln-deform",
        "version": VERSION,
        "command": command,
        "status": "error",
        "error": { "category": err.category(), "message": err.to_string() },
    })
}

pub fn verdict_json(what: &str, v: &Verdict) -> Value {
    match v {
        Verdict::Pass => json!({ "what": what, "verdict": "pass" }),
        Verdict::Fail(x) => json!({ "what": what, "verdict": "fail", "violation": x }),
    }
}
