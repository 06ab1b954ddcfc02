use std::fmt;

use serde::Serialize;

/// The first failed check of a validator, located precisely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Which law failed, e.g. `"product formula"`.
    pub rule: String,
    /// Where it failed, e.g. `"alpha=[1] beta=[1]"`.
    pub location: String,
    /// Optional extra detail (offending values).
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Violation {
    pub fn new(rule: impl Into<String>, location: impl Into<String>) -> Self {
        Self { rule: rule.into(), location: location.into(), detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}", self.rule, self.location)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// Outcome of an exhaustive validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(v) => Some(v),
        }
    }

    /// Runs `next` only if `self` passed.
    pub fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        match self {
            Verdict::Pass => next(),
            fail => fail,
        }
    }
}

impl From<Option<Violation>> for Verdict {
    fn from(v: Option<Violation>) -> Self {
        v.map_or(Verdict::Pass, Verdict::Fail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail(v) => write!(f, "FAIL: {v}"),
        }
    }
}
