//! Verification reports shared by every check in the kernel.

use serde::{Deserialize, Serialize};

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// A single failure witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub indices: String,
    pub lhs: String,
    pub rhs: String,
}

/// Result of one verification check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub space: String,
    pub status: Status,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

/// Cap on stored witnesses so that a broken check does not flood the output.
const MAX_WITNESSES: usize = 50;

impl VerificationReport {
    pub fn new(check: impl Into<String>, space: impl Into<String>) -> Self {
        VerificationReport { check: check.into(), space: space.into(), status: Status::Pass, failures: Vec::new(), notes: Vec::new() }
    }
    /// Records a failure witness and marks the report failed.
    pub fn fail(&mut self, indices: impl Into<String>, lhs: impl ToString, rhs: impl ToString) {
        self.status = Status::Fail;
        if self.failures.len() < MAX_WITNESSES {
            self.failures.push(Failure { indices: indices.into(), lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
    }
    /// Records `lhs == rhs`, adding a witness on mismatch.
    pub fn expect_eq<T: PartialEq + ToString>(&mut self, indices: impl Into<String>, lhs: &T, rhs: &T) {
        if lhs != rhs {
            self.fail(indices, lhs.to_string(), rhs.to_string());
        }
    }
    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
    /// Merges another report's failures and notes into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
        for f in other.failures {
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }
}
