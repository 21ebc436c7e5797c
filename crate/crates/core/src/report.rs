//! JSON-serializable check outcomes and run reports.

use serde::{Deserialize, Serialize};

use crate::coeff_ring::Scalar;
use crate::exterior::Form;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Zero,
    Nonzero,
}

/// One checked identity. `status` is `zero` when the difference of the two
/// sides vanished (exactly, or within tolerance for numeric checks).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub identity: String,
    pub status: Status,
    pub residual_terms: usize,
    pub residual: String,
}

impl Outcome {
    pub fn from_form(identity: impl Into<String>, residual: &Form) -> Outcome {
        Outcome {
            identity: identity.into(),
            status: if residual.is_zero() {
                Status::Zero
            } else {
                Status::Nonzero
            },
            residual_terms: residual.term_count(),
            residual: residual.render(),
        }
    }

    pub fn from_scalar(identity: impl Into<String>, residual: &Scalar) -> Outcome {
        Outcome {
            identity: identity.into(),
            status: if residual.is_zero() {
                Status::Zero
            } else {
                Status::Nonzero
            },
            residual_terms: if residual.is_zero() {
                0
            } else {
                residual.term_count()
            },
            residual: residual.render(),
        }
    }

    /// A pass/fail check whose residual is a free-form message.
    pub fn verdict(identity: impl Into<String>, ok: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            identity: identity.into(),
            status: if ok { Status::Zero } else { Status::Nonzero },
            residual_terms: usize::from(!ok),
            residual: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Zero
    }
}

pub fn all_passed(outcomes: &[Outcome]) -> bool {
    outcomes.iter().all(Outcome::passed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub model: Option<String>,
    pub eps: Option<i64>,
    pub outcomes: Vec<Outcome>,
    pub pass: bool,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        model: Option<String>,
        eps: Option<i64>,
        outcomes: Vec<Outcome>,
        wall_time_ms: u128,
    ) -> Report {
        let pass = all_passed(&outcomes);
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            model,
            eps,
            outcomes,
            pass,
            wall_time_ms,
        }
    }
}
