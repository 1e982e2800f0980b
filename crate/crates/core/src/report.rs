//! Machine-readable report shared by the CLI and the Python bindings.

use crate::jet::{InvariantReport, Verdict};
use crate::synthesis::TraceStep;
use serde::Serialize;

/// Outcome status of a command.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Partial,
    NotApplicable,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsOut {
    pub i1: String,
    pub i2: String,
    pub i3: String,
    pub i4: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformOut {
    pub phi: String,
    pub psi: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxOut {
    pub a1: String,
    pub a2: String,
    pub a3: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorOut {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

/// One report per processed expression. Every expression field holds the
/// canonical printed form and re-parses to the same canonical value.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing: Option<[bool; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformation: Option<TransformOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auxiliaries: Option<AuxOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocking_stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pullback: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorOut>,
}

impl Report {
    pub fn empty(status: Status) -> Self {
        Report {
            status,
            input: None,
            invariants: None,
            vanishing: None,
            verdict: None,
            witness: None,
            transformation: None,
            auxiliaries: None,
            trace: None,
            blocking_stage: None,
            verified: None,
            pullback: None,
            error: None,
        }
    }

    pub fn with_invariants(mut self, rep: &InvariantReport) -> Self {
        self.invariants = Some(InvariantsOut {
            i1: rep.i1.to_string(),
            i2: rep.i2.to_string(),
            i3: rep.i3.to_string(),
            i4: rep.i4.to_string(),
        });
        self.vanishing = Some(rep.vanishing);
        self.verdict = Some(rep.verdict);
        self.witness = rep.witness.map(|k| format!("I{k}"));
        self
    }

    pub fn error(kind: &str, message: String, position: Option<usize>) -> Self {
        let mut r = Report::empty(Status::Error);
        r.error = Some(ErrorOut {
            kind: kind.to_string(),
            message,
            position,
        });
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
