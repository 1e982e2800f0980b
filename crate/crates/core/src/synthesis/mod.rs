//! Construction of the linearizing point transformation for a maximally
//! symmetric equation.
//!
//! The pipeline solves the auxiliary system for a3, a2, a1 by comparing
//! coefficients of jet variables, reducing to first-order problems in one
//! variable (log-derivative integration for the multiplicative stages, a
//! bounded rational-solution search for the Riccati stage), then integrates
//! the transformation-defining equations for phi and psi. A final
//! verification-guided completion step repairs the freedom the psi equation
//! leaves open. Every successful run ends with an exact verification; the
//! trace records each stage.

mod f1system;
mod loginteg;
mod riccati;
mod stages;

pub(crate) mod linsys;
pub(crate) mod upoly;

use crate::expr::RationalExpr;
use crate::jet::{InvariantReport, Ode3, Verdict};
use crate::transform::{AuxTriple, PointTransform};
use serde::Serialize;
use thiserror::Error;

/// Stage tags for the synthesis trace.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stage {
    A3,
    A2,
    A1,
    Phi,
    Psi,
    Completion,
    Verified,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::A3 => "A3",
            Stage::A2 => "A2",
            Stage::A1 => "A1",
            Stage::Phi => "PHI",
            Stage::Psi => "PSI",
            Stage::Completion => "COMPLETION",
            Stage::Verified => "VERIFIED",
        };
        f.write_str(s)
    }
}

/// One record per solved equation.
#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub stage: Stage,
    pub equation: String,
    pub ansatz: String,
    pub result: String,
    #[serde(rename = "residual-check")]
    pub residual_check: String,
}

/// Ordered record of how synthesis derived its artifacts.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SynthesisTrace {
    pub steps: Vec<TraceStep>,
}

impl SynthesisTrace {
    pub(crate) fn push(&mut self, stage: Stage, equation: String, ansatz: String, result: String) {
        self.steps.push(TraceStep {
            stage,
            equation,
            ansatz,
            result,
            residual_check: "zero".into(),
        });
    }

    pub(crate) fn push_failure(
        &mut self,
        stage: Stage,
        equation: String,
        ansatz: String,
        error: &StageError,
    ) {
        self.steps.push(TraceStep {
            stage,
            equation,
            ansatz,
            result: format!("unsolved: {error}"),
            residual_check: "failed".into(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.steps).expect("trace serializes")
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StageError {
    #[error("ansatz exhausted: {0}")]
    AnsatzExhausted(String),
    #[error("no rational particular solution of the Riccati equation within the degree bound: {0}")]
    RiccatiUnsolved(String),
    #[error("compatibility conditions violated: {0}")]
    CompatibilityViolated(String),
    #[error("integrability (cross-derivative) check failed: {0}")]
    NotExact(String),
    #[error("antiderivative leaves the rational class: {0}")]
    NonrationalAntiderivative(String),
    #[error("completion found no verifying correction within the degree bound")]
    CompletionFailed,
    #[error("hint for stage {stage} rejected; residual = {residual}")]
    HintRejected { stage: Stage, residual: String },
}

/// Partially determined auxiliaries reported when a stage fails.
#[derive(Clone, Debug, Default)]
pub struct PartialAux {
    pub a3: Option<RationalExpr>,
    pub a2: Option<RationalExpr>,
    pub a1: Option<RationalExpr>,
    pub phi: Option<RationalExpr>,
    pub psi: Option<RationalExpr>,
}

#[derive(Clone, Debug)]
pub enum SynthesisResult {
    Success {
        transform: PointTransform,
        aux: AuxTriple,
        trace: SynthesisTrace,
    },
    Partial {
        aux: PartialAux,
        trace: SynthesisTrace,
        blocking: Stage,
        error: StageError,
    },
    NotApplicable {
        witness: usize,
        report: InvariantReport,
    },
}

/// User-supplied stage overrides. A hint is validated against its stage
/// equation and rejected with a residual report when it does not solve it.
#[derive(Clone, Debug, Default)]
pub struct Hints {
    pub a3: Option<RationalExpr>,
    pub a2: Option<RationalExpr>,
    /// Particular solution for the reduced Riccati equation, written as an
    /// expression in x (standing for the reduced variable).
    pub f2: Option<RationalExpr>,
    pub phi: Option<RationalExpr>,
    pub psi: Option<RationalExpr>,
}

#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    /// Total-degree bound for undetermined-coefficient candidates (psi and
    /// the completion correction).
    pub max_degree: u32,
    /// Numerator/denominator degree bound for the Riccati rational-solution
    /// search.
    pub riccati_degree: u32,
    pub hints: Hints,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            max_degree: 6,
            riccati_degree: 4,
            hints: Hints::default(),
        }
    }
}

pub use stages::{solve_a1, solve_a2, solve_a3, solve_phi, solve_psi};

/// Full pipeline: classify, solve the auxiliary system, build the
/// transformation and verify it exactly.
pub fn synthesize(ode: &Ode3, options: &SynthesisOptions) -> SynthesisResult {
    let report = ode.invariants();
    if report.verdict == Verdict::NotMaximallySymmetric {
        return SynthesisResult::NotApplicable {
            witness: report.witness.expect("nonvanishing invariant exists"),
            report,
        };
    }
    stages::run_pipeline(ode, options)
}
