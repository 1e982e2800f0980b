//! Exact symbolic engine for scalar third-order ODEs `u''' = f(x, u, u', u'')`.
//!
//! The crate decides whether such an equation is point-equivalent to the
//! canonical form `u''' = 0` (the class with the maximal seven-dimensional
//! point symmetry group) by testing the identical vanishing of four relative
//! invariants, and, for equations that pass, constructs and verifies a
//! linearizing point transformation from the auxiliary-function system.
//! All arithmetic is exact over the rationals; there is no floating point
//! anywhere and every verdict is an identity, not an approximation.

pub mod expr;
pub mod jet;
mod mpoly;
pub mod parser;
pub mod report;
pub mod synthesis;
pub mod transform;

pub use expr::{ExprError, JetVar, RationalExpr};
pub use jet::{total_derivative, InvariantReport, Ode3, SQuantities, Verdict};
pub use parser::{parse, ParseError};
pub use report::Report;
pub use synthesis::{
    synthesize, Hints, SynthesisOptions, SynthesisResult, SynthesisTrace, Stage, StageError,
};
pub use transform::{
    aux_system_residuals, AuxTriple, PointTransform, Prolongation, TransformError,
};
