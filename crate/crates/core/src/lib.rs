//! Nambu-bracket formulation of maximally superintegrable systems.
//!
//! Symbolic expressions ([`expr`]), Poisson and Nambu brackets
//! ([`brackets`]), constraint functionals and their normalization
//! constants ([`constraints`]), a catalog of systems ([`systems`]), and a
//! verification harness ([`harness`]).

pub mod brackets;
pub mod constraints;
pub mod expr;
pub mod harness;
pub mod numeric;
pub mod systems;

pub use brackets::{BracketError, Observable, PhaseSpace};
pub use constraints::{
    ConstantFamily, ConstraintError, ConstraintSet, IndexSelection, NormalizationConstant,
    ReconstructError,
};
pub use expr::{parse, Binding, EvalError, Expr, ParseError, Polynomial};
pub use numeric::{scaled_residual, Tolerance};
pub use systems::{builtin, load, LoadError, MotionSystem, SamplePoint, SystemDefinition, SystemError};
pub use harness::{run_suite, CheckKind, Provenance, Selector, SuiteOptions, VerificationReport};
