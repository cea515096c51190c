//! Symbolic and numeric verification of the φ⁴ field theory on the
//! deformed superspace ℝ^{m|1}: rational-function coefficients, the star
//! word rewrite system, and the action-identity verifier.

pub mod ratfn;
pub mod verify;
pub mod words;

pub use ratfn::RationalCoeff;
pub use verify::{
    numeric_crosscheck, verify_action_identity, verify_bracket_identity, ActionVerdict,
    NumericCrosscheck, ProofReport, QftParams,
};
pub use words::{rewrite_linear_star, super_expand, FormalExpr, StarWord, Token};
