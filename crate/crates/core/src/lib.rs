//! Exact Grassmann/Berezin calculus, graded star products with their
//! Clifford structure constants, a grid realization of the Weyl-type
//! quantization map on superspace, the quantum supertorus, and a symbolic
//! verifier for the associated Grosse–Wulkenhaar-type action identity.

pub mod clifford_fine;
pub mod error;
pub mod grassmann;
pub mod gridfn;
pub mod hilbert;
pub mod poly;
pub mod qft;
pub mod quantization;
pub mod scalar;
pub mod starproduct;
pub mod superfn;
pub mod supertorus;
pub mod supersymplectic;

pub use error::{Error, Result};
