//! Finite-horizon computational symbolic dynamics.
//!
//! Construct subshifts from several families (full shifts, SFTs, beta
//! shifts, S-gap shifts, bounded-density shifts, coded shifts, products and
//! sliding-block factors), enumerate their languages exactly, verify
//! specification-type properties (specification, almost specification and
//! its one-sided variants, with general mistake functions), estimate entropy,
//! compute measures of maximal entropy for SFTs, run the gluing/obstruction
//! decomposition machinery, and build the double-log coded counterexample at
//! desk scale.
//!
//! Everything is deterministic: enumeration order is canonical, witnesses are
//! canonical-first, and parallel sweeps merge in canonical order.

pub mod alphabet;
pub mod analysis;
pub mod cache;
pub mod counterexample;
pub mod doc;
pub mod entropy;
pub mod error;
pub mod language;
pub mod mistake;
pub mod report;
pub mod shift;
pub mod structure;

pub use alphabet::{Alphabet, Word};
pub use error::{Error, Result};
pub use mistake::{MistakeFunction, MistakeRule};
pub use shift::{make_shift, Membership, Shift, ShiftSpec};
