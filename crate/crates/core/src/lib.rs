//! Exact verification toolkit for vertically discrete fc-multicategories
//! (virtual double categories), their differential graded variants, and the
//! A∞-type structures that arise as algebras over free dg presets.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: directed graphs, composable edge paths and profile-loops.
//! * [`label`]: `ℕ^k` label monoids and the labeling fc-multicategories.
//! * [`fc`]: finitely enumerable fc-multicategories, axiom audits and
//!   factor-closedness.
//! * [`free`]: free dg fc-multicategories on degree-one generators, with the
//!   A∞ operad / category / bimodule / module presets.
//! * [`chain`]: exact cochain complexes and the dg endomorphism
//!   fc-multicategory.
//! * [`algebra`]: algebra certification, both through the generic cochain-map
//!   condition and through directly evaluated A∞-type relations.
//! * [`format`] and [`cli`]: the JSON interchange format and batch commands.

pub mod algebra;
pub mod chain;
pub mod cli;
pub mod error;
pub mod fc;
pub mod fixtures;
pub mod format;
pub mod free;
pub mod graph;
pub mod label;
pub mod scalar;

pub use error::{Error, Result};
