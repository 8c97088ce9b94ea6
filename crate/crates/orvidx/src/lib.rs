//! Growth orders, Matuszewska indices and growth indices of weight sequences
//! and weight functions, together with checkers for the classical weight
//! conditions and generators for the standard example families.
//!
//! Everything lives in the natural-log domain: a weight function is carried as
//! its profile `u ↦ ln σ(e^u)` and a weight sequence as `p ↦ ln M_p`, so values
//! such as `2^(2^64)` never have to be materialized.

pub mod associated;
pub mod cli;
pub mod error;
pub mod fn_model;
pub mod generators;
pub mod indices;
pub mod legendre;
pub mod numeric;
pub mod profile;
pub mod seq_model;
pub mod suites;
pub mod verdict;

pub use error::{Error, Result};
pub use fn_model::WeightFunction;
pub use indices::{ExtReal, IndexReport};
pub use profile::LogProfile;
pub use seq_model::{QuotientSequence, WeightSequence};
pub use verdict::{Status, Verdict};
