//! Single-deletion-correcting codes over the binary alphabet.
//!
//! - [`bitseq`]: packed binary words, runs, deletion surfaces.
//! - [`vt`]: Varshamov-Tenengolts codes, size formulas, perfectness.
//! - [`sdecc`]: validity, decoding, conflict graph, bounds, exact maximum search.
//! - [`constraints`]: the linear constraint families `C0`..`C6`.
//! - [`ilp`]: models, LP files, solution import and verification, built-in solver.
//!
//! Data-parallel loops run on rayon when the `parallel` feature (default) is
//! enabled and sequentially otherwise; results are identical either way.

pub mod bitseq;
pub mod constraints;
mod cover;
pub mod error;
pub mod ilp;
mod par;
pub mod sdecc;
pub mod vt;

pub use bitseq::{Word, WordSet};
pub use cover::SearchOptions;
pub use error::{Error, Result};
pub use par::is_parallel;
pub use vt::Code;

/// Crate version, recorded in generated models.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
