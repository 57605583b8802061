//! Auditing finite candidate theories of a two-party Bell experiment.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob`]: dense probability tables with marginalization, conditioning
//!   and tolerance-aware comparison.
//! - [`scenario`]: the candidate-theory data model and built-in models.
//! - [`audit`]: local causality and its constituent sufficiency conditions.
//! - [`fisher`]: sufficiency of statistics for finite parametric families.
//! - [`bounds`]: CHSH values and exact local-hidden-variable feasibility.
//! - [`format`] and [`report`]: the model file format and report rendering
//!   used by the `lcaudit` binary.

pub mod audit;
pub mod bounds;
pub mod error;
pub mod fisher;
pub mod format;
pub mod prob;
pub mod report;
pub mod sample;
pub mod scenario;

pub use error::{Error, Result};
pub use prob::{table_close, Axis, ProbTable, Tolerance};
