#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod homoclinic;
pub mod lpp;
pub mod maps;
pub mod measure;
pub mod metric;
pub mod sft;
pub mod shadowing;
pub mod word;

pub use error::{Error, Result};
pub use sft::TransitionMatrix;
pub use word::Word;

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
