//! Auditing toolkit for user–item interaction logs.
//!
//! The pipeline is: [`ingest`] a log, optionally [`preprocess`] it, build
//! evaluation subsets with [`split`], then inspect datasets with [`stats`]
//! and splits with [`diagnostics`]. [`report`] turns the results into
//! threshold-evaluated summaries, versioned JSON and Markdown.

pub mod diagnostics;
pub mod error;
pub mod ingest;
pub mod model;
pub mod preprocess;
pub mod report;
pub mod split;
pub mod stats;
pub mod time;

pub use error::{Error, Result};
pub use ingest::{ColumnMapping, ParseOptions, TimestampFormat};
pub use model::{Interaction, InteractionLog, InteractionRef, SubsetRole, Timestamp};
