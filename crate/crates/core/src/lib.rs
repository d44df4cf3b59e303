//! Citation-context analysis over full-text corpora: in-text marker
//! extraction, location and mention profiles, citation-sentence sentiment,
//! and textual/bibliographic relatedness, aggregated per year or age.

pub mod error;
pub mod location;
pub mod mentions;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod relatedness;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
pub use model::{CitingDocument, ParsedDocument, ReferenceEntry, Section, TargetPaper, TargetSet};
pub use report::{GroupBy, Report, YearlyMetrics};
