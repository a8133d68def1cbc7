//! Batch toolkit for mining self-admitted technical debt (SATD) in Maven
//! build specifications: comment extraction, keyword detection, location
//! mapping, reason/purpose classification, and issue-link triage.

pub mod cli;
pub mod detect;
pub mod error;
pub mod eval;
pub mod forge;
pub mod labels;
pub mod links;
pub mod model;
pub mod pom;
pub mod readiness;
pub mod record;
pub mod report;
pub mod text;

pub use error::{Error, Result};
