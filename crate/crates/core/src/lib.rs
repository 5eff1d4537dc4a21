//! Citation-impact normalization: field- and year-normalized indicators on
//! the cited and citing side, and their evaluation against peer
//! recommendations.

pub mod cited;
pub mod citing;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod refsets;
pub mod stats;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
