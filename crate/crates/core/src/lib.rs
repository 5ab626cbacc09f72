//! Sentence attackability: labeling, features, effect estimation and ranking
//! for persuasion dialogue corpora.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod knowledge;
pub mod labeling;
pub mod linalg;
pub mod ranker;
pub mod report;
pub mod stats;
pub mod synthetic;
pub mod text;
pub mod topics;

pub use error::{Error, Result};
