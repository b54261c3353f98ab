//! Classification of short social-media messages by authorial purpose.
//!
//! The crate covers the full pipeline: corpus filtering and normalization
//! (`corpus`), tokenization and negation scoping (`textproc`), emotion
//! lexicons and PMI-based lexicon induction (`lexicons`), sparse feature
//! extraction (`features`), a linear one-vs-rest max-margin learner
//! (`learner`), crowd-annotation aggregation and agreement analytics
//! (`annotations`), and a stratified cross-validation and ablation harness
//! (`evalharness`).

pub mod annotations;
pub mod corpus;
pub mod error;
pub mod evalharness;
pub mod features;
pub mod learner;
pub mod lexicons;
pub mod textproc;

mod seeding;

pub use error::{Error, Result};
