//! Phishing email detection from ten heuristic indicators.
//!
//! The crate is organised as a pipeline:
//!
//! - [`email`] turns raw `.eml`/mbox bytes into a [`email::ParsedEmail`].
//! - [`resolver`] answers the network questions some indicators need
//!   (redirect target, certificate issuer, traffic rank, domain age), either
//!   from a JSON fixture or from live lookups.
//! - [`features`] applies the ten indicator rules and yields a
//!   [`features::FeatureVector`].
//! - [`classifiers`] holds logistic regression, a feed-forward network and a
//!   kernel SVM, all trained from scratch.
//! - [`evaluation`] covers standardization, splitting, detection metrics and
//!   the experiment grids.
//! - [`corpus`] deduplicates, balances, synthesizes and stores datasets.
//! - [`cli`] wires everything into the `phishkit` command.
//!
//! Runnable walkthroughs for each capability live under `examples/`.

pub mod classifiers;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod email;
pub mod evaluation;
pub mod features;
pub mod resolver;

pub use dataset::{Dataset, DatasetError};
