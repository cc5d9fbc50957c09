//! Bilingual word embeddings under one objective-composition framework.
//!
//! Four trainers cover four kinds of cross-lingual supervision:
//!
//! - [`biskip`]: parallel sentences with word alignments,
//! - [`bicvm`]: sentence-aligned text only,
//! - [`bicca`]: a translation lexicon over two monolingual spaces,
//! - [`bivcd`]: comparable document pairs.
//!
//! [`evalsuite`] and [`stats`] score the resulting spaces, and [`testkit`]
//! generates synthetic bilingual data with known ground truth.

pub mod bicca;
pub mod biskip;
pub mod bivcd;
pub mod bicvm;
pub mod stats;
pub mod testkit;
pub mod corpus;
pub mod embedstore;
pub mod error;
pub mod evalsuite;
pub mod sgcore;

pub use error::{Error, Result};
