//! Core algorithms for extracting nominal case markers from a verse-parallel
//! corpus without labelled data.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! transformation over in-memory structures; reading and writing files, the
//! run configuration and the command line live in the `casemark` crate.
//!
//! The pipeline, per target language:
//!
//! 1. [`projection`]: project English NP spans through word alignments and
//!    split the language's word types into NP-relevant and NP-irrelevant.
//! 2. [`extraction`]: enumerate `$`-delimited character n-grams of the
//!    NP-relevant words, drop rare ones, test each survivor's inside/outside
//!    association with [`stats::fisher_exact_two_sided`], and keep word
//!    endings.
//! 3. [`silver`] and [`eval`]: build reference suffix inventories from
//!    paradigm tables and score the extracted sets against them.
//! 4. [`analysis`]: group parallel NPs by their cross-lingual marker
//!    combination and export the NP/word cooccurrence matrix.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod corpus;
mod error;
pub mod eval;
pub mod extraction;
pub mod projection;
pub mod silver;
pub mod stats;

pub use error::{Error, Result};

/// Word boundary sentinel used in n-gram candidates and markers.
pub const BOUNDARY: char = '$';
