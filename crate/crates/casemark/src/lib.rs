//! File formats, run configuration, subcommands and a synthetic fixture
//! generator around [`casemark_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod output;
pub mod synthetic;

pub use casemark_core as core;
