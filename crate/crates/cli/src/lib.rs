//! Command-line front end: configuration, transcript files and the four
//! subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod instance;
