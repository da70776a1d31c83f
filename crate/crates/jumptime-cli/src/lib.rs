//! Library surface of the experiment CLI: configuration, commands,
//! manifests, and the acceptance suite. The binary in `main.rs` is a thin
//! argument-parsing shell over these.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;
