//! Command-line front end for eatxt: commands, file handling and the
//! two-way synchronization loop.

pub mod app;
pub mod files;
pub mod sync;

pub use app::{run, run_from, Cli, Command};
