//! File formats, threading, verification suites and the command-line driver
//! around [`dnet_core`].

pub mod cli;
pub mod config;
pub mod io;
pub mod parallel;
pub mod report;
pub mod scan;
pub mod verify;

/// Library version recorded in every JSON output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSON and CSV output layouts.
pub const SCHEMA: u32 = 1;
