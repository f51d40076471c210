//! Model catalog, MRDF JSON I/O, command-line tooling and the NDJSON
//! session service built on `loopkin-core`.

pub mod cli;
pub mod format;
pub mod models;
pub mod output;
pub mod session;
pub mod stats;
pub mod wire;
