//! File formats, reports, renders and command drivers behind the `tamlab`
//! binary.

pub mod commands;
pub mod points;
pub mod render;
pub mod report;
pub mod tas;

pub use commands::{run_cli, CmdOutput};
