//! Command-line front-end: parsing systems of constraints, running the
//! decomposition with adjacency, and rendering reports.

pub mod parse;
pub mod report;

pub use parse::{parse_system, print_system, ParseError};
pub use report::{emit, run, RunConfig, RunError};
