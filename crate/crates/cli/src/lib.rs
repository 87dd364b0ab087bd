//! File formats, run configuration, parallel suite execution and reports for
//! the `rieszkit` command-line tool.

pub mod config;
pub mod io;
pub mod report;
pub mod run;
