//! File formats, JSON/CSV reports and the command-line driver for
//! [`elastoray_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod encode;
pub mod medium_file;
pub mod pool;
pub mod report;

pub use cli::Cli;
pub use report::Report;
