//! Command-line front end for `sparseconv`: polynomial files, instance
//! generation, multiplication, verification and benchmarking.

pub mod bench;
pub mod commands;
pub mod instance;
pub mod io;

pub use commands::{main_with_args, Cli, CliError, EXIT_FAILURE, EXIT_INVALID, EXIT_OK};
