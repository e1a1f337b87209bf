//! Command-line front end for the two-firm competition map.
//!
//! `leapfrog <simulate|fixed-points|bifurcation|classify|stability>` reads a
//! flat `key = value` config (see [`config`]), applies flag overrides and
//! writes a CSV or JSON table.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

pub use args::{main_with_args, Cli};
pub use commands::{run, Command, CommandError};
pub use config::{ConfigError, Format, RawConfig, RunConfig};
pub use output::{format_number, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
