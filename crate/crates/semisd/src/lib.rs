//! Std companion to `semisd-core`: the `semisd` command line, JSON reports,
//! CSV sample files, goodness-of-fit tests and multi-threaded drivers.

pub mod cli;
pub mod gof;
pub mod io;
pub mod parallel;
pub mod recipes;

pub use semisd_core as core;
