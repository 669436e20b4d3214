//! Indirect genetic algorithm for weekly nurse rostering.
//!
//! The GA searches over permutations of nurses; a greedy decoder turns each
//! permutation into a schedule by giving every nurse, in order, one of its
//! feasible shift patterns. Schedules are scored by total preference cost
//! plus a penalty per uncovered shift.
//!
//! * [`model`]: instances, shift patterns, coverage, cost and fitness.
//! * [`decoders`]: the cover, contribution and combined schedule builders.
//! * [`genetic`]: the GA engine, crossovers and mutation.
//! * [`oracle`]: exact branch-and-bound solver and schedule audit for small
//!   instances.
//! * [`instgen`]: synthetic instances and the instance file format.
//! * [`bench`]: experiment grids, results files and summary tables.
//! * [`cli`]: the `roster` command line.

pub mod bench;
pub mod cli;
pub mod decoders;
pub mod error;
pub mod genetic;
pub mod instgen;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
