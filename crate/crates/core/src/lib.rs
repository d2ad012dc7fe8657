//! Verification and simulation toolkit for a catalog of four-dimensional
//! isometry groups, their invariant metrics and admissible potentials.

// index loops mirror the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod adiff;
pub mod catalog;
pub mod checks;
pub mod cli;
pub mod geometry;
pub mod linalg;
pub mod mechanics;
pub mod report;
