//! Command-line front end for the `casimir` library: run configuration
//! parsing, CSV export, and SVG plotting. The binary in `main.rs` is a thin
//! dispatcher over these modules so everything here is testable in-process.

// Same convention as the core crate: `!(x > 0.0)` rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
pub mod svg;
