//! Coverage and fault-kill matrices, test groupings and orderings.

mod bitrow;
mod format;
mod groups;
mod matrix;
mod ordering;

pub use bitrow::BitRow;
pub use format::{parse_coverage, parse_kill, write_coverage, write_kill, MatrixFormat};
pub use groups::{aggregate_rows, GroupMap};
pub use matrix::{CoverageMatrix, KillMatrix};
pub use ordering::{Instrumentation, Ordering};
