//! Benchmark harness for the min-max multi-depot mTSP solver: instance file
//! format, result rows and statistics, reference-table comparison, and the
//! experiment-matrix runner behind the `mmtsp` CLI.

pub mod format;
pub mod matrix;
pub mod results;

pub use format::{parse_instance, parse_instance_file, write_instance, write_instance_file};
pub use matrix::{cell_seed, parse_grid, run_matrix, ConfigSpec};
pub use results::{
    compare_to_reference, emit_plot_data, ComparisonReport, ReferenceTable, ResultRow, ResultSink,
    RowStatus,
};
