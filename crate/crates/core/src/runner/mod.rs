//! Sweep orchestration: configuration, constraint checks, the codebook x
//! scenario x Es/N0 sweep, statistics and CSV output.

pub mod config;
pub mod constraints;
pub mod csv_io;
pub mod stats;
pub mod sweep;

pub use config::{QueueUnits, SweepConfig};
pub use constraints::{check_constraints, ConstraintKind, Violation};
pub use csv_io::{read_results_csv, write_results_csv, write_summary_csv, LinkRecord, SummaryRow};
pub use stats::{min_statistic, mode_statistic};
pub use sweep::{
    evaluate_sweep_point, run_sweep, select_best_codebook, PointEvaluation, PointSummary,
    Simulator, SweepResult,
};
