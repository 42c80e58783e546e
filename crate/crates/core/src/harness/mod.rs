//! Batch drivers: exhaustive sweeps against the oracle, communication
//! benchmarks with growth fits, and reference-table reproduction.

mod bench;
pub mod fit;
mod sweep;
mod tables;

pub use bench::{bench, bench_inputs, BenchPoint, BenchReport};
pub use fit::{Fit, Model};
pub use sweep::{sweep, sweep_with, Mismatch, SweepOptions, SweepReport, SweepRun, MAX_SWEEP_BITS};
pub use tables::{tables, CellDiff, Table, TablesReport};
