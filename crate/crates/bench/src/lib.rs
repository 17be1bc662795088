//! Benchmark harness: instance configs, CSV traces, seed sweeps, trace
//! comparison and SVG snapshots.

pub mod cli;
pub mod compare;
pub mod config;
pub mod runner;
pub mod trace_csv;

pub use config::InstanceConfig;
pub use runner::{run_instance, Failure};
