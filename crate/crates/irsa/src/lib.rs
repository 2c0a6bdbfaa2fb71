//! Std side of the harness: HTTP completions, record/replay stores, dataset files, the
//! parallel evaluator and the `irsa` command line.

pub mod cli;
pub mod fixtures;
pub mod http;
pub mod io;
pub mod pool;
pub mod store;

pub use irsa_core;
