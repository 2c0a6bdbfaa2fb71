#![no_std]
//! Core of the IRSA harness: task model, oracles, execution-trace rendering, the
//! prompt mini-language, prompt builders, mock backends, and the generation runtime.

extern crate alloc;

pub mod backend;
pub mod dataset;
pub mod dsl;
pub mod eval;
pub mod model;
pub mod oracles;
pub mod prompt;
pub mod puzzle;
pub mod runtime;
pub mod trace;
