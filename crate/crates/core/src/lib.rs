//! Combinatorial test-suite generation for typed REST API specifications.

pub mod combinator;
pub mod config;
pub mod decompose;
pub mod emit;
pub mod pipeline;
pub mod providers;
pub mod runner;
pub mod spec;
pub mod value;
