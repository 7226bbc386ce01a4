//! Instance generation, JSON documents and result tables.

pub mod generator;
pub mod json;
pub mod report;

pub use generator::{fading, generate, GeneratorParams};
pub use json::{instance_hash, read_instance, write_instance, SolutionDoc};
pub use report::{report, ResultRow};
