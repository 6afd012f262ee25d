//! Scenario plumbing: JSON scenario files, the sweep runner, and report
//! emission in JSON/CSV/SVG.

pub mod emit;
pub mod runner;
pub mod scenario;

pub use emit::{emit, Format};
pub use runner::{builtin_suite, run};
pub use scenario::{Check, Scenario};
