//! Tree-based genetic programming for symbolic regression with a pluggable
//! bloat-control layer.
//!
//! The crate is organised bottom-up:
//!
//! * [`exprtree`] expression trees, protected primitives, random generation
//! * [`problems`] the six benchmark targets and fitness-case sampling
//! * [`fitness`] raw error, adjusted fitness, population evaluation
//! * [`selection`] tournament, lexicographic, double tournament and bucketing
//! * [`bloatcontrol`] the Tarpeian method
//! * [`engine`] the generational loop
//! * [`metrics`] cross-run aggregation into mean fitness / mean tree size
//! * [`harness`] experiment configs, sweeps, CSV persistence and SVG reports

pub mod bloatcontrol;
pub mod engine;
pub mod error;
pub mod exprtree;
pub mod fitness;
pub mod harness;
pub mod metrics;
pub mod problems;
pub mod rng;
pub mod selection;

pub use error::{GpError, Result};
