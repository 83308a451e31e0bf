//! Manufactured problems, error metrics and the experiment driver.

pub mod examples;
pub mod experiment;
pub mod metrics;

pub use examples::*;
pub use experiment::*;
pub use metrics::*;
