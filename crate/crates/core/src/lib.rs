//! Isotropy testing for planar point patterns.

pub mod error;
pub mod estimation;
pub mod geometry;
pub mod io;
pub mod rng;
pub mod processes;
pub mod replication;
pub mod study;
pub mod summaries;
pub mod testing;

pub use error::{Error, Result};
