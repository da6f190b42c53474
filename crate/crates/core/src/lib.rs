//! Simulation and analysis of quantum-PUF identification protocols.

pub mod adversary;
pub mod analysis;
pub mod equality;
pub mod error;
pub mod protocol;
pub mod qpuf;
pub mod qstate;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use seed::{SeedStream, SimRng};
