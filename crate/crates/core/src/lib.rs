pub mod bipartite;
pub mod builders;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod parameters;
pub mod polynomial;
pub mod relations;
pub mod report;
pub mod spectral;
pub mod structureconsts;

pub use error::{Error, Result};
pub use numerics::{Matrix, Tolerance};
