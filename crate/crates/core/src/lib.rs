//! Geometric multipartite entanglement measures for qubit registers.

pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Eigensystem, StateVector, C64};
pub mod clifford;
pub mod measures;
pub mod probes;
pub mod roof;
pub mod states;
