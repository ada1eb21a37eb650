//! Simulation of a perfect-state-transfer spin chain that thermalizes
//! through its quasi-fermionic eigenmodes, and comparison of two logical
//! qubit encodings under the resulting Lindblad dynamics.

pub mod analysis;
pub mod chain;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod transfer;
pub mod tridiag;
pub mod verify;

pub use chain::{ChainSpec, ModeBasis, Omega};
pub use error::{Result, WireError};
pub use fock::{FockSpace, ModeFrame, Operator};
