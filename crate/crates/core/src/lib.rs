//! Inductive Grover oracular quantum neural network.
//!
//! A dense statevector simulator, a reference Grover search, a builder for
//! the variational oracle network and the classical loop that trains it from
//! database/hit examples.

pub mod circuit;
pub mod error;
pub mod grover;
pub mod harness;
pub mod model;
pub mod network;
pub mod statevector;
pub mod training;

pub use circuit::{Angle, Circuit, GateKind, GateOp, ParamBindings, ParamId, Program};
pub use error::{Error, Result};
pub use model::{ExecutionMode, VariationalModel};
pub use network::{FlagMode, NetworkOptions, NetworkShape, SynapseMode, IGOQNN};
pub use statevector::{StateVector, Unitary2};
