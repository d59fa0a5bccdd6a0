//! Entanglement of two-qubit states under local amplitude damping when one of
//! the two observers is uniformly accelerated.
//!
//! The numeric pipeline goes
//! [`states::rindler_expand`] → [`matcore::partial_trace_last`] →
//! [`channel::apply_local_channel`] → [`entanglement::concurrence_eigen`], and
//! every stage has a closed-form partner it is checked against.

pub mod channel;
pub mod entanglement;
pub mod error;
pub mod matcore;
pub mod states;
pub mod sudden_death;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
