//! Fidelity and entanglement fidelity of finite-dimensional quantum states and
//! channels, with numerical checks of the extremal characterizations of
//! entanglement fidelity.

pub mod channels;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod fidelity;
pub mod io;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
