pub mod cli;
pub mod epsolver;
pub mod error;
pub mod linprop;
pub mod spectral;
pub mod symbols;
pub mod verify;

pub use error::{EpError, Result};
