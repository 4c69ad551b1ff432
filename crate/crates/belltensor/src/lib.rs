//! File formats, parallel drivers, plotting and the verification suite on
//! top of [`belltensor_core`].

pub mod cli;
pub mod dump;
pub mod emit;
pub mod error;
pub mod format;
pub mod ids;
pub mod parallel;
pub mod verify;

pub use belltensor_core as core;
pub use error::{Error, Result};
