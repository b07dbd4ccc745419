//! IO, file formats, the `dlg` command line and the stateless HTTP facade over `dialog-core`.

pub mod cli;
pub mod formats;
pub mod harness;
pub mod service;
pub mod session;
pub mod wire;

pub use session::{SessionSnapshot, StateWire, StepRejection};
