//! Numerical kernels for teleportation-assisted linear-optics CSIGN gates:
//! permanents and heralded gates, generalized nonlinear-sign synthesis,
//! continuous-variable state and gate teleportation, and Monte-Carlo resource
//! counting for the discrete-variable route.

pub mod cv;
pub mod dv;
pub mod error;
pub mod fock;
pub mod gate;
pub mod nssd;
pub mod optimize;
pub mod special;

pub use error::{Error, Result};
