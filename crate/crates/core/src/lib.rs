//! p-mechanics on the Heisenberg group.

pub mod cantrans;
pub mod commands;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod gauss;
pub mod heisenberg;
pub mod kepler;
pub mod numerics;
pub mod poly;
pub mod sample;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
