//! Linear and non-linear canonical transformations.

pub mod coupled;
pub mod integral;
pub mod spec;
pub mod symplectic;

pub use coupled::*;
pub use integral::*;
pub use spec::{parse_phase_poly, parse_poly, CtSpec};
pub use symplectic::*;
