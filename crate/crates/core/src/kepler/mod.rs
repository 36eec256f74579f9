//! The Coulomb problem in spherical polar coordinates.

pub mod angular;
pub mod coords;
pub mod klauder;
pub mod special;
pub mod spectrum;
pub mod transform;

pub use angular::*;
pub use coords::*;
pub use klauder::*;
pub use special::*;
pub use spectrum::*;
pub use transform::*;
