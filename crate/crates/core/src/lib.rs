//! Exact construction of Bergman fans and Chow rings of polymatroids with geometric
//! building sets, with brute-force cross-checks of the equivalent constructions and of
//! Poincaré duality, Hard Lefschetz and Hodge–Riemann on small instances.

pub mod building;
pub mod chow;
pub mod error;
pub mod fan;
pub mod kahler;
pub mod lift;
pub mod linalg;
pub mod polymatroid;
pub mod polytope;
pub mod subset;
pub mod verify;

pub use error::{Error, Result};
pub use lift::MultisymMatroid;
pub use polymatroid::{FlatLattice, Polymatroid, ProjectionMap};
