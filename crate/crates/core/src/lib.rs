//! Exact Arakelov slopes of Euclidean lattices over Z and the freedom of
//! rational points on projective spaces, their products and hypersurfaces,
//! together with bounded-height point counting.

pub mod counting;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod projective;
pub mod varieties;

pub use error::{Error, Result};
