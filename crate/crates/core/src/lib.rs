//! Computational potential theory near a boundary point: Riesz capacities,
//! Wiener-type series, swiss cheeses and bounded point derivations.

pub mod capacity;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod geometry;
pub mod measures;
pub mod potentials;

pub use error::{Error, Result};
