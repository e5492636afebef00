//! Finite-element laboratory for the planar Robin torsion problem
//!
//! ```text
//!   -Δu = 1 in Ω,    ∂u/∂ν + βu = 0 on ∂Ω,   β > 0
//! ```
//!
//! The crate is split the way a computation flows:
//!
//! * [`geometry`] builds parametric domains and conforming triangulations,
//! * [`fem`] assembles and solves the P1 Robin system and evaluates the
//!   torsional rigidity and the Rayleigh quotient,
//! * [`rearrange`] holds the exact level-set machinery for piecewise-linear
//!   fields (distribution function, decreasing and Schwarz rearrangements,
//!   level-set perimeters, boundary integrals, circle fits),
//! * [`comparison`] compares a solved field against the explicit radial
//!   solution on the disk of equal area and runs the rigidity probe.

pub mod comparison;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod rearrange;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];
