//! Numerical verification of the large-mass limit of the three-dimensional
//! Dirac operator towards the MIT bag operator on exactly solvable model
//! geometries: the one-dimensional transverse problem, exterior
//! Dirichlet-to-energy maps on the flat torus and the ball, and radial
//! eigensolvers for the MIT bag, large-mass and Robin-type operators.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac_ball;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod numerics;
pub mod transverse;

pub use error::{Error, Result};
