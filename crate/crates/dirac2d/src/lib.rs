//! Numerical verification of symmetry operators and separation of variables
//! for the Dirac equation on two-dimensional spin manifolds.
//!
//! The crate evaluates frames, metrics and operator coefficients as truncated
//! Taylor jets, builds the Dirac operator and its first- and second-order
//! symmetry operators from frame data, and checks the defining identities
//! (Killing equations, curvature identities, commutators, separability) to
//! tight numerical tolerances at randomly sampled base points.

pub mod cli;
pub mod clifford;
pub mod geometry;
pub mod expr;
pub mod jets;
pub mod killing;
pub mod separation;
pub mod symop;
