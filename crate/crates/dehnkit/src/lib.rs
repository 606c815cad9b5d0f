//! Computational toolkit for Dehn fillings and Dehn extensions of
//! torsion-free Kleinian groups.
//!
//! The crate combines exact integer lattice arithmetic for cusp data,
//! finite group presentations with marked peripheral subgroups, numeric
//! SL(2,C) representations with a Newton filling solver, cyclically
//! reduced normal forms in Dehn extensions, and hyperbolic-geometry
//! diagnostics (piecewise-geodesic polygons and their fatness metrics)
//! in the upper half-space model of H^3.

pub mod error;
pub mod fatpoly;
pub mod h3;
pub mod json;
pub mod lattice;
pub mod normal_form;
pub mod presentation;
pub mod repvar;
pub mod solver;

pub use error::{Error, Result};
