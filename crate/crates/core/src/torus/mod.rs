//! Grids, fields, spectral calculus, norms and mollification on the unit torus.

pub mod field;
pub mod grid;
pub mod io;
pub mod mollifier;
pub mod norms;
pub mod spectral;

pub use field::{DiscreteVectorField, ScalarField};
pub use grid::{min_image, torus_distance, wrap_unit, PeriodicGrid, Point};
pub use mollifier::{mollify, Mollifier, MollifierKernel};
pub use norms::{discrete_tv, l1_distance, lp_norm, negative_sobolev_norm};
pub use spectral::divergence;
