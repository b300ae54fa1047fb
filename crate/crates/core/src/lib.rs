//! Numerical experiments for transport equations with rough vector fields on
//! the torus: approximable solutions by double mollification, commutator
//! estimates, flows recovered from the Cauchy operator, and the harmonic
//! analysis behind the Osgood counterexample.

pub mod approximable;
pub mod error;
pub mod flow;
pub mod osgood;
pub mod solver;
pub mod torus;
pub mod zoo;

pub use approximable::{CascadeResult, CascadeSchedule, CascadeSummary};
pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use solver::{Interpolation, SolveOptions, Trajectory};
pub use torus::{
    discrete_tv, divergence, lp_norm, mollify, negative_sobolev_norm, DiscreteVectorField, Mollifier, MollifierKernel,
    PeriodicGrid, Point, ScalarField,
};
pub use zoo::VectorFieldSpec;

/// Library version, echoed in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
