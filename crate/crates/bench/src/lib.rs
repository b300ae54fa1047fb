//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use roughflow::zoo::{sample_field, ShearParams, SwirlParams};
use roughflow::{DiscreteVectorField, PeriodicGrid, ScalarField, VectorFieldSpec};

pub fn grid(n: usize) -> PeriodicGrid {
    PeriodicGrid::new(2, n).expect("benchmark grids are powers of two")
}

pub fn shear() -> VectorFieldSpec {
    VectorFieldSpec::BvShear(ShearParams::default())
}

pub fn swirl() -> VectorFieldSpec {
    VectorFieldSpec::SmoothSwirl(SwirlParams::default())
}

pub fn field(spec: &VectorFieldSpec, n: usize) -> DiscreteVectorField {
    sample_field(spec, &grid(n)).expect("zoo fields sample on the torus")
}

/// `cos 2πx + ½ sin 2πy`
pub fn smooth_data(n: usize) -> ScalarField {
    ScalarField::from_fn(grid(n), |x| (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * x[1]).sin())
}
