//! Discrete Fourier calculus on periodic grids.
//!
//! Forward transforms are normalized by the node count so that the zeroth
//! coefficient is the mean of the field. Differentiation, convolution and
//! Sobolev weights are all expressed as multipliers on these coefficients.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{DiscreteVectorField, ScalarField};
use super::grid::PeriodicGrid;
use crate::error::Result;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// In-place 1D transform of a contiguous buffer (length a power of two).
pub fn fft_1d(data: &mut [Complex64], inverse: bool) {
    plan(data.len(), inverse).process(data);
}

fn transform(grid: &PeriodicGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_axis();
    let fft = plan(n, inverse);
    // rows: axis 1 is contiguous in 2D, axis 0 in 1D
    fft.process(data);
    if grid.dim() == 2 {
        let mut col = vec![Complex64::default(); n * n];
        for i0 in 0..n {
            for i1 in 0..n {
                col[i1 * n + i0] = data[i0 * n + i1];
            }
        }
        fft.process(&mut col);
        for i1 in 0..n {
            for i0 in 0..n {
                data[i0 * n + i1] = col[i1 * n + i0];
            }
        }
    }
}

/// Fourier coefficients `f̂_k`, normalized so that `f̂_0` is the mean.
pub fn forward(field: &ScalarField) -> Vec<Complex64> {
    let mut data = field.values().to_vec();
    transform(field.grid(), &mut data, false);
    let scale = 1.0 / field.grid().node_count() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

/// Inverse of [`forward`].
pub fn inverse(grid: &PeriodicGrid, mut coeffs: Vec<Complex64>) -> ScalarField {
    transform(grid, &mut coeffs, true);
    ScalarField::from_parts(*grid, coeffs)
}

/// Signed integer frequency of DFT index `i`; the Nyquist index maps to `+n/2`.
#[inline]
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Frequency vector of a flat spectral index, plus Nyquist flags per axis.
#[inline]
pub fn mode(grid: &PeriodicGrid, idx: usize) -> ([f64; 2], [bool; 2]) {
    let n = grid.points_per_axis();
    let [i0, i1] = grid.multi_index(idx);
    let k = [wavenumber(i0, n) as f64, if grid.dim() == 2 { wavenumber(i1, n) as f64 } else { 0.0 }];
    let nyq = [i0 == n / 2, grid.dim() == 2 && i1 == n / 2];
    (k, nyq)
}

/// `|2πk|²` for every spectral index.
pub fn laplacian_symbol(grid: &PeriodicGrid) -> Vec<f64> {
    (0..grid.node_count())
        .map(|idx| {
            let (k, _) = mode(grid, idx);
            (2.0 * PI).powi(2) * (k[0] * k[0] + k[1] * k[1])
        })
        .collect()
}

/// Symbol of `∂/∂x_axis`: `2πi k_axis`, zero at the Nyquist frequency so that
/// real fields stay real.
#[inline]
pub fn derivative_symbol(grid: &PeriodicGrid, idx: usize, axis: usize) -> Complex64 {
    let (k, nyq) = mode(grid, idx);
    if nyq[axis] {
        Complex64::default()
    } else {
        Complex64::new(0.0, 2.0 * PI * k[axis])
    }
}

/// Multiply Fourier coefficients by `symbol(idx)` and transform back.
pub fn apply_multiplier(field: &ScalarField, symbol: impl Fn(usize) -> Complex64) -> ScalarField {
    let mut c = forward(field);
    c.iter_mut().enumerate().for_each(|(i, v)| *v *= symbol(i));
    inverse(field.grid(), c)
}

/// Spectral partial derivative.
pub fn partial(field: &ScalarField, axis: usize) -> ScalarField {
    let grid = *field.grid();
    apply_multiplier(field, |i| derivative_symbol(&grid, i, axis))
}

/// Spectral gradient of a real scalar field.
pub fn gradient(field: &ScalarField) -> DiscreteVectorField {
    let comps = (0..field.grid().dim()).map(|a| partial(field, a)).collect();
    DiscreteVectorField::new(comps).expect("gradient components share one grid")
}

/// Spectral divergence `Σ_i ∂b_i/∂x_i`.
pub fn divergence(b: &DiscreteVectorField) -> ScalarField {
    let grid = *b.grid();
    let mut acc = vec![Complex64::default(); grid.node_count()];
    for (axis, comp) in b.components().iter().enumerate() {
        let c = forward(comp);
        for (i, v) in c.into_iter().enumerate() {
            acc[i] += v * derivative_symbol(&grid, i, axis);
        }
    }
    inverse(&grid, acc).re()
}

/// `b · ∇u` with spectral derivatives.
pub fn advective_derivative(b: &DiscreteVectorField, u: &ScalarField) -> Result<ScalarField> {
    u.check_same_grid(b.component(0))?;
    let grid = *u.grid();
    let uhat = forward(u);
    let mut out = ScalarField::zeros(grid);
    for (axis, comp) in b.components().iter().enumerate() {
        let d = inverse(&grid, uhat.iter().enumerate().map(|(i, v)| v * derivative_symbol(&grid, i, axis)).collect());
        out = out.add(&d.mul(comp)?)?;
    }
    Ok(out)
}
