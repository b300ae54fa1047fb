use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::torus::{lp_norm, spectral, DiscreteVectorField, Mollifier, MollifierKernel, ScalarField};
use crate::zoo::{sample_field, VectorFieldSpec};

/// `[B, C_ε]` for a fixed field and kernel, with `B u = b·∇u`.
///
/// Evaluated as `Σ_i b_i ∂_i(C_ε u) - Σ_i ∂_i C_ε(b_i u) + C_ε(u div b)`,
/// every derivative and convolution a Fourier multiplier. Only mollified
/// quantities are differentiated, so rough `b` and `u` are admissible.
#[derive(Clone, Debug)]
pub struct Commutator {
    b: DiscreteVectorField,
    div_b: ScalarField,
    kernel: MollifierKernel,
}

impl Commutator {
    pub fn new(b: &DiscreteVectorField, eps: f64, m: &Mollifier) -> Result<Self> {
        let kernel = m.kernel(b.grid(), eps)?;
        Ok(Self { b: b.clone(), div_b: spectral::divergence(b), kernel })
    }

    pub fn kernel(&self) -> &MollifierKernel {
        &self.kernel
    }

    pub fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        u.check_same_grid(self.b.component(0))?;
        let grid = *u.grid();
        let k = self.kernel.spectrum();
        let u_hat = spectral::forward(u);

        let mut first = ScalarField::zeros(grid);
        for axis in 0..grid.dim() {
            let d = spectral::inverse(
                &grid,
                u_hat.iter().enumerate().map(|(i, v)| v * k[i] * spectral::derivative_symbol(&grid, i, axis)).collect(),
            );
            first = first.add(&d.mul(self.b.component(axis))?)?;
        }

        // -Σ ∂_i C(b_i u) + C(u div b), accumulated in Fourier space
        let mut acc = spectral::forward(&u.mul(&self.div_b)?);
        acc.iter_mut().enumerate().for_each(|(i, v)| *v *= k[i]);
        for axis in 0..grid.dim() {
            let bu = spectral::forward(&u.mul(self.b.component(axis))?);
            for (i, v) in bu.into_iter().enumerate() {
                acc[i] -= v * k[i] * spectral::derivative_symbol(&grid, i, axis);
            }
        }
        let out = first.add(&spectral::inverse(&grid, acc))?;
        Ok(if u.is_real() { out.re() } else { out })
    }
}

/// `[B, C_ε] u` with a freshly built kernel.
pub fn commutator_apply(b: &DiscreteVectorField, u: &ScalarField, eps: f64, m: &Mollifier) -> Result<ScalarField> {
    Commutator::new(b, eps, m)?.apply(u)
}

/// `B(C_ε u) - C_ε(B u)` by direct differencing, with spectral `B`. Only
/// meaningful for smooth data; used to validate [`commutator_apply`].
pub fn commutator_direct(b: &DiscreteVectorField, u: &ScalarField, eps: f64, m: &Mollifier) -> Result<ScalarField> {
    let kernel = m.kernel(b.grid(), eps)?;
    let left = spectral::advective_derivative(b, &kernel.apply(u)?)?;
    let right = kernel.apply(&spectral::advective_derivative(b, u)?)?;
    left.sub(&right)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorRow {
    pub eps: f64,
    pub l1_norm: f64,
}

/// `‖[B, C_ε] u‖_{L¹}` for each ε, with `b` sampled from `spec` on the grid of `u`.
pub fn commutator_sweep(
    spec: &VectorFieldSpec,
    u: &ScalarField,
    eps_list: &[f64],
    m: &Mollifier,
) -> Result<Vec<CommutatorRow>> {
    let b = sample_field(spec, u.grid())?;
    eps_list
        .iter()
        .map(|&eps| Ok(CommutatorRow { eps, l1_norm: lp_norm(&commutator_apply(&b, u, eps, m)?, 1.0)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::torus::PeriodicGrid;

    #[test]
    fn vanishes_for_constant_fields() {
        let g = PeriodicGrid::new(2, 64).unwrap();
        let b = DiscreteVectorField::constant(g, [0.3, -1.2]);
        let u = ScalarField::from_fn(g, |p| if p[0] < 0.3 { 1.0 } else { (2.0 * PI * p[1]).sin() });
        let c = commutator_apply(&b, &u, 0.25, &Mollifier::default()).unwrap();
        assert!(lp_norm(&c, f64::INFINITY).unwrap() < 1e-10);
    }

    #[test]
    fn formula_matches_direct_difference_for_smooth_data() {
        let g = PeriodicGrid::new(2, 64).unwrap();
        let b = DiscreteVectorField::from_fn(g, |p| [(2.0 * PI * p[1]).sin(), (2.0 * PI * p[0]).sin()]);
        let u = ScalarField::from_fn(g, |p| (2.0 * PI * p[0]).cos() * (4.0 * PI * p[1]).sin());
        let m = Mollifier::default();
        let a = commutator_apply(&b, &u, 0.25, &m).unwrap();
        let d = commutator_direct(&b, &u, 0.25, &m).unwrap();
        assert!(lp_norm(&a.sub(&d).unwrap(), 1.0).unwrap() < 1e-10);
        assert!(lp_norm(&a, 1.0).unwrap() > 1e-3);
    }
}
