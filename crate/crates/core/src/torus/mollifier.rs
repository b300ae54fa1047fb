//! The mollification operator `C_ε f = ρ_ε * f`.
//!
//! The kernel is the compactly supported bump `exp(-1/(1 - |z/R|²))` with
//! `R = ε r`, sampled on the nodes (minimum image) and renormalized so its
//! discrete integral is exactly one. Convolution is done by Fourier
//! multiplication with the transform of the sampled kernel, which equals the
//! periodic discrete convolution to rounding.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{DiscreteVectorField, ScalarField};
use super::grid::{min_image, PeriodicGrid};
use super::spectral;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_RADIUS: f64 = 0.25;

/// Smallest kernel radius, in grid steps, accepted by the resolution guard.
pub const MIN_RADIUS_IN_CELLS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mollifier {
    pub radius: f64,
}

impl Default for Mollifier {
    fn default() -> Self {
        Self { radius: DEFAULT_RADIUS }
    }
}

/// Unnormalized bump profile on the unit ball.
#[inline]
pub fn bump(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - z * z)).exp()
    }
}

impl Mollifier {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(invalid("mollifier_radius", format!("must lie in (0, 1/2), got {radius}")));
        }
        Ok(Self { radius })
    }

    /// Smallest admissible ε on `grid`.
    pub fn min_eps(&self, grid: &PeriodicGrid) -> f64 {
        MIN_RADIUS_IN_CELLS * grid.spacing() / self.radius
    }

    pub fn is_resolved(&self, grid: &PeriodicGrid, eps: f64) -> bool {
        eps * self.radius >= MIN_RADIUS_IN_CELLS * grid.spacing() * (1.0 - 1e-12)
    }

    /// Continuum kernel `ε^(-n) ρ(x/ε)` before discrete renormalization, where
    /// `ρ` is the bump of radius `r` (not normalized).
    pub fn profile(&self, eps: f64, dist: f64) -> f64 {
        bump(dist / (eps * self.radius))
    }

    /// Sample and renormalize the kernel `ρ_ε` on `grid`.
    pub fn kernel(&self, grid: &PeriodicGrid, eps: f64) -> Result<MollifierKernel> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid("eps", format!("must lie in (0, 1], got {eps}")));
        }
        if !self.is_resolved(grid, eps) {
            return Err(Error::UnderResolved { eps, min_eps: self.min_eps(grid) });
        }
        let samples: Vec<f64> = grid
            .coords()
            .map(|p| {
                let d2: f64 = (0..grid.dim()).map(|i| min_image(p[i]).powi(2)).sum();
                self.profile(eps, d2.sqrt())
            })
            .collect();
        let mass: f64 = samples.iter().sum::<f64>() * grid.cell_volume();
        let samples = ScalarField::from_real(*grid, samples.into_iter().map(|v| v / mass).collect())?;
        let mut spectrum = spectral::forward(&samples);
        // the kernel is even, so its transform is real
        spectrum.iter_mut().for_each(|c| c.im = 0.0);
        Ok(MollifierKernel { grid: *grid, eps, samples, spectrum })
    }
}

/// A sampled, normalized kernel `ρ_ε` ready to be applied repeatedly.
#[derive(Clone, Debug)]
pub struct MollifierKernel {
    grid: PeriodicGrid,
    eps: f64,
    samples: ScalarField,
    spectrum: Vec<Complex64>,
}

impl MollifierKernel {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Node samples of `ρ_ε` centred at the origin.
    pub fn samples(&self) -> &ScalarField {
        &self.samples
    }

    /// Fourier coefficients `ρ̂_ε(k)`; the zeroth is 1.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        f.check_same_grid(&self.samples)?;
        let out = spectral::apply_multiplier(f, |i| self.spectrum[i]);
        Ok(if f.is_real() { out.re() } else { out })
    }

    pub fn apply_vector(&self, b: &DiscreteVectorField) -> Result<DiscreteVectorField> {
        b.try_map_components(|c| self.apply(c))
    }
}

/// `C_ε f` with a freshly built kernel.
pub fn mollify(f: &ScalarField, eps: f64, m: &Mollifier) -> Result<ScalarField> {
    m.kernel(f.grid(), eps)?.apply(f)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn guard_names_minimal_eps() {
        let g = PeriodicGrid::new(2, 64).unwrap();
        let m = Mollifier::default();
        match m.kernel(&g, 0.05) {
            Err(Error::UnderResolved { min_eps, .. }) => assert!((min_eps - 0.125).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(m.kernel(&g, 0.125).is_ok());
    }

    #[test]
    fn kernel_has_unit_mass_and_compact_support() {
        let m = Mollifier::default();
        for dim in [1, 2] {
            let g = PeriodicGrid::new(dim, 128).unwrap();
            for eps in [1.0, 0.5, 0.1] {
                let k = m.kernel(&g, eps).unwrap();
                assert!((k.samples().integral().re - 1.0).abs() < 1e-12);
                assert!((k.spectrum()[0].re - 1.0).abs() < 1e-12);
                for (p, v) in g.coords().zip(k.samples().values()) {
                    let d = (0..dim).map(|i| min_image(p[i]).powi(2)).sum::<f64>().sqrt();
                    if d >= eps * m.radius {
                        assert_eq!(v.re, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn spike_reproduces_kernel() {
        let g = PeriodicGrid::new(1, 64).unwrap();
        let m = Mollifier::default();
        let k = m.kernel(&g, 0.5).unwrap();
        let mut spike = vec![0.0; 64];
        spike[10] = 64.0; // unit mass
        let out = k.apply(&ScalarField::from_real(g, spike).unwrap()).unwrap();
        for i in 0..64 {
            let expect = k.samples().values()[(i + 64 - 10) % 64].re;
            assert!((out.values()[i].re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_is_damped_by_kernel_coefficient() {
        let g = PeriodicGrid::new(1, 256).unwrap();
        let m = Mollifier::default();
        let e = ScalarField::from_fn_complex(g, |p| Complex64::from_polar(1.0, 2.0 * PI * p[0]));
        let mut last = 0.0;
        for eps in [1.0, 0.5, 0.25, 0.125] {
            // independent oracle: fine midpoint quadrature of the bump's cosine moment
            let r = eps * m.radius;
            let q = 20000;
            let (mut num, mut den) = (0.0, 0.0);
            for j in 0..q {
                let z = -r + (j as f64 + 0.5) * 2.0 * r / q as f64;
                let w = bump(z / r);
                num += w * (2.0 * PI * z).cos();
                den += w;
            }
            let oracle = num / den;
            let out = mollify(&e, eps, &m).unwrap();
            let ratio = (out.values()[0] / e.values()[0]).re;
            assert!((ratio - oracle).abs() < 1e-4, "eps {eps}: {ratio} vs {oracle}");
            assert!(ratio < 1.0 && ratio > last);
            last = ratio;
        }
    }
}
