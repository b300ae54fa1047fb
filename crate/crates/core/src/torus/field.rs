use rustfft::num_complex::Complex64;

use super::grid::{PeriodicGrid, Point};
use crate::error::{Error, Result};

/// Complex node values on a periodic grid.
///
/// Real data is stored with zero imaginary parts; [`ScalarField::is_real`]
/// lets the solvers take a faster real-only path.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: PeriodicGrid,
    values: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: PeriodicGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        Self { grid, values: vec![Complex64::new(c, 0.0); grid.node_count()] }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(Point) -> f64) -> Self {
        Self { grid, values: grid.coords().map(|p| Complex64::new(f(p), 0.0)).collect() }
    }

    pub fn from_fn_complex(grid: PeriodicGrid, f: impl Fn(Point) -> Complex64) -> Self {
        Self { grid, values: grid.coords().map(f).collect() }
    }

    pub(crate) fn from_parts(grid: PeriodicGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Drops imaginary parts.
    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(|v| Complex64::new(f(v.re), 0.0))
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// `∫ f dx` by the rectangle rule (spectrally accurate for smooth periodic f).
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Mean over the unit torus; equals [`Self::integral`].
    pub fn mean(&self) -> Complex64 {
        self.integral()
    }

    /// `∫ f g dx` without conjugation.
    pub fn pairing(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<Complex64>() * self.grid.cell_volume())
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Shift node values by whole grid steps: `g(x) = f(x + shift h)`.
    pub fn translate(&self, shift: [usize; 2]) -> Self {
        let n = self.grid.points_per_axis();
        let values = (0..self.grid.node_count())
            .map(|idx| {
                let [i0, i1] = self.grid.multi_index(idx);
                let j1 = if self.grid.dim() == 1 { 0 } else { (i1 + shift[1]) % n };
                self.values[self.grid.flat_index((i0 + shift[0]) % n, j1)]
            })
            .collect();
        Self { grid: self.grid, values }
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }
}

/// A real vector field sampled on a grid, one component per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteVectorField {
    grid: PeriodicGrid,
    components: Vec<ScalarField>,
}

impl DiscreteVectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid =
            *components.first().ok_or_else(|| Error::GridMismatch("vector field without components".into()))?.grid();
        if components.len() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch("components live on different grids".into()));
        }
        Ok(Self { grid, components: components.into_iter().map(|c| c.re()).collect() })
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(Point) -> [f64; 2]) -> Self {
        Self::from_samples(grid, grid.coords().map(f).collect())
    }

    /// Build from one velocity per node (second entries ignored in 1D).
    pub fn from_samples(grid: PeriodicGrid, samples: Vec<[f64; 2]>) -> Self {
        assert_eq!(samples.len(), grid.node_count());
        let components = (0..grid.dim())
            .map(|axis| ScalarField::from_real(grid, samples.iter().map(|v| v[axis]).collect()).unwrap())
            .collect();
        Self { grid, components }
    }

    pub fn constant(grid: PeriodicGrid, c: [f64; 2]) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn negated(&self) -> Self {
        Self { grid: self.grid, components: self.components.iter().map(|c| c.scale(-1.0)).collect() }
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { grid: self.grid, components: self.components.iter().map(f).collect() }
    }

    pub fn try_map_components(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(Self { grid: self.grid, components: self.components.iter().map(f).collect::<Result<_>>()? })
    }

    /// Velocity at node `idx`; unused second entry is 0 in 1D.
    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (axis, c) in self.components.iter().enumerate() {
            v[axis] = c.values()[idx].re;
        }
        v
    }

    /// `max_x |b(x)|` with the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.node_count())
            .map(|i| {
                let v = self.at(i);
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Sum of the component L1 norms.
    pub fn l1_norm(&self) -> f64 {
        self.components.iter().map(|c| super::norms::lp_norm(c, 1.0).unwrap()).sum()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("vector fields on different grids".into()));
        }
        Ok(Self {
            grid: self.grid,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?,
        })
    }
}
