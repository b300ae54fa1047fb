use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the torus. One-dimensional grids use only the first coordinate.
pub type Point = [f64; 2];

/// Uniform tensor grid on the unit torus `R^n / Z^n`, `n` in `{1, 2}`.
///
/// Nodes are stored row-major: node `(i0, i1)` has flat index `i0 * n + i1`
/// and coordinate `(i0 h, i1 h)`. Axis 0 is `x`, axis 1 is `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct PeriodicGrid {
    dim: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    dim: usize,
    points_per_axis: usize,
}

impl TryFrom<GridRepr> for PeriodicGrid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        PeriodicGrid::new(r.dim, r.points_per_axis)
    }
}

impl From<PeriodicGrid> for GridRepr {
    fn from(g: PeriodicGrid) -> Self {
        GridRepr { dim: g.dim, points_per_axis: g.n }
    }
}

pub const MIN_POINTS_PER_AXIS: usize = 16;

impl PeriodicGrid {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if points_per_axis < MIN_POINTS_PER_AXIS || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= {MIN_POINTS_PER_AXIS}, got {points_per_axis}"
            )));
        }
        Ok(Self { dim, n: points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// `h = 1/N`; exact because `N` is a power of two.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Quadrature weight of one node, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// The same torus with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { dim: self.dim, n: self.n * 2 }
    }

    /// Multi-index of a flat node index. The second entry is 0 in 1D.
    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    #[inline]
    pub fn flat_index(&self, i0: usize, i1: usize) -> usize {
        if self.dim == 1 {
            i0
        } else {
            i0 * self.n + i1
        }
    }

    #[inline]
    pub fn coord(&self, idx: usize) -> Point {
        let [i0, i1] = self.multi_index(idx);
        let h = self.spacing();
        [i0 as f64 * h, i1 as f64 * h]
    }

    pub fn coords(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.node_count()).map(move |i| self.coord(i))
    }

    /// Flat index of the neighbour one step along `axis` (periodic).
    #[inline]
    pub fn step(&self, idx: usize, axis: usize) -> usize {
        let [i0, i1] = self.multi_index(idx);
        match axis {
            0 => self.flat_index((i0 + 1) % self.n, i1),
            _ => self.flat_index(i0, (i1 + 1) % self.n),
        }
    }
}

/// Wrap a coordinate into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Minimum-image representative of a displacement, in `[-1/2, 1/2)`.
#[inline]
pub fn min_image(d: f64) -> f64 {
    d - (d + 0.5).floor()
}

/// Geodesic distance on the torus between two points of dimension `dim`.
pub fn torus_distance(a: &Point, b: &Point, dim: usize) -> f64 {
    (0..dim).map(|i| min_image(a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}
