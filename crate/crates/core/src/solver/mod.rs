//! Characteristics, semi-Lagrangian transport, the dual density equation,
//! vanishing viscosity, and weak-form defects.

pub mod characteristics;
pub mod transport;
pub mod weak;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::io::write_container;
use crate::torus::{lp_norm, PeriodicGrid, ScalarField};

pub use characteristics::{characteristic_endpoint, solve_characteristics, CharacteristicPath};
pub use transport::{
    default_dt, max_stable_dt, solve_classical_transport, solve_density, solve_density_with_divergence, solve_viscous,
    step_count, SemiLagrangian, ViscousOptions,
};
pub use weak::{
    standard_battery, temporal_profiles, weak_defect, weak_defect_battery, weak_defect_with_initial, SpatialBump,
    TemporalProfile, TestFunction,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Bilinear; monotone, so the discrete maximum principle holds.
    #[default]
    Linear,
    /// Catmull-Rom bicubic.
    Cubic,
}

pub const DEFAULT_MAX_SNAPSHOTS: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    pub interp: Interpolation,
    /// Upper bound on stored snapshots, including the initial and final ones.
    pub max_snapshots: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { interp: Interpolation::Linear, max_snapshots: DEFAULT_MAX_SNAPSHOTS }
    }
}

impl SolveOptions {
    pub fn cubic() -> Self {
        Self { interp: Interpolation::Cubic, ..Self::default() }
    }

    pub fn with_snapshots(mut self, max_snapshots: usize) -> Self {
        self.max_snapshots = max_snapshots;
        self
    }
}

/// Time-indexed snapshots of a scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: PeriodicGrid,
    times: Vec<f64>,
    snapshots: Vec<ScalarField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, snapshots: Vec<ScalarField>) -> Result<Self> {
        let first = snapshots.first().ok_or_else(|| Error::InvariantViolated("empty trajectory".into()))?;
        let grid = *first.grid();
        if times.len() != snapshots.len() {
            return Err(Error::InvariantViolated(format!("{} times for {} snapshots", times.len(), snapshots.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvariantViolated("snapshot times must increase".into()));
        }
        for s in &snapshots {
            first.check_same_grid(s)?;
        }
        Ok(Self { grid, times, snapshots })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[ScalarField] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &ScalarField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &ScalarField {
        self.snapshots.last().unwrap()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { grid: self.grid, times: self.times.clone(), snapshots: self.snapshots.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(Self {
            grid: self.grid,
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn check_aligned(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.times.len() != other.times.len() {
            return Err(Error::GridMismatch("trajectories are not aligned".into()));
        }
        if self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::GridMismatch("trajectories use different snapshot times".into()));
        }
        Ok(())
    }

    /// `max_t ‖u(t) - v(t)‖_{L¹}` over the shared snapshot times.
    pub fn sup_l1_distance(&self, other: &Self) -> Result<f64> {
        self.sup_distance(other, |d| lp_norm(d, 1.0))
    }

    /// `max_t norm(u(t) - v(t))` over the shared snapshot times.
    pub fn sup_distance(&self, other: &Self, norm: impl Fn(&ScalarField) -> Result<f64>) -> Result<f64> {
        self.check_aligned(other)?;
        let mut worst: f64 = 0.0;
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            worst = worst.max(norm(&a.sub(b)?)?);
        }
        Ok(worst)
    }

    /// Snapshot recorded at time `t` (within 1e-12), if any.
    pub fn at_time(&self, t: f64) -> Option<&ScalarField> {
        self.times.iter().position(|s| (s - t).abs() <= 1e-12).map(|i| &self.snapshots[i])
    }

    /// Encode as a single-component container.
    pub fn write_container<W: Write>(&self, w: W) -> Result<()> {
        let frames: Vec<Vec<&ScalarField>> = self.snapshots.iter().map(|s| vec![s]).collect();
        write_container(w, &self.times, &frames)
    }
}
