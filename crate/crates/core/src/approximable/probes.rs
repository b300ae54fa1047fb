//! Renormalization and uniqueness probes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cascade::CascadeResult;
use crate::error::{invalid, Result};
use crate::solver::transport::{check_step, step_count};
use crate::solver::{weak_defect_battery, SemiLagrangian, SolveOptions, Trajectory};
use crate::torus::{divergence, lp_norm, DiscreteVectorField, Mollifier, PeriodicGrid, ScalarField};
use crate::zoo::{sample_divergence, sample_field, VectorFieldSpec};

/// Bounded `C¹` functions applied node-wise to the real part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Beta {
    ClampedIdentity {
        lo: f64,
        hi: f64,
    },
    Square,
    Arctan,
    /// `tanh`
    SaturatingRamp,
}

impl Beta {
    pub fn apply(&self, v: f64) -> f64 {
        match *self {
            Self::ClampedIdentity { lo, hi } => v.clamp(lo, hi),
            Self::Square => v * v,
            Self::Arctan => v.atan(),
            Self::SaturatingRamp => v.tanh(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ClampedIdentity { .. } => "clamped_identity",
            Self::Square => "square",
            Self::Arctan => "arctan",
            Self::SaturatingRamp => "saturating_ramp",
        }
    }
}

/// The four standard β, the clamp spanning `[lo, hi]`.
pub fn beta_battery(lo: f64, hi: f64) -> [Beta; 4] {
    [Beta::ClampedIdentity { lo, hi }, Beta::Square, Beta::Arctan, Beta::SaturatingRamp]
}

/// Largest weak defect of `β(u)` over the standard test-function battery.
pub fn renormalization_defect_of(traj: &Trajectory, b: &DiscreteVectorField, beta: &Beta) -> Result<f64> {
    let renormalized = traj.map(|u| u.map_real(|v| beta.apply(v)));
    weak_defect_battery(&renormalized, b)
}

/// [`renormalization_defect_of`] applied to a cascade solution.
pub fn renormalization_defect(result: &CascadeResult, b: &DiscreteVectorField, beta: &Beta) -> Result<f64> {
    renormalization_defect_of(&result.solution, b, beta)
}

/// Non-negative smooth noise `|Σ_{|k|∞ ≤ K} c_k e^{2πik·x}|²` with unit L¹ norm.
pub fn smooth_noise(grid: &PeriodicGrid, seed: u64, max_mode: i64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ky_range = if grid.dim() == 2 { -max_mode..=max_mode } else { 0..=0 };
    let mut modes = Vec::new();
    for kx in -max_mode..=max_mode {
        for ky in ky_range.clone() {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            modes.push(([kx as f64, ky as f64], c));
        }
    }
    let g = ScalarField::from_fn(*grid, |x| {
        let z: Complex64 =
            modes.iter().map(|(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (k[0] * x[0] + k[1] * x[1]))).sum();
        z.norm_sqr()
    });
    let mass = lp_norm(&g, 1.0).unwrap();
    g.scale(1.0 / mass)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniquenessOptions {
    pub seed: u64,
    pub max_mode: i64,
    /// Mollify the field at this scale first (the cascade's `b_δ`); `None`
    /// or an unresolved scale uses the sampled field.
    pub delta: Option<f64>,
    pub mollifier: Mollifier,
    pub solve: SolveOptions,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        Self { seed: 0, max_mode: 3, delta: None, mollifier: Mollifier::default(), solve: SolveOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessRow {
    pub eta: f64,
    pub integral: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub horizon: f64,
    pub m_hat: f64,
    /// `exp(M̂ T) T`
    pub bound_constant: f64,
    pub rows: Vec<UniquenessRow>,
    pub within_bound: bool,
}

/// Start from zero data and inject a remainder of L¹ size η directly into
/// the equation for `v`: `∂v/∂t = b·∇v + r`, `v(0) = 0`. Reports
/// `I(T) = ∫ v(T)` against the Gronwall bound `exp(M̂ T) T η`.
pub fn uniqueness_probe(
    spec: &VectorFieldSpec,
    grid: &PeriodicGrid,
    horizon: f64,
    dt: f64,
    etas: &[f64],
    opts: &UniquenessOptions,
) -> Result<UniquenessReport> {
    if etas.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(invalid("etas", "remainder sizes must be non-negative"));
    }
    let mut b = sample_field(spec, grid)?;
    let mut div = match sample_divergence(spec, grid)? {
        Some(d) => d,
        None => divergence(&b),
    };
    if let Some(d) = opts.delta.filter(|&d| opts.mollifier.is_resolved(grid, d)) {
        let k = opts.mollifier.kernel(grid, d)?;
        b = k.apply_vector(&b)?;
        div = k.apply(&div)?;
    }
    check_step(&b, horizon, dt)?;
    let m_hat = lp_norm(&div, f64::INFINITY)?;
    let steps = step_count(horizon, dt);
    let actual = if steps == 0 { dt } else { horizon / steps as f64 };
    let sl = SemiLagrangian::new(&b, actual, opts.solve.interp);
    let noise = smooth_noise(grid, opts.seed, opts.max_mode).real_parts();
    let bound_constant = (m_hat * horizon).exp() * horizon;
    let zero = ScalarField::zeros(*grid);
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        let traj = sl.run_with(&zero, steps, 2, |state, _, _| {
            state.re.iter_mut().zip(&noise).for_each(|(v, r)| *v += actual * eta * r);
            Ok(())
        })?;
        rows.push(UniquenessRow { eta, integral: traj.last().integral().re, bound: bound_constant * eta });
    }
    let within_bound = rows.iter().all(|r| r.integral <= r.bound * (1.0 + 1e-9));
    Ok(UniquenessReport { horizon, m_hat, bound_constant, rows, within_bound })
}
