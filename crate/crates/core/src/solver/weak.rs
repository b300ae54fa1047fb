//! Weak-form defect of a trajectory against separable test functions
//! `φ(x, t) = ψ(t) φ_s(x)`:
//!
//! `|∫₀ᵀ∫ u ∂φ/∂t + ∫ u⁰ φ(·,0) - ∫₀ᵀ∫ u div(bφ)|`,
//!
//! with composite Simpson quadrature over the stored snapshot times when they
//! are uniform and even in number of intervals, trapezoidal otherwise.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::torus::{min_image, spectral, DiscreteVectorField, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialBump {
    pub center: [f64; 2],
    pub width: f64,
}

impl SpatialBump {
    /// `Π_axes exp(1 - 1/(1 - s²))`, `s = (x - c)/w` (minimum image); peak value 1.
    pub fn value(&self, x: [f64; 2], dim: usize) -> f64 {
        let mut v = 1.0;
        for a in 0..dim {
            let s = min_image(x[a] - self.center[a]) / self.width;
            if s.abs() >= 1.0 {
                return 0.0;
            }
            v *= (1.0 - 1.0 / (1.0 - s * s)).exp();
        }
        v
    }
}

/// Time profiles `ψ(τ)`, `τ = t/T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalProfile {
    /// `(1 - τ)²`
    Quadratic,
    /// `cos²(πτ/2)`
    CosineSquared,
    /// `(1 - τ)³ (1 + 3τ)`, flat at both ends
    Smoothstep,
    /// `ψ ≡ 1`; does not vanish at `T`, so it is rejected by the defect.
    Constant,
}

impl TemporalProfile {
    pub fn value(&self, t: f64, horizon: f64) -> f64 {
        let tau = t / horizon;
        match self {
            Self::Quadratic => (1.0 - tau).powi(2),
            Self::CosineSquared => (0.5 * PI * tau).cos().powi(2),
            Self::Smoothstep => (1.0 - tau).powi(3) * (1.0 + 3.0 * tau),
            Self::Constant => 1.0,
        }
    }

    pub fn derivative(&self, t: f64, horizon: f64) -> f64 {
        let tau = t / horizon;
        match self {
            Self::Quadratic => -2.0 * (1.0 - tau) / horizon,
            Self::CosineSquared => -0.5 * PI * (PI * tau).sin() / horizon,
            Self::Smoothstep => -12.0 * tau * (1.0 - tau).powi(2) / horizon,
            Self::Constant => 0.0,
        }
    }
}

pub fn temporal_profiles() -> [TemporalProfile; 3] {
    [TemporalProfile::Quadratic, TemporalProfile::CosineSquared, TemporalProfile::Smoothstep]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub spatial: SpatialBump,
    pub temporal: TemporalProfile,
}

pub const BATTERY_CENTERS: [[f64; 2]; 5] = [[0.13, 0.71], [0.42, 0.28], [0.77, 0.55], [0.61, 0.93], [0.29, 0.47]];
pub const BATTERY_WIDTHS: [f64; 2] = [0.15, 0.3];

/// Five centres, two widths, three time profiles.
pub fn standard_battery() -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(30);
    for center in BATTERY_CENTERS {
        for width in BATTERY_WIDTHS {
            for temporal in temporal_profiles() {
                out.push(TestFunction { spatial: SpatialBump { center, width }, temporal });
            }
        }
    }
    out
}

/// Weak defect using the trajectory's first snapshot as the initial datum.
pub fn weak_defect(traj: &Trajectory, b: &DiscreteVectorField, phi: &TestFunction) -> Result<f64> {
    weak_defect_with_initial(traj, traj.initial(), b, phi)
}

/// Weak defect with an explicitly supplied initial datum.
pub fn weak_defect_with_initial(
    traj: &Trajectory,
    u0: &ScalarField,
    b: &DiscreteVectorField,
    phi: &TestFunction,
) -> Result<f64> {
    u0.check_same_grid(traj.initial())?;
    u0.check_same_grid(b.component(0))?;
    let horizon = traj.final_time();
    if horizon <= 0.0 {
        return Ok(0.0);
    }
    let end = phi.temporal.value(horizon, horizon);
    if end.abs() > 1e-12 {
        return Err(Error::TestFunctionSupport { value: end.abs() });
    }
    let grid = *traj.grid();
    let phi_s = ScalarField::from_fn(grid, |x| phi.spatial.value(x, grid.dim()));
    let b_phi = b.try_map_components(|c| c.mul(&phi_s))?;
    let div_b_phi = spectral::divergence(&b_phi);

    let integrand: Vec<Complex64> = traj
        .times()
        .iter()
        .zip(traj.snapshots())
        .map(|(&t, u)| {
            let a = u.pairing(&phi_s)?;
            let d = u.pairing(&div_b_phi)?;
            Ok(a * phi.temporal.derivative(t, horizon) - d * phi.temporal.value(t, horizon))
        })
        .collect::<Result<_>>()?;
    let mut total = time_quadrature(traj.times(), &integrand);
    total += u0.pairing(&phi_s)? * phi.temporal.value(0.0, horizon);
    Ok(total.norm())
}

fn time_quadrature(times: &[f64], f: &[Complex64]) -> Complex64 {
    let intervals = times.len() - 1;
    let h = times.last().unwrap() / intervals.max(1) as f64;
    let uniform = times.iter().enumerate().all(|(k, &t)| (t - k as f64 * h).abs() <= 1e-9 * h);
    if uniform && intervals >= 2 && intervals % 2 == 0 {
        let inner: Complex64 = (1..intervals).map(|k| f[k] * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
        return (f[0] + f[intervals] + inner) * (h / 3.0);
    }
    (1..times.len()).map(|k| (f[k] + f[k - 1]) * (0.5 * (times[k] - times[k - 1]))).sum()
}

/// Largest defect over [`standard_battery`].
pub fn weak_defect_battery(traj: &Trajectory, b: &DiscreteVectorField) -> Result<f64> {
    standard_battery().iter().try_fold(0.0f64, |m, phi| Ok(m.max(weak_defect(traj, b, phi)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::PeriodicGrid;

    #[test]
    fn profiles_vanish_at_horizon_and_derivatives_match() {
        for p in temporal_profiles() {
            assert!(p.value(2.0, 2.0).abs() < 1e-15);
            assert_eq!(p.value(0.0, 2.0), 1.0);
            for t in [0.3, 1.1, 1.7] {
                let d = 1e-6;
                let fd = (p.value(t + d, 2.0) - p.value(t - d, 2.0)) / (2.0 * d);
                assert!((fd - p.derivative(t, 2.0)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn battery_shape() {
        let b = standard_battery();
        assert_eq!(b.len(), 30);
        let bump = b[0].spatial;
        assert_eq!(bump.value(bump.center, 2), 1.0);
        assert_eq!(bump.value([bump.center[0] + 0.2, bump.center[1]], 2), 0.0);
    }

    #[test]
    fn constant_profile_is_rejected() {
        let g = PeriodicGrid::new(2, 16).unwrap();
        let u = ScalarField::constant(g, 1.0);
        let traj = Trajectory::new(vec![0.0, 1.0], vec![u.clone(), u]).unwrap();
        let b = DiscreteVectorField::constant(g, [1.0, 0.0]);
        let phi = TestFunction {
            spatial: SpatialBump { center: [0.5, 0.5], width: 0.2 },
            temporal: TemporalProfile::Constant,
        };
        assert!(matches!(weak_defect(&traj, &b, &phi), Err(Error::TestFunctionSupport { .. })));
    }
}
