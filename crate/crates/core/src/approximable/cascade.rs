//! Approximable solutions by double mollification.
//!
//! Stage `k` mollifies the field and the data at scale `δ_k`, solves the
//! transport equation, and mollifies the result at scale `ε_k`:
//! `u_{δ,ε}(t) = C_ε u_δ(t)`. The stage solves
//! `∂u/∂t = B_δ u + r` with `r = -[B_δ, C_ε] u_δ`, whose L¹ norm is recorded
//! per snapshot. Consecutive stages are compared in `H⁻ˢ`.
//!
//! A `δ` whose kernel the grid cannot resolve is replaced by the identity,
//! which is the grid-level `δ → 0` limit; such stages report
//! `effective_delta = None`.
//!
//! The reported limit candidate is the last `u_δ`: `ε` cannot drop below the
//! resolution floor, and `C_ε → I` as `ε → 0`.

use serde::{Deserialize, Serialize};

use super::commutator::Commutator;
use crate::error::{invalid, Error, Result};
use crate::solver::{solve_classical_transport, SolveOptions, Trajectory};
use crate::torus::{lp_norm, negative_sobolev_norm, DiscreteVectorField, Mollifier, ScalarField};
use crate::zoo::{sample_field, Regularity, VectorFieldSpec};

pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-3;

/// `ceil(n/2 + 2)`.
pub fn default_sobolev_index(dim: usize) -> f64 {
    (dim as f64 / 2.0 + 2.0).ceil()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSchedule {
    pub eps: Vec<f64>,
    /// Defaults to the diagonal `δ = ε²`.
    #[serde(default)]
    pub delta: Option<Vec<f64>>,
}

impl CascadeSchedule {
    pub fn diagonal(eps: Vec<f64>) -> Self {
        Self { eps, delta: None }
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.delta.clone().unwrap_or_else(|| self.eps.iter().map(|e| e * e).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: &[f64]| -> Result<()> {
            if v.is_empty() {
                return Err(invalid(name, "schedule is empty"));
            }
            if v.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return Err(invalid(name, "entries must lie in (0, 1]"));
            }
            if v.windows(2).any(|w| w[1] >= w[0]) {
                return Err(invalid(name, "schedule must be strictly decreasing"));
            }
            Ok(())
        };
        check("eps_schedule", &self.eps)?;
        let d = self.deltas();
        check("delta_schedule", &d)?;
        if d.len() != self.eps.len() {
            return Err(invalid("delta_schedule", "needs one δ per ε"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CascadeOptions {
    pub mollifier: Mollifier,
    /// Defaults to [`default_sobolev_index`].
    pub sobolev_index: Option<f64>,
    pub gap_threshold: f64,
    pub solve: SolveOptions,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        Self {
            mollifier: Mollifier::default(),
            sobolev_index: None,
            gap_threshold: DEFAULT_GAP_THRESHOLD,
            solve: SolveOptions::cubic(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CascadeResult {
    /// Limit candidate: the final-stage `u_δ`.
    pub solution: Trajectory,
    /// Final-stage mollified trajectory `C_ε u_δ`.
    pub stage: Trajectory,
    /// Final-stage field `b_δ`.
    pub field: DiscreteVectorField,
    pub summary: CascadeSummary,
}

/// The serializable diagnostics of a cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeSummary {
    pub eps_schedule: Vec<f64>,
    pub delta_schedule: Vec<f64>,
    pub effective_delta: Vec<Option<f64>>,
    pub times: Vec<f64>,
    /// `remainder_tv[k][i]`: `‖r‖_{L¹}` at stage `k`, snapshot `i`.
    pub remainder_tv: Vec<Vec<f64>>,
    /// `hs_gaps[k]`: `max_t ‖u_{k+1}(t) - u_k(t)‖_{H⁻ˢ}`.
    pub hs_gaps: Vec<f64>,
    /// Per stage, `max_i ‖u(t_{i+1}) - u(t_i)‖_{H⁻ˢ} / (t_{i+1} - t_i)`.
    pub hs_lipschitz: Vec<f64>,
    pub s: f64,
    pub gap_threshold: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

fn hs_lipschitz(traj: &Trajectory, s: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..traj.len() {
        let d = traj.snapshots()[k].sub(&traj.snapshots()[k - 1])?;
        worst = worst.max(negative_sobolev_norm(&d, s)? / (traj.times()[k] - traj.times()[k - 1]));
    }
    Ok(worst)
}

/// Cascade for a field given by its spec, sampled on the grid of `u0`.
pub fn cascade_solve(
    spec: &VectorFieldSpec,
    u0: &ScalarField,
    horizon: f64,
    dt: f64,
    schedule: &CascadeSchedule,
    opts: &CascadeOptions,
) -> Result<CascadeResult> {
    let b = sample_field(spec, u0.grid())?;
    let mut result = cascade_solve_field(&b, u0, horizon, dt, schedule, opts)?;
    if spec.metadata().regularity == Regularity::NonConforming {
        result
            .summary
            .warnings
            .insert(0, format!("{} does not satisfy the extended conditions; diagnostics only", spec.kind_name()));
    }
    Ok(result)
}

/// Cascade for a sampled field.
pub fn cascade_solve_field(
    b: &DiscreteVectorField,
    u0: &ScalarField,
    horizon: f64,
    dt: f64,
    schedule: &CascadeSchedule,
    opts: &CascadeOptions,
) -> Result<CascadeResult> {
    schedule.validate()?;
    u0.check_same_grid(b.component(0))?;
    let grid = *u0.grid();
    let s = opts.sobolev_index.unwrap_or_else(|| default_sobolev_index(grid.dim()));
    if s <= grid.dim() as f64 / 2.0 + 1.0 {
        return Err(invalid("sobolev_index", format!("need s > n/2 + 1 = {}, got {s}", grid.dim() as f64 / 2.0 + 1.0)));
    }
    let m = &opts.mollifier;
    for &eps in &schedule.eps {
        if !m.is_resolved(&grid, eps) {
            return Err(Error::UnderResolved { eps, min_eps: m.min_eps(&grid) });
        }
    }
    let deltas = schedule.deltas();

    let mut summary = CascadeSummary {
        eps_schedule: schedule.eps.clone(),
        delta_schedule: deltas.clone(),
        effective_delta: Vec::new(),
        times: Vec::new(),
        remainder_tv: Vec::new(),
        hs_gaps: Vec::new(),
        hs_lipschitz: Vec::new(),
        s,
        gap_threshold: opts.gap_threshold,
        converged: false,
        warnings: Vec::new(),
    };
    let mut cached: Option<(Option<f64>, DiscreteVectorField, Trajectory)> = None;
    let mut previous: Option<Trajectory> = None;

    for (&eps, &delta) in schedule.eps.iter().zip(&deltas) {
        let effective = m.is_resolved(&grid, delta).then_some(delta);
        let reuse = matches!(&cached, Some((key, _, _)) if *key == effective);
        if !reuse {
            let (b_delta, u0_delta) = match effective {
                Some(d) => {
                    let k = m.kernel(&grid, d)?;
                    (k.apply_vector(b)?, k.apply(u0)?)
                }
                None => (b.clone(), u0.clone()),
            };
            let traj = solve_classical_transport(&b_delta, &u0_delta, horizon, dt, &opts.solve)?;
            cached = Some((effective, b_delta, traj));
        }
        let (_, b_delta, u_delta) = cached.as_ref().unwrap();
        let comm = Commutator::new(b_delta, eps, m)?;
        let stage = u_delta.try_map(|u| comm.kernel().apply(u))?;
        let tv = u_delta.snapshots().iter().map(|u| lp_norm(&comm.apply(u)?, 1.0)).collect::<Result<Vec<_>>>()?;
        summary.remainder_tv.push(tv);
        summary.effective_delta.push(effective);
        summary.hs_lipschitz.push(hs_lipschitz(&stage, s)?);
        if let Some(prev) = &previous {
            summary.hs_gaps.push(stage.sup_distance(prev, |d| negative_sobolev_norm(d, s))?);
        }
        previous = Some(stage);
    }

    let (_, field, solution) = cached.unwrap();
    let stage = previous.unwrap();
    summary.times = solution.times().to_vec();
    let gaps = &summary.hs_gaps;
    summary.converged =
        !gaps.is_empty() && gaps.windows(2).all(|w| w[1] <= w[0]) && *gaps.last().unwrap() < opts.gap_threshold;
    if !summary.converged {
        summary.warnings.push(if gaps.is_empty() {
            "a single stage cannot establish convergence".to_string()
        } else {
            format!("schedule exhausted before the H^-s gaps fell below {}", opts.gap_threshold)
        });
    }
    Ok(CascadeResult { solution, stage, field, summary })
}
