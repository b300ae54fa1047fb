use serde::{Deserialize, Serialize};

use super::cascade::{cascade_solve_field, CascadeOptions, CascadeSchedule};
use crate::error::{invalid, Error, Result};
use crate::torus::{divergence, l1_distance, DiscreteVectorField, ScalarField};
use crate::zoo::{sample_field, VectorFieldSpec};

/// How the perturbed problems `(b_n, u⁰_n)` are built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationPlan {
    /// `b_n = C_{δ_n} b`; an unresolved `δ_n` leaves `b` unchanged.
    Mollified { deltas: Vec<f64> },
    /// `b_n = b`, `u⁰_n = u⁰`.
    Identical { count: usize },
    /// `u⁰_n = u⁰ + cos(2πx)/n`.
    DataPerturbed { ns: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    MonotoneConvergent,
    NotMonotone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub field_l1_gaps: Vec<f64>,
    pub div_l1_gaps: Vec<f64>,
    /// `max_t ‖u_n(t) - u(t)‖_{L¹}`
    pub solution_gaps: Vec<f64>,
    pub verdict: StabilityVerdict,
}

fn field_gap(a: &DiscreteVectorField, b: &DiscreteVectorField) -> Result<f64> {
    Ok(a.sub(b)?.l1_norm())
}

/// Solve the limit problem and each perturbed problem with the cascade and
/// compare them. Plans whose field or divergence gaps increase are rejected.
pub fn stability_experiment(
    spec: &VectorFieldSpec,
    u0: &ScalarField,
    horizon: f64,
    dt: f64,
    plan: &PerturbationPlan,
    schedule: &CascadeSchedule,
    opts: &CascadeOptions,
) -> Result<StabilityReport> {
    let grid = *u0.grid();
    let b = sample_field(spec, &grid)?;
    let m = &opts.mollifier;
    let problems: Vec<(DiscreteVectorField, ScalarField)> = match plan {
        PerturbationPlan::Mollified { deltas } => {
            if deltas.is_empty() {
                return Err(invalid("deltas", "plan is empty"));
            }
            deltas
                .iter()
                .map(|&d| {
                    if !(d > 0.0 && d <= 1.0) {
                        return Err(invalid("deltas", format!("must lie in (0, 1], got {d}")));
                    }
                    let bn = if m.is_resolved(&grid, d) { m.kernel(&grid, d)?.apply_vector(&b)? } else { b.clone() };
                    Ok((bn, u0.clone()))
                })
                .collect::<Result<_>>()?
        }
        PerturbationPlan::Identical { count } => {
            if *count == 0 {
                return Err(invalid("count", "plan is empty"));
            }
            vec![(b.clone(), u0.clone()); *count]
        }
        PerturbationPlan::DataPerturbed { ns } => {
            if ns.is_empty() || ns.iter().any(|&n| !(n > 0.0)) {
                return Err(invalid("ns", "need positive entries"));
            }
            let bump = ScalarField::from_fn(grid, |x| (2.0 * std::f64::consts::PI * x[0]).cos());
            ns.iter().map(|&n| Ok((b.clone(), u0.add(&bump.scale(1.0 / n))?))).collect::<Result<_>>()?
        }
    };

    let div_b = divergence(&b);
    let mut field_gaps = Vec::with_capacity(problems.len());
    let mut div_gaps = Vec::with_capacity(problems.len());
    for (bn, _) in &problems {
        field_gaps.push(field_gap(bn, &b)?);
        div_gaps.push(l1_distance(&divergence(bn), &div_b)?);
    }
    let non_increasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
    if !non_increasing(&field_gaps) || !non_increasing(&div_gaps) {
        return Err(Error::PremiseViolated { field_gaps, div_gaps });
    }

    let limit = cascade_solve_field(&b, u0, horizon, dt, schedule, opts)?.solution;
    let mut solution_gaps = Vec::with_capacity(problems.len());
    for (bn, un) in &problems {
        let sol = cascade_solve_field(bn, un, horizon, dt, schedule, opts)?.solution;
        solution_gaps.push(sol.sup_l1_distance(&limit)?);
    }
    let verdict = if solution_gaps.windows(2).all(|w| w[1] < w[0]) {
        StabilityVerdict::MonotoneConvergent
    } else {
        StabilityVerdict::NotMonotone
    };
    Ok(StabilityReport { field_l1_gaps: field_gaps, div_l1_gaps: div_gaps, solution_gaps, verdict })
}
