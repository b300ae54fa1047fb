//! The Cauchy operator `T_t`, its multiplicativity defect, flow-map recovery
//! from transported exponentials, and the viscous reversibility probe.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approximable::{cascade_solve_field, CascadeOptions, CascadeSchedule};
use crate::error::{invalid, Result};
use crate::solver::{default_dt, solve_classical_transport, solve_viscous, SolveOptions, ViscousOptions};
use crate::torus::{l1_distance, wrap_unit, DiscreteVectorField, PeriodicGrid, ScalarField};
use crate::zoo::{sample_field, VectorFieldSpec};

/// Nodes where a transported exponential has modulus below this carry no
/// usable phase.
pub const MODULUS_FLOOR: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolveMethod {
    Classical {
        #[serde(default = "SolveOptions::cubic")]
        solve: SolveOptions,
    },
    Cascade {
        schedule: CascadeSchedule,
        #[serde(default)]
        options: CascadeOptions,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Defaults to [`default_dt`] for the sampled field.
    #[serde(default)]
    pub dt: Option<f64>,
    pub method: SolveMethod,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { dt: None, method: SolveMethod::Classical { solve: SolveOptions::cubic() } }
    }
}

impl FlowConfig {
    pub fn classical(solve: SolveOptions) -> Self {
        Self { dt: None, method: SolveMethod::Classical { solve } }
    }

    pub fn cascade(schedule: CascadeSchedule, options: CascadeOptions) -> Self {
        Self { dt: None, method: SolveMethod::Cascade { schedule, options } }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

/// `T_t` for a sampled field.
pub fn cauchy_operator_field(
    b: &DiscreteVectorField,
    f: &ScalarField,
    t: f64,
    config: &FlowConfig,
) -> Result<ScalarField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be finite and non-negative, got {t}")));
    }
    f.check_same_grid(b.component(0))?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let dt = config.dt.unwrap_or_else(|| default_dt(b));
    let traj = match &config.method {
        SolveMethod::Classical { solve } => solve_classical_transport(b, f, t, dt, &solve.with_snapshots(2))?,
        SolveMethod::Cascade { schedule, options } => {
            let mut options = *options;
            options.solve = options.solve.with_snapshots(2);
            cascade_solve_field(b, f, t, dt, schedule, &options)?.solution
        }
    };
    Ok(traj.last().clone())
}

/// `T_t f`: the time-`t` snapshot of the configured solve started from `f`.
pub fn cauchy_operator(spec: &VectorFieldSpec, f: &ScalarField, t: f64, config: &FlowConfig) -> Result<ScalarField> {
    cauchy_operator_field(&sample_field(spec, f.grid())?, f, t, config)
}

/// `‖T_t(fg) - T_t f · T_t g‖_{L¹}`.
pub fn multiplicativity_defect(
    spec: &VectorFieldSpec,
    f: &ScalarField,
    g: &ScalarField,
    t: f64,
    config: &FlowConfig,
) -> Result<f64> {
    let b = sample_field(spec, f.grid())?;
    let tfg = cauchy_operator_field(&b, &f.mul(g)?, t, config)?;
    let tf = cauchy_operator_field(&b, f, t, config)?;
    let tg = if f == g { tf.clone() } else { cauchy_operator_field(&b, g, t, config)? };
    l1_distance(&tfg, &tf.mul(&tg)?)
}

/// `Φ` recovered node-wise from `T_t exp(2πi x_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFlowMap {
    pub grid: PeriodicGrid,
    /// `images[idx][j]` in `[0, 1)`; unused axes are zero.
    pub images: Vec<[f64; 2]>,
    /// `max_j | |T_t e_j| - 1 |` per node.
    pub modulus_defect: Vec<f64>,
    /// Some `|T_t e_j|` fell below [`MODULUS_FLOOR`].
    pub flagged: Vec<bool>,
}

impl DiscreteFlowMap {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    pub fn max_modulus_defect(&self) -> f64 {
        self.modulus_defect.iter().zip(&self.flagged).filter(|(_, &f)| !f).map(|(d, _)| *d).fold(0.0, f64::max)
    }

    /// Grid-weighted L¹ norm of the modulus defect over all nodes.
    pub fn modulus_defect_l1(&self) -> f64 {
        self.modulus_defect.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Total-variation distance between the push-forward of the uniform
    /// node measure and the uniform measure, on `bins` cells per axis.
    /// Flagged nodes are excluded.
    pub fn histogram_discrepancy(&self, bins: usize) -> Result<f64> {
        if bins == 0 {
            return Err(invalid("bins", "need at least one bin"));
        }
        let dim = self.grid.dim();
        let cells = bins.pow(dim as u32);
        let mut counts = vec![0usize; cells];
        let mut total = 0usize;
        for (p, _) in self.images.iter().zip(&self.flagged).filter(|(_, &f)| !f) {
            let b0 = ((p[0] * bins as f64) as usize).min(bins - 1);
            let b1 = if dim == 2 { ((p[1] * bins as f64) as usize).min(bins - 1) } else { 0 };
            counts[b0 * if dim == 2 { bins } else { 1 } + b1] += 1;
            total += 1;
        }
        if total == 0 {
            return Ok(1.0);
        }
        let uniform = 1.0 / cells as f64;
        Ok(0.5 * counts.iter().map(|&c| (c as f64 / total as f64 - uniform).abs()).sum::<f64>())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "phi_x", "phi_y", "modulus_defect", "flagged"])?;
        for idx in 0..self.images.len() {
            let x = self.grid.coord(idx);
            out.write_record(&[
                x[0].to_string(),
                x[1].to_string(),
                self.images[idx][0].to_string(),
                self.images[idx][1].to_string(),
                self.modulus_defect[idx].to_string(),
                self.flagged[idx].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn coordinate_exponential(grid: &PeriodicGrid, axis: usize) -> ScalarField {
    ScalarField::from_fn_complex(*grid, |x| Complex64::from_polar(1.0, 2.0 * PI * x[axis]))
}

pub fn extract_flow_map_field(b: &DiscreteVectorField, t: f64, config: &FlowConfig) -> Result<DiscreteFlowMap> {
    let grid = *b.grid();
    let nodes = grid.node_count();
    let mut images = vec![[0.0; 2]; nodes];
    let mut modulus_defect = vec![0.0f64; nodes];
    let mut flagged = vec![false; nodes];
    for axis in 0..grid.dim() {
        let w = cauchy_operator_field(b, &coordinate_exponential(&grid, axis), t, config)?;
        for (idx, z) in w.values().iter().enumerate() {
            let r = z.norm();
            modulus_defect[idx] = modulus_defect[idx].max((r - 1.0).abs());
            flagged[idx] |= r < MODULUS_FLOOR;
            images[idx][axis] = wrap_unit(z.arg() / (2.0 * PI));
        }
    }
    Ok(DiscreteFlowMap { grid, images, modulus_defect, flagged })
}

/// Transport the coordinate exponentials by `T_t` and read off their phases.
pub fn extract_flow_map(
    spec: &VectorFieldSpec,
    t: f64,
    grid: &PeriodicGrid,
    config: &FlowConfig,
) -> Result<DiscreteFlowMap> {
    extract_flow_map_field(&sample_field(spec, grid)?, t, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnRow {
    pub eps: f64,
    pub return_error: f64,
}

/// Solve forward under `b` for time `T`, then forward under `-b` for time `T`,
/// both with viscosity `ε²Δ`; report `‖final - u⁰‖_{L¹}` per `ε`.
pub fn reversibility_probe(
    spec: &VectorFieldSpec,
    u0: &ScalarField,
    horizon: f64,
    eps_list: &[f64],
    dt: Option<f64>,
    solve: &SolveOptions,
    visc: &ViscousOptions,
) -> Result<Vec<ReturnRow>> {
    let b = sample_field(spec, u0.grid())?;
    let back = b.negated();
    let dt = dt.unwrap_or_else(|| default_dt(&b));
    let solve = solve.with_snapshots(2);
    eps_list
        .iter()
        .map(|&eps| {
            let there = solve_viscous(&b, u0, eps, horizon, dt, &solve, visc)?;
            let again = solve_viscous(&back, there.last(), eps, horizon, dt, &solve, visc)?;
            Ok(ReturnRow { eps, return_error: l1_distance(again.last(), u0)? })
        })
        .collect()
}

/// Comparison of a probe sweep against a smooth control sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreversibilityEvidence {
    /// Return error of the control at `ε = 0`.
    pub floor: f64,
    /// `min_ε probe / floor`.
    pub min_ratio: f64,
    /// Log-log slope of `control - floor` over its two smallest positive `ε`.
    pub control_slope: f64,
    /// Control errors decrease as `ε` decreases.
    pub control_monotone: bool,
    pub irreversible: bool,
}

/// The probe is flagged when every probe error exceeds `factor` times the
/// control floor while the control excess over its floor vanishes with `ε`.
pub fn irreversibility_evidence(
    control: &[ReturnRow],
    probe: &[ReturnRow],
    factor: f64,
) -> Result<IrreversibilityEvidence> {
    let floor =
        control.iter().find(|r| r.eps == 0.0).ok_or_else(|| invalid("control", "needs an eps = 0 row"))?.return_error;
    let mut positive: Vec<ReturnRow> = control.iter().copied().filter(|r| r.eps > 0.0).collect();
    if positive.len() < 2 || probe.is_empty() {
        return Err(invalid("control", "needs two positive eps rows and a non-empty probe"));
    }
    positive.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let control_monotone = positive.windows(2).all(|w| w[1].return_error < w[0].return_error)
        && positive.last().map_or(false, |r| r.return_error > floor);
    let [a, b] = [positive[positive.len() - 2], positive[positive.len() - 1]];
    let control_slope = ((a.return_error - floor) / (b.return_error - floor)).ln() / (a.eps / b.eps).ln();
    let min_ratio = probe.iter().map(|r| r.return_error).fold(f64::INFINITY, f64::min) / floor;
    let irreversible = control_monotone && control_slope >= 1.0 && min_ratio > factor;
    Ok(IrreversibilityEvidence { floor, min_ratio, control_slope, control_monotone, irreversible })
}
