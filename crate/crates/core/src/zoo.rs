//! Catalog of analytic velocity fields with regularity metadata and a
//! refinement-based checker for the conditions `div b ∈ L∞`, `b ∈ W*¹,¹`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::torus::{discrete_tv, divergence, lp_norm, min_image, wrap_unit, DiscreteVectorField, PeriodicGrid, Point};

/// Clamp radius used by [`VectorFieldSpec::eval`] when no grid is involved.
pub const DEFAULT_CLAMP_RADIUS: f64 = 1e-9;

const CUTOFF_INNER: f64 = 0.125;
const CUTOFF_OUTER: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum VectorFieldSpec {
    Constant(ConstantParams),
    SmoothSwirl(SwirlParams),
    BvShear(ShearParams),
    SingularVortex(VortexParams),
    AttractingSink(SinkParams),
    PowerlawHamiltonian(PowerlawParams),
    NbodyHamiltonian(NbodyParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    /// One entry per axis; the length fixes the dimension.
    pub velocity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwirlParams {
    pub amplitude: f64,
    /// Adds `κ sin 2πx` to the first component, giving `div b = 2πκ cos 2πx`.
    pub compression: f64,
}

impl Default for SwirlParams {
    fn default() -> Self {
        Self { amplitude: 1.0, compression: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShearParams {
    pub height: f64,
}

impl Default for ShearParams {
    fn default() -> Self {
        Self { height: 1.0 }
    }
}

fn default_center() -> [f64; 2] {
    [0.5, 0.5]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexParams {
    pub gamma: f64,
    #[serde(default = "default_center")]
    pub center: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinkParams {
    pub alpha: f64,
    #[serde(default = "default_center")]
    pub center: [f64; 2],
}

fn default_charge() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerlawParams {
    pub alpha: f64,
    #[serde(default = "default_charge")]
    pub charge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbodyParams {
    pub masses: Vec<f64>,
    pub charges: Vec<f64>,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Lipschitz,
    W11,
    WStar11,
    NonConforming,
}

/// Where a field fails to be defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularSet {
    None,
    Point(Point),
    /// The line `x_axis = at` (mod 1).
    Line {
        axis: usize,
        at: f64,
    },
    /// Coincident particle positions `q_i = q_j`.
    CollisionDiagonals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub regularity: Regularity,
    pub closed_form_divergence: bool,
    pub singular_set: SingularSet,
    /// The growth condition `b/(1+|x|) ∈ L∞ + L¹`, recorded but not tested.
    pub growth_condition: String,
}

/// A velocity sample; `clamped` marks evaluation at a projected point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub velocity: [f64; 2],
    pub clamped: bool,
}

/// Smooth cutoff: 1 on `[0, 1/8]`, 0 on `[1/4, ∞)`.
pub fn cutoff(rho: f64) -> f64 {
    cutoff_with_derivative(rho).0
}

fn cutoff_with_derivative(rho: f64) -> (f64, f64) {
    if rho <= CUTOFF_INNER {
        return (1.0, 0.0);
    }
    if rho >= CUTOFF_OUTER {
        return (0.0, 0.0);
    }
    let s = (CUTOFF_OUTER - rho) / (CUTOFF_OUTER - CUTOFF_INNER);
    let f = |s: f64| (-1.0 / s).exp();
    let (a, b) = (f(s), f(1.0 - s));
    let (da, db) = (a / (s * s), b / ((1.0 - s) * (1.0 - s)));
    let chi = a / (a + b);
    let dchi_ds = (da * b + a * db) / ((a + b) * (a + b));
    (chi, -dchi_ds / (CUTOFF_OUTER - CUTOFF_INNER))
}

/// Minimum-image displacement from `center`, pushed out to distance `clamp`
/// when closer than that. Returns `(d, ρ, clamped)`.
fn displacement(x: Point, center: Point, clamp: f64) -> ([f64; 2], f64, bool) {
    let mut d = [min_image(x[0] - center[0]), min_image(x[1] - center[1])];
    let mut rho = d[0].hypot(d[1]);
    if rho >= clamp {
        return (d, rho, false);
    }
    if rho == 0.0 {
        d = [clamp, 0.0];
    } else {
        d = [d[0] * clamp / rho, d[1] * clamp / rho];
    }
    rho = clamp;
    (d, rho, true)
}

impl VectorFieldSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        let unit_interval = |name: &'static str, a: f64| {
            if a > 0.0 && a <= 1.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must lie in (0, 1], got {a}")))
            }
        };
        match self {
            Self::Constant(p) => {
                if !(1..=2).contains(&p.velocity.len()) {
                    return Err(invalid("velocity", "needs 1 or 2 components"));
                }
                p.velocity.iter().try_for_each(|&v| finite("velocity", v))
            }
            Self::SmoothSwirl(p) => {
                finite("amplitude", p.amplitude)?;
                finite("compression", p.compression)
            }
            Self::BvShear(p) => finite("height", p.height),
            Self::SingularVortex(p) => {
                if !(p.gamma > 0.0 && p.gamma < 2.0) {
                    return Err(invalid("gamma", format!("must lie in (0, 2), got {}", p.gamma)));
                }
                p.center.iter().try_for_each(|&v| finite("center", v))
            }
            Self::AttractingSink(p) => {
                unit_interval("alpha", p.alpha)?;
                p.center.iter().try_for_each(|&v| finite("center", v))
            }
            Self::PowerlawHamiltonian(p) => {
                unit_interval("alpha", p.alpha)?;
                finite("charge", p.charge)
            }
            Self::NbodyHamiltonian(p) => {
                unit_interval("alpha", p.alpha)?;
                if p.masses.is_empty() || p.masses.len() != p.charges.len() {
                    return Err(invalid("masses", "need one mass and one charge per particle"));
                }
                if p.masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
                    return Err(invalid("masses", "must be positive"));
                }
                p.charges.iter().try_for_each(|&v| finite("charges", v))
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::SmoothSwirl(_) => "smooth_swirl",
            Self::BvShear(_) => "bv_shear",
            Self::SingularVortex(_) => "singular_vortex",
            Self::AttractingSink(_) => "attracting_sink",
            Self::PowerlawHamiltonian(_) => "powerlaw_hamiltonian",
            Self::NbodyHamiltonian(_) => "nbody_hamiltonian",
        }
    }

    /// Phase-space dimension. Torus kinds have dimension 1 or 2; the n-body
    /// field lives in `R^(6N)`.
    pub fn dim(&self) -> usize {
        match self {
            Self::Constant(p) => p.velocity.len(),
            Self::NbodyHamiltonian(p) => 6 * p.masses.len(),
            _ => 2,
        }
    }

    /// Whether the field lives on the torus (and can be sampled on grids).
    pub fn is_periodic(&self) -> bool {
        !matches!(self, Self::NbodyHamiltonian(_))
    }

    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, Self::BvShear(_) | Self::PowerlawHamiltonian(_) | Self::NbodyHamiltonian(_))
    }

    pub fn metadata(&self) -> FieldMetadata {
        let regularity = match self {
            Self::Constant(_) | Self::SmoothSwirl(_) => Regularity::Lipschitz,
            Self::BvShear(_) => Regularity::WStar11,
            Self::SingularVortex(_) => Regularity::W11,
            Self::AttractingSink(_) => Regularity::NonConforming,
            // the force |q|^(-α-1) is not integrable across q = 0 in one dimension
            Self::PowerlawHamiltonian(_) => Regularity::NonConforming,
            Self::NbodyHamiltonian(p) if p.alpha < 1.0 => Regularity::W11,
            Self::NbodyHamiltonian(_) => Regularity::NonConforming,
        };
        let singular_set = match self {
            Self::SingularVortex(p) => SingularSet::Point(p.center),
            Self::AttractingSink(p) => SingularSet::Point(p.center),
            Self::PowerlawHamiltonian(_) => SingularSet::Line { axis: 0, at: 0.0 },
            Self::NbodyHamiltonian(_) => SingularSet::CollisionDiagonals,
            _ => SingularSet::None,
        };
        let growth_condition = if self.is_periodic() {
            "vacuous on the compact torus".to_string()
        } else {
            "fails: momenta grow linearly at infinity in phase space".to_string()
        };
        FieldMetadata {
            regularity,
            closed_form_divergence: self.has_closed_form_divergence(),
            singular_set,
            growth_condition,
        }
    }

    pub fn has_closed_form_divergence(&self) -> bool {
        match self {
            Self::AttractingSink(p) => p.alpha < 1.0,
            Self::NbodyHamiltonian(_) => false,
            _ => true,
        }
    }

    /// Velocity at `x` with the default clamp radius.
    pub fn eval(&self, x: Point) -> Result<Evaluation> {
        self.eval_clamped(x, DEFAULT_CLAMP_RADIUS)
    }

    /// Velocity at `x`; points closer than `clamp` to the singular set are
    /// projected radially onto distance `clamp` (direction `(1, 0)` at the
    /// singular point itself).
    pub fn eval_clamped(&self, x: Point, clamp: f64) -> Result<Evaluation> {
        let x = [wrap_unit(x[0]), wrap_unit(x[1])];
        let exact = |velocity| Ok(Evaluation { velocity, clamped: false });
        match self {
            Self::Constant(p) => exact([p.velocity[0], p.velocity.get(1).copied().unwrap_or(0.0)]),
            Self::SmoothSwirl(p) => {
                let (sx, sy) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
                exact([p.amplitude * (sy + p.compression * sx), p.amplitude * sx])
            }
            Self::BvShear(p) => exact([if x[1] < 0.5 { p.height } else { -p.height }, 0.0]),
            Self::SingularVortex(p) => {
                let (d, rho, clamped) = displacement(x, p.center, clamp);
                let g = cutoff(rho) / rho.powf(p.gamma);
                Ok(Evaluation { velocity: [-d[1] * g, d[0] * g], clamped })
            }
            Self::AttractingSink(p) => {
                let (d, rho, clamped) = displacement(x, p.center, clamp);
                let g = -cutoff(rho) / rho.powf(1.0 + p.alpha);
                Ok(Evaluation { velocity: [d[0] * g, d[1] * g], clamped })
            }
            Self::PowerlawHamiltonian(p) => {
                let mut q = min_image(x[0]);
                let clamped = q.abs() < clamp;
                if clamped {
                    q = if q < 0.0 { -clamp } else { clamp };
                }
                let s = (PI * q).sin();
                let force = p.charge * p.alpha * PI * (PI * q).cos() * s.abs().powf(-p.alpha - 1.0) * s.signum();
                Ok(Evaluation { velocity: [min_image(x[1]), force], clamped })
            }
            Self::NbodyHamiltonian(_) => {
                Err(Error::Unsupported("the n-body field lives in R^(6N); use eval_phase".into()))
            }
        }
    }

    /// Closed-form divergence at `x` (clamped like [`Self::eval_clamped`]), if known.
    pub fn divergence_at(&self, x: Point, clamp: f64) -> Option<f64> {
        if !self.has_closed_form_divergence() {
            return None;
        }
        match self {
            Self::SmoothSwirl(p) => Some(2.0 * PI * p.amplitude * p.compression * (2.0 * PI * wrap_unit(x[0])).cos()),
            Self::AttractingSink(p) => {
                let (_, rho, _) = displacement([wrap_unit(x[0]), wrap_unit(x[1])], p.center, clamp);
                let (chi, dchi) = cutoff_with_derivative(rho);
                Some(-dchi * rho.powf(-p.alpha) + (p.alpha - 1.0) * chi * rho.powf(-1.0 - p.alpha))
            }
            _ => Some(0.0),
        }
    }

    /// Velocity at an arbitrary phase-space point of dimension [`Self::dim`].
    /// Torus kinds wrap their arguments; the n-body field uses the layout
    /// `(q_1, .., q_N, p_1, .., p_N)` with `q_i, p_i ∈ R³`.
    pub fn eval_phase(&self, z: &[f64], clamp: f64) -> Result<(Vec<f64>, bool)> {
        if z.len() != self.dim() {
            return Err(invalid("x0", format!("expected {} coordinates, got {}", self.dim(), z.len())));
        }
        match self {
            Self::NbodyHamiltonian(p) => {
                let n = p.masses.len();
                let (q, mom) = z.split_at(3 * n);
                let mut out = vec![0.0; 6 * n];
                let mut clamped = false;
                for i in 0..n {
                    for a in 0..3 {
                        out[3 * i + a] = mom[3 * i + a] / p.masses[i];
                    }
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let mut d = [q[3 * i] - q[3 * j], q[3 * i + 1] - q[3 * j + 1], q[3 * i + 2] - q[3 * j + 2]];
                        let mut r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                        if r < clamp {
                            clamped = true;
                            d = if r == 0.0 { [clamp, 0.0, 0.0] } else { d.map(|v| v * clamp / r) };
                            r = clamp;
                        }
                        let c = p.alpha * p.charges[i] * p.charges[j] / r.powf(p.alpha + 2.0);
                        for a in 0..3 {
                            out[3 * n + 3 * i + a] += c * d[a];
                        }
                    }
                }
                Ok((out, clamped))
            }
            _ => {
                let x = [z[0], z.get(1).copied().unwrap_or(0.0)];
                let e = self.eval_clamped(x, clamp)?;
                Ok((e.velocity[..self.dim()].to_vec(), e.clamped))
            }
        }
    }

    /// Hamiltonian of the n-body field at `z`.
    pub fn energy(&self, z: &[f64]) -> Result<f64> {
        let Self::NbodyHamiltonian(p) = self else {
            return Err(Error::Unsupported(format!("{} has no tracked energy", self.kind_name())));
        };
        let n = p.masses.len();
        if z.len() != 6 * n {
            return Err(invalid("z", "wrong phase-space dimension"));
        }
        let (q, mom) = z.split_at(3 * n);
        let mut h = 0.0;
        for i in 0..n {
            h += (0..3).map(|a| mom[3 * i + a].powi(2)).sum::<f64>() / (2.0 * p.masses[i]);
            for j in i + 1..n {
                let r = (0..3).map(|a| (q[3 * i + a] - q[3 * j + a]).powi(2)).sum::<f64>().sqrt();
                h += p.charges[i] * p.charges[j] / r.powf(p.alpha);
            }
        }
        Ok(h)
    }

    fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        self.validate()?;
        if !self.is_periodic() {
            return Err(Error::Unsupported(format!("{} cannot be sampled on a torus grid", self.kind_name())));
        }
        if grid.dim() != self.dim() {
            return Err(Error::GridMismatch(format!(
                "{} is {}-dimensional but the grid is {}-dimensional",
                self.kind_name(),
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }
}

/// Node-wise samples with the clamp rule at radius `h/2`, plus the number of
/// clamped nodes.
pub fn sample_field_flagged(spec: &VectorFieldSpec, grid: &PeriodicGrid) -> Result<(DiscreteVectorField, usize)> {
    spec.check_grid(grid)?;
    let clamp = grid.spacing() / 2.0;
    let mut clamped = 0;
    let mut samples = Vec::with_capacity(grid.node_count());
    for p in grid.coords() {
        let e = spec.eval_clamped(p, clamp)?;
        clamped += e.clamped as usize;
        samples.push(e.velocity);
    }
    Ok((DiscreteVectorField::from_samples(*grid, samples), clamped))
}

pub fn sample_field(spec: &VectorFieldSpec, grid: &PeriodicGrid) -> Result<DiscreteVectorField> {
    sample_field_flagged(spec, grid).map(|(f, _)| f)
}

/// Closed-form divergence sampled on the nodes, when the spec provides one.
pub fn sample_divergence(spec: &VectorFieldSpec, grid: &PeriodicGrid) -> Result<Option<crate::torus::ScalarField>> {
    spec.check_grid(grid)?;
    if !spec.has_closed_form_divergence() {
        return Ok(None);
    }
    let clamp = grid.spacing() / 2.0;
    Ok(Some(crate::torus::ScalarField::from_fn(*grid, |p| spec.divergence_at(p, clamp).unwrap())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Conforming,
    NonConforming,
    ResolutionLimited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub div_sup_estimate: f64,
    pub w11_star_estimate: f64,
    pub refined_div_sup_estimate: f64,
    pub refined_w11_star_estimate: f64,
    pub div_growth: f64,
    pub w11_growth: f64,
    pub verdict: Verdict,
    pub declared: Regularity,
    pub notes: String,
}

/// Largest grid the refinement study will build.
pub fn max_points_per_axis(dim: usize) -> usize {
    if dim == 1 {
        1 << 16
    } else {
        2048
    }
}

/// Growth factor under refinement at or above which an estimate counts as unbounded.
pub const GROWTH_LIMIT: f64 = 1.5;

fn estimates(spec: &VectorFieldSpec, grid: &PeriodicGrid) -> Result<(f64, f64)> {
    let b = sample_field(spec, grid)?;
    let div_sup = match sample_divergence(spec, grid)? {
        Some(d) => lp_norm(&d, f64::INFINITY)?,
        None => lp_norm(&divergence(&b), f64::INFINITY)?,
    };
    let w11 = b.components().iter().map(discrete_tv).sum();
    Ok((div_sup, w11))
}

fn growth(coarse: f64, fine: f64) -> f64 {
    if coarse < 1e-12 && fine < 1e-12 {
        1.0
    } else if coarse < 1e-12 {
        f64::INFINITY
    } else {
        fine / coarse
    }
}

/// Estimate `‖div b‖∞` and the W*¹,¹ surrogate at `grid` and one dyadic
/// refinement; an estimate that grows by [`GROWTH_LIMIT`] or more is taken
/// as unbounded.
pub fn check_conditions(spec: &VectorFieldSpec, grid: &PeriodicGrid) -> Result<ConditionReport> {
    spec.check_grid(grid)?;
    let fine_grid = grid.refined();
    let (div_sup, w11) = estimates(spec, grid)?;
    let declared = spec.metadata().regularity;
    let singular = !matches!(spec.metadata().singular_set, SingularSet::None);
    let too_fine = fine_grid.points_per_axis() > max_points_per_axis(grid.dim());
    let too_coarse = singular && grid.points_per_axis() < 32;
    if too_fine || too_coarse {
        return Ok(ConditionReport {
            div_sup_estimate: div_sup,
            w11_star_estimate: w11,
            refined_div_sup_estimate: f64::NAN,
            refined_w11_star_estimate: f64::NAN,
            div_growth: f64::NAN,
            w11_growth: f64::NAN,
            verdict: Verdict::ResolutionLimited,
            declared,
            notes: if too_fine {
                format!("refinement beyond {} points per axis is not attempted", max_points_per_axis(grid.dim()))
            } else {
                "singular fields need at least 32 points per axis".into()
            },
        });
    }
    let (fine_div, fine_w11) = estimates(spec, &fine_grid)?;
    let (dg, wg) = (growth(div_sup, fine_div), growth(w11, fine_w11));
    let verdict = if dg < GROWTH_LIMIT && wg < GROWTH_LIMIT { Verdict::Conforming } else { Verdict::NonConforming };
    let mut notes = Vec::new();
    if dg >= GROWTH_LIMIT {
        notes.push(format!("divergence sup grows by {dg:.3} per refinement"));
    }
    if wg >= GROWTH_LIMIT {
        notes.push(format!("total variation grows by {wg:.3} per refinement"));
    }
    if !spec.has_closed_form_divergence() {
        notes.push("divergence estimated spectrally".into());
    }
    Ok(ConditionReport {
        div_sup_estimate: div_sup,
        w11_star_estimate: w11,
        refined_div_sup_estimate: fine_div,
        refined_w11_star_estimate: fine_w11,
        div_growth: dg,
        w11_growth: wg,
        verdict,
        declared,
        notes: notes.join("; "),
    })
}
