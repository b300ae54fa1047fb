//! Experiment configuration: one JSON document, every key optional, unknown
//! keys rejected.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use roughflow::approximable::{smooth_noise, CascadeOptions, CascadeSchedule, PerturbationPlan};
use roughflow::osgood::{default_delta_list, ModulusSpec};
use roughflow::zoo::{ShearParams, SwirlParams};
use roughflow::{Complex64, Interpolation, Mollifier, PeriodicGrid, ScalarField, SolveOptions, VectorFieldSpec};
use serde::{Deserialize, Serialize};

/// Initial data on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `cos 2π(k·x)`
    Cosine { mode: [i32; 2] },
    /// `sin 2π(k·x)`
    Sine { mode: [i32; 2] },
    /// `exp(2πi x_axis)`
    Exponential { axis: usize },
    /// `exp(-|x - c|² / w²)` with minimum-image distance.
    Gaussian { center: [f64; 2], width: f64 },
    /// `1` on `x < 1/2`, `0` elsewhere.
    Step,
    /// Normalized smooth random density, from the run seed.
    Noise { max_mode: i64 },
}

impl Default for InitialData {
    fn default() -> Self {
        Self::Cosine { mode: [1, 0] }
    }
}

impl InitialData {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Self::Exponential { axis } => ensure!(*axis < dim, "initial.axis must be below the dimension {dim}"),
            Self::Gaussian { width, .. } => ensure!(*width > 0.0, "initial.width must be positive"),
            Self::Noise { max_mode } => ensure!((0..=16).contains(max_mode), "initial.max_mode must lie in 0..=16"),
            _ => {}
        }
        Ok(())
    }

    pub fn sample(&self, grid: &PeriodicGrid, seed: u64) -> ScalarField {
        let phase = |k: [i32; 2], x: [f64; 2]| 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
        match self {
            Self::Cosine { mode } => ScalarField::from_fn(*grid, |x| phase(*mode, x).cos()),
            Self::Sine { mode } => ScalarField::from_fn(*grid, |x| phase(*mode, x).sin()),
            Self::Exponential { axis } => {
                ScalarField::from_fn_complex(*grid, |x| Complex64::from_polar(1.0, 2.0 * PI * x[*axis]))
            }
            Self::Gaussian { center, width } => ScalarField::from_fn(*grid, |x| {
                let d: f64 = (0..grid.dim()).map(|a| roughflow::torus::min_image(x[a] - center[a]).powi(2)).sum();
                (-d / (width * width)).exp()
            }),
            Self::Step => ScalarField::from_fn(*grid, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }),
            Self::Noise { max_mode } => smooth_noise(grid, seed, *max_mode),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Classical,
    Viscous,
    Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    pub mode: SolveMode,
    /// `ε` in `ε²Δ`, viscous mode only.
    pub viscosity: f64,
    pub heat_every: usize,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self { mode: SolveMode::Classical, viscosity: 0.05, heat_every: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CharacteristicsSection {
    pub starts: Vec<Vec<f64>>,
    pub dt: f64,
    pub reverse: bool,
}

impl Default for CharacteristicsSection {
    fn default() -> Self {
        Self { starts: vec![vec![0.3, 0.4], vec![0.6, 0.1]], dt: 1e-3, reverse: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenormalizeSection {
    /// Clamp interval of the clamped-identity `β`.
    pub clamp: [f64; 2],
}

impl Default for RenormalizeSection {
    fn default() -> Self {
        Self { clamp: [-0.5, 0.5] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniquenessSection {
    pub etas: Vec<f64>,
    pub max_mode: i64,
    pub delta: Option<f64>,
}

impl Default for UniquenessSection {
    fn default() -> Self {
        Self { etas: vec![1e-3, 2e-3, 4e-3], max_mode: 3, delta: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMethod {
    Classical,
    Cascade,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    pub method: FlowMethod,
    pub histogram_bins: usize,
}

impl Default for FlowSection {
    fn default() -> Self {
        Self { method: FlowMethod::Classical, histogram_bins: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReverseSection {
    /// Smooth field whose `ε = 0` return error is the floor.
    pub control: VectorFieldSpec,
    /// Sweep shared by probe and control; `ε = 0` is always added to both.
    pub viscosities: Vec<f64>,
    pub heat_every: usize,
    /// Probe errors must exceed this multiple of the floor.
    pub factor: f64,
}

impl Default for ReverseSection {
    fn default() -> Self {
        Self {
            control: VectorFieldSpec::SmoothSwirl(SwirlParams::default()),
            viscosities: vec![0.1, 0.05, 0.025],
            heat_every: 1,
            factor: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OsgoodSection {
    pub modulus: ModulusSpec,
    pub deltas: Vec<f64>,
}

impl Default for OsgoodSection {
    fn default() -> Self {
        Self { modulus: ModulusSpec::LogLipschitz, deltas: default_delta_list() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeierstrassSection {
    pub terms: u32,
    /// `h = 2^-j` for `j` in `coarsest..=finest`.
    pub coarsest: i32,
    pub finest: i32,
}

impl Default for WeierstrassSection {
    fn default() -> Self {
        Self { terms: 20, coarsest: 6, finest: 18 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LacunarySection {
    pub terms: Vec<u32>,
    pub dilation_max_m: u32,
    /// `(K, m)` pairs for the dilation identity.
    pub identity_checks: Vec<[u32; 2]>,
}

impl Default for LacunarySection {
    fn default() -> Self {
        Self { terms: vec![1, 2, 4, 8, 16, 20], dilation_max_m: 2, identity_checks: vec![[8, 1], [4, 3], [8, 0]] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub field: VectorFieldSpec,
    pub dim: usize,
    /// Points per axis.
    pub grid: usize,
    pub horizon: f64,
    /// Defaults to `h / 4 / max(1, ‖b‖∞)`.
    pub dt: Option<f64>,
    pub initial: InitialData,
    /// Defaults per command: linear for `solve`, cubic elsewhere.
    pub interp: Option<Interpolation>,
    pub max_snapshots: usize,
    pub mollifier_radius: f64,
    /// `ε` schedule; empty means `[8, 4, 2, 1]` times the finest resolved `ε`.
    pub eps: Vec<f64>,
    /// `δ` schedule; defaults to `δ = ε²`.
    pub delta: Option<Vec<f64>>,
    pub sobolev_index: Option<f64>,
    pub gap_threshold: f64,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub solve: SolveSection,
    pub characteristics: CharacteristicsSection,
    pub renormalize: RenormalizeSection,
    pub uniqueness: UniquenessSection,
    pub stability: PerturbationPlan,
    pub flow: FlowSection,
    pub reverse: ReverseSection,
    pub osgood: OsgoodSection,
    pub weierstrass: WeierstrassSection,
    pub lacunary: LacunarySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            field: VectorFieldSpec::BvShear(ShearParams::default()),
            dim: 2,
            grid: 64,
            horizon: 0.5,
            dt: None,
            initial: InitialData::default(),
            interp: None,
            max_snapshots: roughflow::solver::DEFAULT_MAX_SNAPSHOTS,
            mollifier_radius: roughflow::torus::mollifier::DEFAULT_RADIUS,
            eps: Vec::new(),
            delta: None,
            sobolev_index: None,
            gap_threshold: roughflow::approximable::DEFAULT_GAP_THRESHOLD,
            seed: 0,
            out_dir: None,
            solve: SolveSection::default(),
            characteristics: CharacteristicsSection::default(),
            renormalize: RenormalizeSection::default(),
            uniqueness: UniquenessSection::default(),
            stability: PerturbationPlan::Mollified { deltas: (2..=6).map(|n| 0.5f64.powi(n)).collect() },
            flow: FlowSection::default(),
            reverse: ReverseSection::default(),
            osgood: OsgoodSection::default(),
            weierstrass: WeierstrassSection::default(),
            lacunary: LacunarySection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid configuration")
    }

    pub fn periodic_grid(&self) -> Result<PeriodicGrid> {
        Ok(PeriodicGrid::new(self.dim, self.grid)?)
    }

    pub fn mollifier(&self) -> Result<Mollifier> {
        Ok(Mollifier::new(self.mollifier_radius)?)
    }

    pub fn solve_options(&self, default: Interpolation) -> SolveOptions {
        SolveOptions { interp: self.interp.unwrap_or(default), max_snapshots: self.max_snapshots }
    }

    /// The configured schedule, or the default one for this grid.
    pub fn schedule(&self) -> Result<CascadeSchedule> {
        if !self.eps.is_empty() {
            return Ok(CascadeSchedule { eps: self.eps.clone(), delta: self.delta.clone() });
        }
        ensure!(self.delta.is_none(), "`delta` needs an explicit `eps` schedule");
        let finest = self.mollifier()?.min_eps(&self.periodic_grid()?);
        let eps: Vec<f64> = [8.0, 4.0, 2.0, 1.0].iter().map(|k| k * finest).filter(|&e| e <= 1.0).collect();
        ensure!(!eps.is_empty(), "grid too coarse for any resolved mollification scale");
        Ok(CascadeSchedule::diagonal(eps))
    }

    pub fn cascade_options(&self) -> Result<CascadeOptions> {
        Ok(CascadeOptions {
            mollifier: self.mollifier()?,
            sobolev_index: self.sobolev_index,
            gap_threshold: self.gap_threshold,
            solve: self.solve_options(Interpolation::Cubic),
        })
    }

    /// Checks that do not need a solve; run before anything is written.
    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.periodic_grid()?;
        self.mollifier()?;
        self.initial.validate(self.dim)?;
        ensure!(self.horizon.is_finite() && self.horizon >= 0.0, "horizon must be finite and non-negative");
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                bail!("dt must be positive and finite, got {dt}");
            }
        }
        ensure!(self.max_snapshots >= 2, "max_snapshots must be at least 2");
        ensure!(self.gap_threshold > 0.0, "gap_threshold must be positive");
        ensure!(self.solve.viscosity >= 0.0, "solve.viscosity must be non-negative");
        ensure!(self.solve.heat_every >= 1 && self.reverse.heat_every >= 1, "heat_every must be at least 1");
        ensure!(self.characteristics.dt > 0.0, "characteristics.dt must be positive");
        ensure!(self.flow.histogram_bins >= 1, "flow.histogram_bins must be at least 1");
        ensure!(self.reverse.factor > 0.0, "reverse.factor must be positive");
        ensure!(self.reverse.viscosities.iter().all(|&e| e > 0.0), "reverse.viscosities must be positive");
        ensure!(self.renormalize.clamp[0] < self.renormalize.clamp[1], "renormalize.clamp must be an increasing pair");
        self.reverse.control.validate()?;
        self.osgood.modulus.validate()?;
        Ok(())
    }
}
