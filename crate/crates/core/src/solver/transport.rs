//! Semi-Lagrangian solvers for `∂u/∂t = b·∇u` and its relatives.
//!
//! One step is `u(x, t + dt) = u(X_dt(x), t)` with `X_dt` the forward RK4
//! trace through the bilinearly interpolated, time-frozen field. Because `b`
//! is autonomous the departure points are the same at every step, so the
//! interpolation stencil is built once per solve.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Interpolation, SolveOptions, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::torus::{spectral, DiscreteVectorField, PeriodicGrid, ScalarField};

/// Largest step accepted by the resolution guard, `h / (2‖b‖∞ + 1e-12)`.
pub fn max_stable_dt(b: &DiscreteVectorField) -> f64 {
    b.grid().spacing() / (2.0 * b.sup_norm() + 1e-12)
}

/// Default step `h / 4 / max(1, ‖b‖∞)`.
pub fn default_dt(b: &DiscreteVectorField) -> f64 {
    b.grid().spacing() / 4.0 / b.sup_norm().max(1.0)
}

/// Number of equal steps covering `[0, T]` with steps no longer than `dt`.
pub fn step_count(horizon: f64, dt: f64) -> usize {
    if horizon == 0.0 {
        0
    } else {
        ((horizon / dt) - 1e-9).ceil().max(1.0) as usize
    }
}

pub(crate) fn check_step(b: &DiscreteVectorField, horizon: f64, dt: f64) -> Result<()> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be finite and non-negative, got {horizon}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let max_dt = max_stable_dt(b);
    if dt > max_dt {
        return Err(Error::StepTooLarge { dt, max_dt, suggested: default_dt(b) });
    }
    Ok(())
}

/// Bilinear interpolation of the velocity at a point given in grid units.
#[inline]
fn velocity_at(comps: &[Vec<f64>], n: usize, dim: usize, pos: [f64; 2]) -> [f64; 2] {
    let fl0 = pos[0].floor();
    let f = pos[0] - fl0;
    let i0 = (fl0 as i64).rem_euclid(n as i64) as usize;
    let i1 = (i0 + 1) % n;
    if dim == 1 {
        let c = &comps[0];
        return [c[i0] + f * (c[i1] - c[i0]), 0.0];
    }
    let fl1 = pos[1].floor();
    let g = pos[1] - fl1;
    let j0 = (fl1 as i64).rem_euclid(n as i64) as usize;
    let j1 = (j0 + 1) % n;
    let mut v = [0.0; 2];
    for (axis, c) in comps.iter().enumerate() {
        let a = c[i0 * n + j0] + g * (c[i0 * n + j1] - c[i0 * n + j0]);
        let b = c[i1 * n + j0] + g * (c[i1 * n + j1] - c[i1 * n + j0]);
        v[axis] = a + f * (b - a);
    }
    v
}

/// Catmull-Rom interpolation between `u0` and `u1` at fraction `f`, written
/// so that equal inputs are reproduced exactly.
#[inline]
fn catmull_rom(um: f64, u0: f64, u1: f64, u2: f64, f: f64) -> f64 {
    let c1 = 0.5 * (u1 - um);
    let c2 = (um - u0) + 1.5 * (u1 - u0) + 0.5 * (u1 - u2);
    let c3 = 0.5 * (u2 - um) + 1.5 * (u0 - u1);
    u0 + f * (c1 + f * (c2 + f * c3))
}

#[derive(Clone, Debug)]
enum Stencil {
    Linear { rows: Vec<[u32; 2]>, cols: Vec<[u32; 2]>, frac: Vec<[f64; 2]> },
    Cubic { rows: Vec<[u32; 4]>, cols: Vec<[u32; 4]>, frac: Vec<[f64; 2]> },
}

/// Precomputed departure stencil for one field, step and interpolation rule.
#[derive(Clone, Debug)]
pub struct SemiLagrangian {
    grid: PeriodicGrid,
    dt: f64,
    stencil: Stencil,
}

/// Working state of a solve: real parts, plus imaginary parts for complex data.
pub(crate) struct State {
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl State {
    pub fn from_field(f: &ScalarField) -> Self {
        let re = f.values().iter().map(|v| v.re).collect();
        let im = if f.is_real() { None } else { Some(f.values().iter().map(|v| v.im).collect()) };
        Self { re, im }
    }

    pub fn to_field(&self, grid: PeriodicGrid) -> ScalarField {
        let values = match &self.im {
            None => self.re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            Some(im) => self.re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
        };
        ScalarField::new(grid, values).expect("state matches grid")
    }

    pub fn channels_mut(&mut self) -> impl Iterator<Item = &mut Vec<f64>> {
        std::iter::once(&mut self.re).chain(self.im.iter_mut())
    }
}

impl SemiLagrangian {
    /// Trace every node forward by `dt` through the bilinear interpolant of
    /// `b` and record its interpolation stencil.
    pub fn new(b: &DiscreteVectorField, dt: f64, interp: Interpolation) -> Self {
        let grid = *b.grid();
        let n = grid.points_per_axis();
        let dim = grid.dim();
        let comps: Vec<Vec<f64>> = b.components().iter().map(|c| c.real_parts()).collect();
        Self::trace(grid, dt, interp, |p| velocity_at(&comps, n, dim, p))
    }

    /// `velocity` takes positions in grid units.
    fn trace(grid: PeriodicGrid, dt: f64, interp: Interpolation, velocity: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let n = grid.points_per_axis();
        let dim = grid.dim();
        // velocities in grid units per unit time
        let inv_h = n as f64;
        let vel = |p: [f64; 2]| {
            let v = velocity(p);
            [v[0] * inv_h, v[1] * inv_h]
        };
        let count = grid.node_count();
        let mut departures = Vec::with_capacity(count);
        for idx in 0..count {
            let [i0, i1] = grid.multi_index(idx);
            let x = [i0 as f64, i1 as f64];
            let k1 = vel(x);
            let k2 = vel([x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]]);
            let k3 = vel([x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]]);
            let k4 = vel([x[0] + dt * k3[0], x[1] + dt * k3[1]]);
            let step = |a: usize| dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            departures.push([x[0] + step(0), if dim == 2 { x[1] + step(1) } else { 0.0 }]);
        }
        let split = |p: f64| {
            let fl = p.floor();
            ((fl as i64).rem_euclid(n as i64), p - fl)
        };
        let wrap = |i: i64| i.rem_euclid(n as i64) as u32;
        let row_stride = if dim == 2 { n as i64 } else { 1 };
        let stencil = match interp {
            Interpolation::Linear => {
                let mut rows = Vec::with_capacity(count);
                let mut cols = Vec::with_capacity(count);
                let mut frac = Vec::with_capacity(count);
                for p in &departures {
                    let (i, f) = split(p[0]);
                    let (j, g) = split(p[1]);
                    rows.push([wrap(i) * row_stride as u32, wrap(i + 1) * row_stride as u32]);
                    cols.push(if dim == 2 { [wrap(j), wrap(j + 1)] } else { [0, 0] });
                    frac.push([f, if dim == 2 { g } else { 0.0 }]);
                }
                Stencil::Linear { rows, cols, frac }
            }
            Interpolation::Cubic => {
                let mut rows = Vec::with_capacity(count);
                let mut cols = Vec::with_capacity(count);
                let mut frac = Vec::with_capacity(count);
                for p in &departures {
                    let (i, f) = split(p[0]);
                    let (j, g) = split(p[1]);
                    rows.push([-1, 0, 1, 2].map(|a| wrap(i + a) * row_stride as u32));
                    cols.push(if dim == 2 { [-1, 0, 1, 2].map(|a| wrap(j + a)) } else { [0; 4] });
                    frac.push([f, if dim == 2 { g } else { 0.0 }]);
                }
                Stencil::Cubic { rows, cols, frac }
            }
        };
        Self { grid, dt, stencil }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One advection step of a real array.
    pub fn advect(&self, src: &[f64], dst: &mut [f64]) {
        let one_d = self.grid.dim() == 1;
        match &self.stencil {
            Stencil::Linear { rows, cols, frac } => {
                for (k, out) in dst.iter_mut().enumerate() {
                    let ([r0, r1], [c0, c1], [f, g]) = (rows[k], cols[k], frac[k]);
                    *out = if one_d {
                        let (a, b) = (src[r0 as usize], src[r1 as usize]);
                        a + f * (b - a)
                    } else {
                        // indices stay below n²; wrapping adds keep overflow checks out of the hot loop
                        let lerp = |r: u32| {
                            let (a, b) = (src[r.wrapping_add(c0) as usize], src[r.wrapping_add(c1) as usize]);
                            a + g * (b - a)
                        };
                        let (a, b) = (lerp(r0), lerp(r1));
                        a + f * (b - a)
                    };
                }
            }
            Stencil::Cubic { rows, cols, frac } => {
                for (k, out) in dst.iter_mut().enumerate() {
                    let (r, c, [f, g]) = (&rows[k], &cols[k], frac[k]);
                    *out = if one_d {
                        let v = r.map(|ri| src[ri as usize]);
                        catmull_rom(v[0], v[1], v[2], v[3], f)
                    } else {
                        let row = |ri: u32| {
                            let v = c.map(|ci| src[ri.wrapping_add(ci) as usize]);
                            catmull_rom(v[0], v[1], v[2], v[3], g)
                        };
                        catmull_rom(row(r[0]), row(r[1]), row(r[2]), row(r[3]), f)
                    };
                }
            }
        }
    }

    /// Advect `u0` for `steps` steps, calling `hook(state, step, record)` after
    /// each advection; `record` is true when the snapshot is about to be stored.
    pub(crate) fn run_with(
        &self,
        u0: &ScalarField,
        steps: usize,
        max_snapshots: usize,
        mut hook: impl FnMut(&mut State, usize, bool) -> Result<()>,
    ) -> Result<Trajectory> {
        u0.check_same_grid(&ScalarField::zeros(self.grid))?;
        if max_snapshots < 2 {
            return Err(invalid("max_snapshots", "must be at least 2"));
        }
        let stride = steps.div_ceil(max_snapshots - 1).max(1);
        let mut state = State::from_field(u0);
        let mut scratch = vec![0.0; self.grid.node_count()];
        let mut times = vec![0.0];
        let mut snaps = vec![u0.clone()];
        for step in 1..=steps {
            for ch in state.channels_mut() {
                self.advect(ch, &mut scratch);
                std::mem::swap(ch, &mut scratch);
            }
            let record = step % stride == 0 || step == steps;
            hook(&mut state, step, record)?;
            if record {
                times.push(step as f64 * self.dt);
                snaps.push(state.to_field(self.grid));
            }
        }
        Trajectory::new(times, snaps)
    }
}

fn prepare(
    b: &DiscreteVectorField,
    u0: &ScalarField,
    horizon: f64,
    dt: f64,
    opts: &SolveOptions,
) -> Result<(SemiLagrangian, usize)> {
    u0.check_same_grid(b.component(0))?;
    check_step(b, horizon, dt)?;
    let steps = step_count(horizon, dt);
    let actual = if steps == 0 { dt } else { horizon / steps as f64 };
    Ok((SemiLagrangian::new(b, actual, opts.interp), steps))
}

/// Semi-Lagrangian solve of `∂u/∂t = b·∇u`, `u(0) = u0`.
pub fn solve_classical_transport(
    b: &DiscreteVectorField,
    u0: &ScalarField,
    horizon: f64,
    dt: f64,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    let (sl, steps) = prepare(b, u0, horizon, dt, opts)?;
    sl.run_with(u0, steps, opts.max_snapshots, |_, _, _| Ok(()))
}

/// Density dual to the transport solve, using the spectral divergence of `b`.
pub fn solve_density(
    b: &DiscreteVectorField,
    rho0: &ScalarField,
    horizon: f64,
    dt: f64,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    solve_density_with_divergence(b, &spectral::divergence(b), rho0, horizon, dt, opts)
}

/// Density `∂ρ/∂t = div(bρ)`, the equation whose pairing with the transported
/// `u` is conserved: advect like `u`, then multiply node-wise by
/// `exp(div b · dt)`.
pub fn solve_density_with_divergence(
    b: &DiscreteVectorField,
    div: &ScalarField,
    rho0: &ScalarField,
    horizon: f64,
    dt: f64,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    div.check_same_grid(rho0)?;
    let (sl, steps) = prepare(b, rho0, horizon, dt, opts)?;
    let growth: Vec<f64> = div.values().iter().map(|d| (d.re * sl.dt()).exp()).collect();
    sl.run_with(rho0, steps, opts.max_snapshots, |state, _, _| {
        for ch in state.channels_mut() {
            ch.iter_mut().zip(&growth).for_each(|(v, g)| *v *= g);
        }
        Ok(())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ViscousOptions {
    /// Apply the heat factor once every this many advection steps (and
    /// before every stored snapshot), with the accumulated time.
    pub heat_every: usize,
}

impl Default for ViscousOptions {
    fn default() -> Self {
        Self { heat_every: 1 }
    }
}

/// Lie splitting for `∂u/∂t = b·∇u + ε²Δu`: advection, then the exact heat
/// factor `exp(-ε²|2πk|²τ)` on each Fourier mode. `ε = 0` is the classical solve.
pub fn solve_viscous(
    b: &DiscreteVectorField,
    u0: &ScalarField,
    eps: f64,
    horizon: f64,
    dt: f64,
    opts: &SolveOptions,
    visc: &ViscousOptions,
) -> Result<Trajectory> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("viscosity must be non-negative, got {eps}")));
    }
    if visc.heat_every == 0 {
        return Err(invalid("heat_every", "must be at least 1"));
    }
    let (sl, steps) = prepare(b, u0, horizon, dt, opts)?;
    if eps == 0.0 {
        return sl.run_with(u0, steps, opts.max_snapshots, |_, _, _| Ok(()));
    }
    let grid = *u0.grid();
    let lap = spectral::laplacian_symbol(&grid);
    let mut pending = 0usize;
    sl.run_with(u0, steps, opts.max_snapshots, |state, _, record| {
        pending += 1;
        if pending < visc.heat_every && !record {
            return Ok(());
        }
        let tau = pending as f64 * sl.dt();
        pending = 0;
        let field = state.to_field(grid);
        let out = spectral::apply_multiplier(&field, |i| Complex64::new((-eps * eps * lap[i] * tau).exp(), 0.0));
        state.re.iter_mut().zip(out.values()).for_each(|(r, v)| *r = v.re);
        if let Some(im) = state.im.as_mut() {
            im.iter_mut().zip(out.values()).for_each(|(r, v)| *r = v.im);
        }
        Ok(())
    })
}
