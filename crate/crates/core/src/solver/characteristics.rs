use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::torus::wrap_unit;
use crate::zoo::{VectorFieldSpec, DEFAULT_CLAMP_RADIUS};

/// An RK4 trajectory of `ẋ = b(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPath {
    pub start: Vec<f64>,
    pub times: Vec<f64>,
    /// Positions; torus kinds are wrapped into `[0, 1)`.
    pub points: Vec<Vec<f64>>,
    /// Some stage evaluation fell inside the clamp radius of the singular set.
    pub singular_grazing: bool,
}

impl CharacteristicPath {
    pub fn end(&self) -> &[f64] {
        self.points.last().unwrap()
    }
}

fn rk4_step(spec: &VectorFieldSpec, z: &[f64], h: f64, sign: f64, clamp: f64, grazing: &mut bool) -> Result<Vec<f64>> {
    let mut eval = |p: &[f64]| -> Result<Vec<f64>> {
        let (v, c) = spec.eval_phase(p, clamp)?;
        *grazing |= c;
        Ok(v.into_iter().map(|x| sign * x).collect())
    };
    let axpy = |a: &[f64], k: &[f64], s: f64| a.iter().zip(k).map(|(x, y)| x + s * y).collect::<Vec<_>>();
    let k1 = eval(z)?;
    let k2 = eval(&axpy(z, &k1, 0.5 * h))?;
    let k3 = eval(&axpy(z, &k2, 0.5 * h))?;
    let k4 = eval(&axpy(z, &k3, h))?;
    Ok((0..z.len()).map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Classical RK4 integration of `ẋ = ±b(x)` from `x0` over `[0, T]` with
/// `ceil(T/dt)` equal steps. `reverse` integrates the negated field.
pub fn solve_characteristics(
    spec: &VectorFieldSpec,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    reverse: bool,
) -> Result<CharacteristicPath> {
    spec.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be finite and non-negative, got {horizon}")));
    }
    if x0.len() != spec.dim() {
        return Err(invalid("x0", format!("expected {} coordinates, got {}", spec.dim(), x0.len())));
    }
    let steps = super::step_count(horizon, dt);
    let h = if steps == 0 { 0.0 } else { horizon / steps as f64 };
    let sign = if reverse { -1.0 } else { 1.0 };
    let periodic = spec.is_periodic();
    let wrap = |z: Vec<f64>| if periodic { z.into_iter().map(wrap_unit).collect() } else { z };
    let mut grazing = false;
    let mut z = wrap(x0.to_vec());
    let mut times = vec![0.0];
    let mut points = vec![z.clone()];
    for k in 1..=steps {
        z = wrap(rk4_step(spec, &z, h, sign, DEFAULT_CLAMP_RADIUS, &mut grazing)?);
        times.push(k as f64 * h);
        points.push(z.clone());
    }
    Ok(CharacteristicPath { start: x0.to_vec(), times, points, singular_grazing: grazing })
}

/// End point `X_T(x0)` only, without storing the path.
pub fn characteristic_endpoint(spec: &VectorFieldSpec, x0: &[f64], horizon: f64, dt: f64) -> Result<Vec<f64>> {
    let steps = super::step_count(horizon, dt);
    let h = if steps == 0 { 0.0 } else { horizon / steps as f64 };
    let mut grazing = false;
    let mut z = x0.to_vec();
    for _ in 0..steps {
        z = rk4_step(spec, &z, h, 1.0, DEFAULT_CLAMP_RADIUS, &mut grazing)?;
    }
    Ok(if spec.is_periodic() { z.into_iter().map(wrap_unit).collect() } else { z })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::torus::torus_distance;
    use crate::zoo::{ConstantParams, NbodyParams, ShearParams, VortexParams};

    #[test]
    fn constant_field_is_exact() {
        let s = VectorFieldSpec::Constant(ConstantParams { velocity: vec![0.3, -0.7] });
        let p = solve_characteristics(&s, &[0.1, 0.2], 2.0, 0.1, false).unwrap();
        let e = p.end();
        assert!((e[0] - wrap_unit(0.1 + 0.6)).abs() < 1e-12 && (e[1] - wrap_unit(0.2 - 1.4)).abs() < 1e-12);
        let back = solve_characteristics(&s, e, 2.0, 0.1, true).unwrap();
        assert!(torus_distance(&[back.end()[0], back.end()[1]], &[0.1, 0.2], 2) < 1e-12);
    }

    #[test]
    fn shear_layers_drift() {
        let s = VectorFieldSpec::BvShear(ShearParams::default());
        let p = solve_characteristics(&s, &[0.0, 0.25], 0.5, 0.01, false).unwrap();
        assert!((p.end()[0] - 0.5).abs() < 1e-12 && (p.end()[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn vortex_orbits_are_circles() {
        let s = VectorFieldSpec::SingularVortex(VortexParams { gamma: 1.0, center: [0.5, 0.5] });
        let r = 0.1;
        let period = 2.0 * PI * r;
        let p = solve_characteristics(&s, &[0.5 + r, 0.5], period, 1e-3, false).unwrap();
        let drift = p.points.iter().map(|z| ((z[0] - 0.5).hypot(z[1] - 0.5) - r).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-6, "{drift}");
        assert!(torus_distance(&[p.end()[0], p.end()[1]], &[0.5 + r, 0.5], 2) < 1e-6);
        assert!(!p.singular_grazing);
        // speed limit between consecutive points
        let h = p.times[1];
        for w in p.points.windows(2) {
            assert!(torus_distance(&[w[0][0], w[0][1]], &[w[1][0], w[1][1]], 2) <= h * 1.0 + 1e-12);
        }
    }

    #[test]
    fn nbody_conserves_energy() {
        let s = VectorFieldSpec::NbodyHamiltonian(NbodyParams {
            masses: vec![1.0, 1.0],
            charges: vec![1.0, -1.0],
            alpha: 0.5,
        });
        let z0 = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, -0.3, 0.0];
        let p = solve_characteristics(&s, &z0, 2.0, 1e-3, false).unwrap();
        let e0 = s.energy(&z0).unwrap();
        let e1 = s.energy(p.end()).unwrap();
        assert!((e1 - e0).abs() < 1e-8, "{e0} {e1}");
    }
}
