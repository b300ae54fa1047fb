use super::field::ScalarField;
use super::spectral;
use crate::error::{invalid, Result};

/// Discrete Lᵖ norm with quadrature weight `hⁿ`; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("Lp norms need p >= 1, got {p}")));
    }
    let vals = f.values();
    if p.is_infinite() {
        return Ok(vals.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let w = f.grid().cell_volume();
    if p == 1.0 {
        return Ok(vals.iter().map(|v| v.norm()).sum::<f64>() * w);
    }
    if p == 2.0 {
        return Ok((vals.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt());
    }
    Ok((vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() * w).powf(1.0 / p))
}

/// `‖f - g‖_{L¹}`.
pub fn l1_distance(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    lp_norm(&f.sub(g)?, 1.0)
}

/// `(Σ_k (1 + |2πk|²)^(-s) |f̂_k|²)^(1/2)` over the resolvable frequencies.
pub fn negative_sobolev_norm(f: &ScalarField, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(invalid("s", format!("Sobolev index must be non-negative, got {s}")));
    }
    let coeffs = spectral::forward(f);
    let lap = spectral::laplacian_symbol(f.grid());
    let sum: f64 = coeffs.iter().zip(&lap).map(|(c, l)| c.norm_sqr() * (1.0 + l).powf(-s)).sum();
    Ok(sum.sqrt())
}

/// Anisotropic total variation `Σ_nodes Σ_axes |f(x + h e_i) - f(x)| h^(n-1)` of the real part.
pub fn discrete_tv(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let w = grid.spacing().powi(grid.dim() as i32 - 1);
    let vals = f.values();
    let mut total = 0.0;
    for idx in 0..grid.node_count() {
        for axis in 0..grid.dim() {
            total += (vals[grid.step(idx, axis)].re - vals[idx].re).abs();
        }
    }
    total * w
}
