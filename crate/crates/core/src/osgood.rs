//! Moduli of continuity and the Osgood integral, the Weierstrass-type
//! function `Σ 2^{-k} e^{i 2^k t}`, and L¹ norms of lacunary sums.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::torus::spectral::fft_1d;

/// Largest number of lacunary terms (or `K + m`) the sample-count guard allows.
pub const MAX_TERMS: u32 = 22;
/// Sampling never drops below `2^16` points so that the L¹ quadrature of a
/// few-term sum is accurate to well below `1e-6`.
pub const MIN_SAMPLES_LOG2: u32 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusSpec {
    /// `t^θ`
    Power { theta: f64 },
    /// `t (1 + log(1/t))`
    LogLipschitz,
    /// Log-log linear interpolation of samples; the first segment's slope
    /// extends below the smallest `t`.
    Table { t: Vec<f64>, omega: Vec<f64> },
}

impl ModulusSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { theta } if !(*theta > 0.0 && theta.is_finite()) => {
                Err(invalid("theta", format!("must be positive, got {theta}")))
            }
            Self::Table { t, omega } => {
                if t.len() < 2 || t.len() != omega.len() {
                    return Err(invalid("table", "need at least two (t, omega) pairs of equal length"));
                }
                if t.windows(2).any(|w| w[1] <= w[0]) || t[0] <= 0.0 || *t.last().unwrap() < 1.0 {
                    return Err(invalid("table", "t must increase from a positive value up to at least 1"));
                }
                if let Some((&t, &value)) = t.iter().zip(omega).find(|(_, &w)| !(w > 0.0)) {
                    return Err(Error::NonPositiveModulus { t, value });
                }
                if omega.windows(2).any(|w| w[1] < w[0]) {
                    return Err(invalid("table", "omega must be non-decreasing"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `ω(t)` for `t ∈ (0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        self.ln_eval(t).exp()
    }

    /// `log ω(t)`, finite far below the range where `ω` itself underflows.
    pub fn ln_eval(&self, t: f64) -> f64 {
        let lt = t.ln();
        match self {
            Self::Power { theta } => theta * lt,
            Self::LogLipschitz => lt + (1.0 - lt).ln(),
            Self::Table { t: ts, omega } => {
                let k = ts.partition_point(|&s| s <= t).clamp(1, ts.len() - 1);
                let (a, b) = ((ts[k - 1].ln(), omega[k - 1].ln()), (ts[k].ln(), omega[k].ln()));
                a.1 + (lt - a.0) * (b.1 - a.1) / (b.0 - a.0)
            }
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

const PANEL_WIDTH: f64 = 0.25;
const GL_ORDER: usize = 8;

/// `∫ dt/ω(t)` over `t ∈ [e^{-s1}, e^{-s0}]`, integrated in `s = log(1/t)`.
fn osgood_piece(spec: &ModulusSpec, s0: f64, s1: f64, rule: &[(f64, f64)]) -> Result<f64> {
    let panels = (((s1 - s0) / PANEL_WIDTH).ceil() as usize).max(1);
    let w = (s1 - s0) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = s0 + (p as f64 + 0.5) * w;
        for &(x, wt) in rule {
            let s = mid + 0.5 * w * x;
            let t = (-s).exp();
            let ln_omega = spec.ln_eval(t);
            if !ln_omega.is_finite() {
                return Err(Error::NonPositiveModulus { t, value: spec.eval(t) });
            }
            sum += 0.5 * w * wt * (-s - ln_omega).exp();
        }
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OsgoodVerdict {
    Divergent,
    Convergent,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthLaw {
    /// `c log(1/δ)`
    Log,
    /// `c log log(1/δ)`
    LogLog,
    /// `c δ^{-κ}`
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub law: GrowthLaw,
    pub c: f64,
    /// Exponent of the power law; zero otherwise.
    pub kappa: f64,
    /// Largest relative misfit of the last three increments.
    pub max_relative_misfit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OsgoodReport {
    pub verdict: OsgoodVerdict,
    pub deltas: Vec<f64>,
    /// `I(δ) = ∫_δ^1 dt/ω(t)`.
    pub integrals: Vec<f64>,
    pub fit: Option<GrowthFit>,
}

pub const CAUCHY_TOLERANCE: f64 = 1e-6;
pub const GROWTH_TOLERANCE: f64 = 0.2;

/// `δ = 10^{-2^j}` for `j = 1..=8`, reaching `1e-256`.
pub fn default_delta_list() -> Vec<f64> {
    (1..=8).map(|j| 10f64.powi(-(1 << j))).collect()
}

/// Fit `d_i ≈ c Δg_i` to the increments and report the worst relative misfit.
fn fit_increments(d: &[f64], dg: &[f64]) -> (f64, f64) {
    let c = d.iter().zip(dg).map(|(a, b)| a * b).sum::<f64>() / dg.iter().map(|b| b * b).sum::<f64>();
    let misfit = d.iter().zip(dg).map(|(a, b)| ((a - c * b) / a).abs()).fold(0.0, |m: f64, x| {
        if m.is_nan() || x.is_nan() {
            f64::NAN
        } else {
            m.max(x)
        }
    });
    (c, misfit)
}

fn best_growth_fit(ls: &[f64], d: &[f64]) -> Option<GrowthFit> {
    let diffs = |g: &dyn Fn(f64) -> f64| ls.windows(2).map(|w| g(w[1]) - g(w[0])).collect::<Vec<_>>();
    let mut candidates = Vec::new();
    let mut push = |law, (c, m): (f64, f64), kappa, rescale: f64| {
        if c > 0.0 && m.is_finite() {
            candidates.push(GrowthFit { law, c: c * rescale, kappa, max_relative_misfit: m });
        }
    };
    push(GrowthLaw::Log, fit_increments(d, &diffs(&|l| l)), 0.0, 1.0);
    push(GrowthLaw::LogLog, fit_increments(d, &diffs(&|l| l.ln())), 0.0, 1.0);
    // κ from the ratio of the last two increments, which increases with κ;
    // exponentials are taken relative to the last point to stay finite
    let top = *ls.last().unwrap();
    let scaled = |kappa: f64| diffs(&|l| (kappa * (l - top)).exp());
    let ratio = |kappa: f64| {
        let e = scaled(kappa);
        e[e.len() - 1] / e[e.len() - 2]
    };
    let target = d[d.len() - 1] / d[d.len() - 2];
    let (mut lo, mut hi) = (1e-8f64, 50.0);
    if ratio(lo) < target && target < ratio(hi) {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if ratio(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let kappa = (lo * hi).sqrt();
        push(GrowthLaw::Power, fit_increments(d, &scaled(kappa)), kappa, (-kappa * top).exp());
    }
    candidates.into_iter().min_by(|a, b| a.max_relative_misfit.total_cmp(&b.max_relative_misfit))
}

/// Tabulate `I(δ)` and classify the Osgood integral.
///
/// Convergent when the last increment is below [`CAUCHY_TOLERANCE`];
/// divergent when the last three increments are positive and match one of
/// the [`GrowthLaw`]s within [`GROWTH_TOLERANCE`]; undecided otherwise.
pub fn osgood_classify(spec: &ModulusSpec, deltas: &[f64]) -> Result<OsgoodReport> {
    spec.validate()?;
    if deltas.len() < 4 {
        return Err(invalid("delta_list", "need at least four values"));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("delta_list", "must decrease strictly inside (0, 1)"));
    }
    if *deltas.last().unwrap() > 1e-8 {
        return Err(invalid("delta_list", "must reach 1e-8 or below"));
    }
    let rule = gauss_legendre(GL_ORDER);
    let ls: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let mut integrals = Vec::with_capacity(deltas.len());
    let mut acc = 0.0;
    let mut s = 0.0;
    for &l in &ls {
        acc += osgood_piece(spec, s, l, &rule)?;
        s = l;
        integrals.push(acc);
    }
    let n = integrals.len();
    let d: Vec<f64> = (n - 3..n).map(|i| integrals[i] - integrals[i - 1]).collect();
    let (verdict, fit) = if integrals.last().unwrap().is_infinite() {
        (OsgoodVerdict::Divergent, None)
    } else if d[2].abs() < CAUCHY_TOLERANCE {
        (OsgoodVerdict::Convergent, None)
    } else if d.iter().all(|&x| x > 0.0) {
        let fit = best_growth_fit(&ls[n - 4..], &d);
        match fit {
            Some(f) if f.max_relative_misfit <= GROWTH_TOLERANCE => (OsgoodVerdict::Divergent, Some(f)),
            other => (OsgoodVerdict::Undecided, other),
        }
    } else {
        (OsgoodVerdict::Undecided, None)
    };
    Ok(OsgoodReport { verdict, deltas: deltas.to_vec(), integrals, fit })
}

fn check_terms(name: &'static str, k: u32) -> Result<()> {
    if k > MAX_TERMS {
        return Err(invalid(name, format!("at most {MAX_TERMS} terms fit the sample-count guard, got {k}")));
    }
    Ok(())
}

fn sample_log2(top_term: u32) -> u32 {
    (top_term + 2).max(MIN_SAMPLES_LOG2)
}

/// Samples of `Σ_k c_k e^{i 2^k t}` at `t_j = 2πj/M`, `M = 2^log2`.
fn lacunary_samples(log2: u32, coeffs: impl IntoIterator<Item = (u32, Complex64)>) -> Vec<Complex64> {
    let m = 1usize << log2;
    let mut data = vec![Complex64::default(); m];
    for (k, c) in coeffs {
        data[(1usize << k) % m] += c;
    }
    fft_1d(&mut data, true);
    data
}

/// `f_K(t) = Σ_{k=1..K} e^{i 2^k t}` on `2^max(K+2, 16)` points.
#[derive(Clone, Debug, PartialEq)]
pub struct LacunarySum {
    pub terms: u32,
    pub samples: Vec<Complex64>,
}

impl LacunarySum {
    pub fn new(terms: u32) -> Result<Self> {
        check_terms("K", terms)?;
        let samples = lacunary_samples(sample_log2(terms), (1..=terms).map(|k| (k, Complex64::new(1.0, 0.0))));
        Ok(Self { terms, samples })
    }

    /// `(1/2π) ∫ |f_K|` by the trapezoidal rule.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).sum::<f64>() / self.samples.len() as f64
    }
}

/// `max_t |f_K(2^m t) - (f_{K+m}(t) - Σ_{k=1..m} e^{i 2^k t})|`.
pub fn dilation_identity_defect(terms: u32, m: u32) -> Result<f64> {
    check_terms("K + m", terms + m)?;
    let log2 = sample_log2(terms + m);
    let base = LacunarySum::new(terms)?;
    let stride_mod = base.samples.len();
    let one = Complex64::new(1.0, 0.0);
    let longer = lacunary_samples(log2, (1..=terms + m).map(|k| (k, one)));
    let head = lacunary_samples(log2, (1..=m).map(|k| (k, one)));
    // t_j = 2πj/L maps to base index 2^m j Lb / L; L/Lb is a power of two ≤ 2^m
    let step = (1usize << m) / (longer.len() / stride_mod);
    Ok((0..longer.len())
        .map(|j| (base.samples[(j * step) % stride_mod] - (longer[j] - head[j])).norm())
        .fold(0.0, f64::max))
}

/// `(1/2π) ∫ |f_K(2^m t)| dt`, sampled at full resolution for the dilated sum.
pub fn dilated_l1_norm(terms: u32, m: u32) -> Result<f64> {
    check_terms("K + m", terms + m)?;
    let s = lacunary_samples(sample_log2(terms + m), (1..=terms).map(|k| (k + m, Complex64::new(1.0, 0.0))));
    Ok(s.iter().map(|z| z.norm()).sum::<f64>() / s.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunaryRow {
    pub terms: u32,
    pub l1_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunaryReport {
    pub rows: Vec<LacunaryRow>,
    /// `norm ≈ c log K + d`, ordinary least squares.
    pub c: f64,
    pub d: f64,
    /// `‖norm - fit‖₂ / ‖norm‖₂`.
    pub relative_residual: f64,
    /// `sqrt(mean(((norm - fit) / norm)²))`, for comparison.
    pub pointwise_rms_residual: f64,
    /// `max_{m ≤ 2, K} |∫|f_K(2^m t)| - ∫|f_K(t)||`.
    pub dilation_l1_gap: f64,
    /// `1 ≤ norm ≤ K` on every row.
    pub bounds_hold: bool,
}

/// Tabulate lacunary L¹ norms and fit `c log K + d`.
pub fn lacunary_l1_growth(k_list: &[u32], dilation_max_m: u32) -> Result<LacunaryReport> {
    if k_list.len() < 2 {
        return Err(invalid("K_list", "need at least two sizes to fit"));
    }
    if k_list.iter().any(|&k| k == 0 || k > 20) {
        return Err(invalid("K_list", "entries must lie in 1..=20"));
    }
    let mut rows = Vec::with_capacity(k_list.len());
    let mut gap: f64 = 0.0;
    for &k in k_list {
        let norm = LacunarySum::new(k)?.l1_norm();
        for m in 1..=dilation_max_m.min(MAX_TERMS - k) {
            gap = gap.max((dilated_l1_norm(k, m)? - norm).abs());
        }
        rows.push(LacunaryRow { terms: k, l1_norm: norm });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.terms as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.l1_norm).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("K_list", "need at least two distinct sizes"));
    }
    let c = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let d = my - c * mx;
    let res: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (c * x + d)).collect();
    let relative_residual =
        res.iter().map(|r| r * r).sum::<f64>().sqrt() / ys.iter().map(|y| y * y).sum::<f64>().sqrt();
    let pointwise_rms_residual = (res.iter().zip(&ys).map(|(r, y)| (r / y).powi(2)).sum::<f64>() / n).sqrt();
    let bounds_hold = rows.iter().all(|r| r.l1_norm >= 1.0 - 1e-12 && r.l1_norm <= r.terms as f64 + 1e-12);
    Ok(LacunaryReport { rows, c, d, relative_residual, pointwise_rms_residual, dilation_l1_gap: gap, bounds_hold })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub h: f64,
    /// `S(h) = max_t |u(t+h) - u(t)|`
    pub sup_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassReport {
    pub terms: u32,
    pub rows: Vec<ModulusRow>,
    /// `c` in `S(h) ≈ c h log₂(1/h)`, fitted in relative least squares.
    pub c: f64,
    /// `sqrt(mean(((S - c g) / S)²))`.
    pub relative_rms_residual: f64,
    /// `max(S/g) / min(S/g)`.
    pub ratio_spread: f64,
}

/// `S(h)` for `u_K(t) = Σ_{k=1..K} 2^{-k} e^{i 2^k t}`.
///
/// `u(t+h) - u(t)` is again a lacunary sum, with coefficients
/// `2^{-k}(e^{i 2^k h} - 1)`, so it is sampled exactly by one inverse
/// transform for any `h`. Phases `2^k h` are reduced modulo `2π` first.
pub fn weierstrass_sup_difference(terms: u32, h: f64) -> Result<f64> {
    check_terms("K", terms)?;
    let coeffs = (1..=terms).map(|k| {
        let phase = (h * (1u64 << k) as f64).rem_euclid(2.0 * PI);
        let c = Complex64::from_polar(1.0, phase) - 1.0;
        (k, c * 0.5f64.powi(k as i32))
    });
    Ok(lacunary_samples(sample_log2(terms), coeffs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Modulus table for `u_K` and the fit `S(h) ≈ c h log₂(1/h)`.
pub fn weierstrass_modulus(terms: u32, h_list: &[f64]) -> Result<WeierstrassReport> {
    check_terms("K", terms)?;
    if h_list.is_empty() {
        return Err(invalid("h_list", "empty"));
    }
    let h_min = 2.0 * PI * 0.5f64.powi(terms as i32 + 1);
    for &h in h_list {
        if !(h >= h_min && h < 1.0) {
            return Err(invalid("h_list", format!("need {h_min} <= h < 1, got {h}")));
        }
        if h.log2().fract() != 0.0 {
            return Err(invalid("h_list", format!("{h} is not a power of two")));
        }
    }
    let rows = h_list
        .iter()
        .map(|&h| Ok(ModulusRow { h, sup_difference: weierstrass_sup_difference(terms, h)? }))
        .collect::<Result<Vec<_>>>()?;
    let g: Vec<f64> = rows.iter().map(|r| r.h * (1.0 / r.h).log2()).collect();
    let w: Vec<f64> = rows.iter().zip(&g).map(|(r, g)| g / r.sup_difference).collect();
    let c = w.iter().sum::<f64>() / w.iter().map(|x| x * x).sum::<f64>();
    let n = rows.len() as f64;
    let relative_rms_residual = (w.iter().map(|x| (1.0 - c * x).powi(2)).sum::<f64>() / n).sqrt();
    let ratios: Vec<f64> = w.iter().map(|x| 1.0 / x).collect();
    let ratio_spread =
        ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
    Ok(WeierstrassReport { terms, rows, c, relative_rms_residual, ratio_spread })
}

/// Dyadic `h = 2^{-j}` for `j` from `hi` down to `lo` exponents.
pub fn dyadic_range(coarsest: i32, finest: i32) -> Vec<f64> {
    (coarsest..=finest).map(|j| 2f64.powi(-j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_degree_fifteen() {
        let rule = gauss_legendre(8);
        let q: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((q - 2.0 / 15.0).abs() < 1e-14);
        assert!((rule.iter().map(|(_, w)| w).sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn table_interpolates_in_log_log() {
        let spec = ModulusSpec::Table { t: vec![0.01, 1.0], omega: vec![0.01, 1.0] };
        spec.validate().unwrap();
        assert!((spec.eval(0.1) - 0.1).abs() < 1e-14);
        assert!((spec.eval(1e-4) - 1e-4).abs() < 1e-17);
    }

    #[test]
    fn single_term_modulus_is_sine() {
        for h in [0.5, 0.125, 2f64.powi(-10)] {
            let s = weierstrass_sup_difference(1, h).unwrap();
            assert!((s - h.sin()).abs() < 1e-13, "{h}: {s}");
        }
    }
}
