//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release -p roughflow-cli --test acceptance` runs all twelve;
//! numeric arguments after `--` select a subset, e.g. `-- 1 5 11`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use roughflow::approximable::*;
use roughflow::flow::*;
use roughflow::osgood::*;
use roughflow::solver::*;
use roughflow::torus::mollifier::bump;
use roughflow::torus::{discrete_tv, l1_distance, lp_norm, Mollifier, PeriodicGrid, ScalarField};
use roughflow::zoo::*;
use roughflow_cli::{run, Command, ExperimentConfig, RunOptions};

type Outcome = (bool, String);

fn grid(n: usize) -> PeriodicGrid {
    PeriodicGrid::new(2, n).unwrap()
}

fn cos_x(g: PeriodicGrid) -> ScalarField {
    ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos())
}

fn shear() -> VectorFieldSpec {
    VectorFieldSpec::BvShear(ShearParams::default())
}

fn swirl() -> VectorFieldSpec {
    VectorFieldSpec::SmoothSwirl(SwirlParams::default())
}

/// The shear moves the layer `y < 1/2` by `+t` and the other by `-t` along x,
/// and `u(x, t) = u⁰(X_t(x))`.
fn shear_exact(g: PeriodicGrid, t: f64) -> ScalarField {
    ScalarField::from_fn(g, |x| (2.0 * PI * (x[0] + t * if x[1] < 0.5 { 1.0 } else { -1.0 })).cos())
}

fn shear_schedule(n: usize) -> CascadeSchedule {
    let finest = Mollifier::default().min_eps(&grid(n));
    CascadeSchedule::diagonal(vec![8.0 * finest, 4.0 * finest, 2.0 * finest, finest])
}

fn shear_cascade(n: usize) -> CascadeResult {
    cascade_solve(&shear(), &cos_x(grid(n)), 0.5, 0.25 / n as f64, &shear_schedule(n), &CascadeOptions::default())
        .unwrap()
}

fn sci(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "))
}

fn ratios(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[0] / w[1]).collect()
}

fn c1_classical_oracle() -> Outcome {
    let g = grid(128);
    let u0 = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin());
    let opts = CascadeOptions::default();
    let schedule = CascadeSchedule::diagonal(vec![0.5, 0.25, 0.125, 0.0625]);
    let start = Instant::now();
    let result = cascade_solve(&swirl(), &u0, 0.5, 1.0 / 512.0, &schedule, &opts).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let b = sample_field(&swirl(), &g).unwrap();
    let classical = solve_classical_transport(&b, &u0, 0.5, 1.0 / 512.0, &opts.solve).unwrap();
    let gap = result.solution.sup_distance(&classical, |d| lp_norm(d, 2.0)).unwrap();
    let stage = result.stage.sup_distance(&classical, |d| lp_norm(d, 2.0)).unwrap();
    (
        gap < 1e-3 && elapsed < 60.0,
        format!(
            "sup_t L2 gap {gap:.3e} (< 1e-3; mollified stage {stage:.3e}), converged {}, cascade {elapsed:.1} s (< 60 s)",
            result.summary.converged
        ),
    )
}

fn c2_exact_shear() -> Outcome {
    let errors: Vec<f64> = [128, 256]
        .iter()
        .map(|&n| {
            let r = shear_cascade(n);
            r.solution
                .times()
                .iter()
                .zip(r.solution.snapshots())
                .map(|(&t, u)| l1_distance(u, &shear_exact(grid(n), t)).unwrap())
                .fold(0.0, f64::max)
        })
        .collect();
    let ratio = errors[0] / errors[1];
    (
        errors[1] < 2e-2 && ratio >= 1.5,
        format!("L1 error N=128 {:.3e}, N=256 {:.3e} (< 2e-2), ratio {ratio:.2} (>= 1.5)", errors[0], errors[1]),
    )
}

fn c3_maximum_principle() -> Outcome {
    let g = grid(64);
    let u0 = ScalarField::from_fn(g, |x| {
        let r2 = (x[0] - 0.35).powi(2) + (x[1] - 0.6).powi(2);
        (-r2 / 0.02).exp() + 0.5 * (2.0 * PI * x[0]).cos()
    });
    let bound = lp_norm(&u0, f64::INFINITY).unwrap();
    let zoo = [
        VectorFieldSpec::Constant(ConstantParams { velocity: vec![0.7, -0.4] }),
        swirl(),
        VectorFieldSpec::SmoothSwirl(SwirlParams { amplitude: 1.0, compression: 0.5 }),
        shear(),
        VectorFieldSpec::SingularVortex(VortexParams { gamma: 1.5, center: [0.5, 0.5] }),
        VectorFieldSpec::AttractingSink(SinkParams { alpha: 0.9, center: [0.5, 0.5] }),
        VectorFieldSpec::PowerlawHamiltonian(PowerlawParams { alpha: 0.5, charge: 0.05 }),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut snapshots = 0;
    for spec in &zoo {
        let b = sample_field(spec, &g).unwrap();
        let traj = solve_classical_transport(&b, &u0, 0.25, default_dt(&b), &SolveOptions::default()).unwrap();
        for s in traj.snapshots() {
            worst = worst.max(lp_norm(s, f64::INFINITY).unwrap() - bound);
            snapshots += 1;
        }
    }
    (worst <= 1e-10, format!("{} torus fields, {snapshots} snapshots, worst excess {worst:.2e} (<= 1e-10)", zoo.len()))
}

fn c4_gronwall() -> Outcome {
    let g = grid(128);
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams { amplitude: 1.0, compression: 0.5 });
    let b = sample_field(&spec, &g).unwrap();
    // div b = 2πκ cos 2πx
    let m_hat = 2.0 * PI * 0.5;
    let measured = lp_norm(&roughflow::divergence(&b), f64::INFINITY).unwrap();
    let u0 = ScalarField::from_fn(g, |x| {
        let r2 = (x[0] - 0.35).powi(2) + (x[1] - 0.6).powi(2);
        (-r2 / 0.02).exp() + 0.5 * (2.0 * PI * x[0]).cos()
    });
    let n0 = lp_norm(&u0, 1.0).unwrap();
    let traj = solve_classical_transport(&b, &u0, 0.5, default_dt(&b), &SolveOptions::cubic()).unwrap();
    let worst = traj
        .times()
        .iter()
        .zip(traj.snapshots())
        .map(|(t, s)| lp_norm(s, 1.0).unwrap() / ((m_hat * t).exp() * n0))
        .fold(0.0, f64::max);
    (
        worst <= 1.05 && (measured - m_hat).abs() < 1e-6,
        format!("M̂ = {measured:.4} (closed form {m_hat:.4}), max ‖u‖₁ / (exp(M̂t)‖u⁰‖₁) = {worst:.4} (<= 1.05)"),
    )
}

/// `∫|z||∇ρ(z)| dz / ∫ρ dz` for the radial bump in the plane, by quadrature
/// in the radius; the radial identity gives exactly the dimension.
fn kernel_gradient_moment() -> f64 {
    let m = Mollifier::default();
    let k = 200_000;
    let h = m.radius / k as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        let r = (i as f64 + 0.5) * h;
        let slope = (m.profile(1.0, r + 0.5 * h) - m.profile(1.0, r - 0.5 * h)) / h;
        num += r * slope.abs() * r * h;
        den += bump(r / m.radius) * r * h;
    }
    num / den
}

fn c5_commutator() -> Outcome {
    let g = grid(256);
    let b = sample_field(&shear(), &g).unwrap();
    let tv: f64 = b.components().iter().map(discrete_tv).sum();
    let moment = kernel_gradient_moment();
    let div_l1 = lp_norm(&roughflow::divergence(&b), 1.0).unwrap();
    let bound_c = moment + div_l1 / tv;
    let u = cos_x(g);
    let finest = Mollifier::default().min_eps(&g);
    let eps: Vec<f64> = (1..10).map(|k| 0.5f64.powi(k)).filter(|&e| e >= finest).collect();
    let rows = commutator_sweep(&shear(), &u, &eps, &Mollifier::default()).unwrap();
    let norms: Vec<f64> = rows.iter().map(|r| r.l1_norm).collect();
    let bounded = norms.iter().all(|&n| n <= bound_c * tv * 1.0);
    let non_increasing = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let smooth_u = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
    let smooth = commutator_sweep(&swirl(), &smooth_u, &[0.5, 0.25, 0.125], &Mollifier::default()).unwrap();
    let decay = ratios(&smooth.iter().map(|r| r.l1_norm).collect::<Vec<_>>());
    let min_decay = decay.iter().copied().fold(f64::INFINITY, f64::min);
    (
        bounded && non_increasing && min_decay >= 1.8,
        format!(
            "shear norms {} over eps {eps:?} <= C·TV·‖u‖∞ = {:.3} (C = {bound_c:.4}), non-increasing: {non_increasing}; smooth decay ratios {decay:.2?} (>= 1.8)",
            sci(&norms),
            bound_c * tv
        ),
    )
}

fn c6_uniqueness() -> Outcome {
    let g = grid(128);
    let etas = [1e-3, 2e-3, 4e-3];
    let report = uniqueness_probe(&shear(), &g, 0.5, 0.25 / 128.0, &etas, &UniquenessOptions::default()).unwrap();
    let r0 = report.rows[0];
    let linear = report.rows[1..].iter().all(|r| ((r.integral / r0.integral) / (r.eta / r0.eta) - 1.0).abs() < 0.1);
    let scaled: Vec<f64> = report.rows.iter().map(|r| r.integral / r.eta).collect();
    (
        r0.integral <= 5.5e-4 && linear,
        format!(
            "I(T) at eta=1e-3: {:.4e} (<= 5.5e-4); I/eta = {scaled:.4?} (linear within 10%: {linear})",
            r0.integral
        ),
    )
}

fn c7_renormalization() -> Outcome {
    let worst: Vec<f64> = [128, 256]
        .iter()
        .map(|&n| {
            let r = shear_cascade(n);
            let b = sample_field(&shear(), &grid(n)).unwrap();
            beta_battery(-0.5, 0.5).iter().map(|beta| renormalization_defect(&r, &b, beta).unwrap()).fold(0.0, f64::max)
        })
        .collect();
    (
        worst[1] < 5e-2 && worst[1] < worst[0],
        format!("worst beta defect N=128 {:.3e}, N=256 {:.3e} (< 5e-2, shrinking)", worst[0], worst[1]),
    )
}

fn c8_stability() -> Outcome {
    // δ = 2^-6 is resolved from N = 512 on
    let n = 512;
    let g = grid(n);
    let deltas: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let finest = Mollifier::default().min_eps(&g);
    let resolved = deltas.iter().all(|&d| Mollifier::default().is_resolved(&g, d));
    let schedule = CascadeSchedule::diagonal(vec![2.0 * finest, finest]);
    let opts = CascadeOptions { solve: SolveOptions::default(), ..Default::default() };
    let report = stability_experiment(
        &shear(),
        &cos_x(g),
        0.5,
        0.25 / n as f64,
        &PerturbationPlan::Mollified { deltas },
        &schedule,
        &opts,
    )
    .unwrap();
    let strict = report.solution_gaps.windows(2).all(|w| w[1] < w[0]);
    (
        strict && resolved,
        format!(
            "N={n}, all deltas resolved: {resolved}; sup_t L1 gaps {}, field gaps {}",
            sci(&report.solution_gaps),
            sci(&report.field_l1_gaps)
        ),
    )
}

fn c9_multiplicativity() -> Outcome {
    let ns = [64, 128, 256];
    let (mut mult, mut modulus) = (Vec::new(), Vec::new());
    for &n in &ns {
        let g = grid(n);
        let f = cos_x(g);
        mult.push(multiplicativity_defect(&shear(), &f, &f, 0.5, &FlowConfig::default()).unwrap());
        modulus.push(extract_flow_map(&shear(), 0.5, &g, &FlowConfig::default()).unwrap().modulus_defect_l1());
    }
    let (rm, rd) = (ratios(&mult), ratios(&modulus));
    let ok = rm.iter().chain(&rd).all(|&r| r >= 1.5);
    (
        ok,
        format!(
            "N = {ns:?}: multiplicativity {} ratios {rm:.2?}; modulus {} ratios {rd:.2?} (>= 1.5)",
            sci(&mult),
            sci(&modulus)
        ),
    )
}

fn c10_irreversibility() -> Outcome {
    let g = grid(256);
    let u0 = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * x[1]).sin());
    let solve = SolveOptions::cubic();
    let probe_run = |spec: &VectorFieldSpec, eps: &[f64], heat_every: usize| {
        let dt = max_stable_dt(&sample_field(spec, &g).unwrap());
        reversibility_probe(spec, &u0, 0.5, eps, Some(dt), &solve, &ViscousOptions { heat_every }).unwrap()
    };
    let control = probe_run(&swirl(), &[0.1, 0.05, 0.025, 0.0125, 0.0], 1);
    let sink = VectorFieldSpec::AttractingSink(SinkParams { alpha: 0.8, center: [0.5, 0.5] });
    let probe = probe_run(&sink, &[0.05, 0.025, 0.0], 64);
    let ev = irreversibility_evidence(&control, &probe, 10.0).unwrap();
    let fmt = |rows: &[ReturnRow]| {
        rows.iter().map(|r| format!("{}:{:.3e}", r.eps, r.return_error)).collect::<Vec<_>>().join(" ")
    };
    (
        ev.irreversible,
        format!(
            "floor {:.3e}; sink/floor min {:.1} (> 10); control slope {:.2} (>= 1), monotone {}; sink [{}]; control [{}]",
            ev.floor,
            ev.min_ratio,
            ev.control_slope,
            ev.control_monotone,
            fmt(&probe),
            fmt(&control)
        ),
    )
}

fn c11_osgood_suite() -> Outcome {
    let dilation = [(8, 1), (4, 3), (16, 1), (10, 2)]
        .iter()
        .map(|&(k, m)| dilation_identity_defect(k, m).unwrap())
        .fold(0.0, f64::max);
    let w = weierstrass_modulus(20, &dyadic_range(6, 18)).unwrap();
    let lac = lacunary_l1_growth(&[1, 2, 4, 8, 16, 20], 2).unwrap();
    let k2 = lac.rows.iter().find(|r| r.terms == 2).unwrap().l1_norm;
    let ok = dilation < 1e-12
        && w.relative_rms_residual < 0.15
        && lac.c > 0.0
        && lac.relative_residual < 0.1
        && (k2 - 4.0 / PI).abs() < 1e-6;
    (
        ok,
        format!(
            "dilation {dilation:.1e} (< 1e-12); Weierstrass c {:.4}, rms {:.3} (< 0.15); lacunary c {:.4}, d {:.4}, residual {:.3} (< 0.1); K=2 gap {:.1e} (< 1e-6)",
            w.c,
            w.relative_rms_residual,
            lac.c,
            lac.d,
            lac.relative_residual,
            (k2 - 4.0 / PI).abs()
        ),
    )
}

fn c12_reproducibility() -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let mut cfg = ExperimentConfig::from_json(r#"{"grid": 64, "initial": {"kind": "noise", "max_mode": 3}}"#).unwrap();
    cfg.seed = 11;
    let reports: Vec<Vec<u8>> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = tmp.path().join(d);
            run(Command::Cascade, &cfg, &RunOptions { allow_partial: true, out_dir: Some(out.clone()) }).unwrap();
            std::fs::read(out.join("report.json")).unwrap()
        })
        .collect();
    let same = reports[0] == reports[1];
    (same, format!("cascade report.json: {} bytes, identical: {same}", reports[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "classical-oracle agreement", c1_classical_oracle),
        (2, "exact shear solution", c2_exact_shear),
        (3, "maximum principle", c3_maximum_principle),
        (4, "Gronwall L1 bound", c4_gronwall),
        (5, "commutator contract", c5_commutator),
        (6, "uniqueness probe", c6_uniqueness),
        (7, "renormalization", c7_renormalization),
        (8, "stability", c8_stability),
        (9, "flow multiplicativity", c9_multiplicativity),
        (10, "irreversibility probe", c10_irreversibility),
        (11, "Osgood suite", c11_osgood_suite),
        (12, "reproducibility", c12_reproducibility),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!(
            "{} {id:>2} {name}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
