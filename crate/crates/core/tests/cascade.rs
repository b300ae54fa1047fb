use std::f64::consts::PI;

use roughflow::approximable::*;
use roughflow::solver::solve_classical_transport;
use roughflow::torus::{discrete_tv, l1_distance, lp_norm, Mollifier, PeriodicGrid, ScalarField};
use roughflow::zoo::*;
use roughflow::Error;

fn cos_x(grid: PeriodicGrid) -> ScalarField {
    ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).cos())
}

fn shear_exact(grid: PeriodicGrid, t: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| (2.0 * PI * (x[0] + t * if x[1] < 0.5 { 1.0 } else { -1.0 })).cos())
}

fn shear_schedule(n: usize) -> CascadeSchedule {
    let eps_min = 8.0 / n as f64;
    CascadeSchedule::diagonal(vec![8.0 * eps_min, 4.0 * eps_min, 2.0 * eps_min, eps_min])
}

#[test]
fn commutator_vanishes_for_constant_fields() {
    let grid = PeriodicGrid::new(2, 64).unwrap();
    let b = roughflow::DiscreteVectorField::constant(grid, [0.4, -1.1]);
    let u = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos());
    let c = commutator_apply(&b, &u, 0.25, &Mollifier::default()).unwrap();
    assert!(lp_norm(&c, f64::INFINITY).unwrap() < 1e-10);
}

#[test]
fn commutator_formula_matches_direct_difference() {
    let grid = PeriodicGrid::new(2, 128).unwrap();
    let b =
        sample_field(&VectorFieldSpec::SmoothSwirl(SwirlParams { amplitude: 1.0, compression: 0.3 }), &grid).unwrap();
    let u = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).cos() + (2.0 * PI * x[1]).sin());
    let m = Mollifier::default();
    let a = commutator_apply(&b, &u, 0.25, &m).unwrap();
    let d = commutator_direct(&b, &u, 0.25, &m).unwrap();
    assert!(l1_distance(&a, &d).unwrap() < 1e-8);
}

#[test]
fn shear_commutator_is_bounded_by_total_variation_and_non_increasing() {
    let grid = PeriodicGrid::new(2, 256).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let b = sample_field(&spec, &grid).unwrap();
    let tv: f64 = b.components().iter().map(discrete_tv).sum();
    assert!((tv - 4.0).abs() < 1e-12);
    let eps: Vec<f64> = (0..4).map(|k| 0.5f64.powi(k + 1)).collect();
    let rows = commutator_sweep(&spec, &cos_x(grid), &eps, &Mollifier::default()).unwrap();
    for r in &rows {
        assert!(r.l1_norm <= 3.0 * tv, "{rows:?}");
    }
    for w in rows.windows(2) {
        assert!(w[1].l1_norm <= w[0].l1_norm, "{rows:?}");
    }
}

#[test]
fn smooth_commutator_decays_linearly_in_eps() {
    let grid = PeriodicGrid::new(2, 256).unwrap();
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams::default());
    let u = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
    let rows = commutator_sweep(&spec, &u, &[0.5, 0.25, 0.125], &Mollifier::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[0].l1_norm / w[1].l1_norm >= 1.8, "{rows:?}");
    }
}

#[test]
fn sink_commutator_settles_under_refinement_at_fixed_eps() {
    // |Db| ~ |x|^(-1-α) is integrable in the plane for α < 1, so the norm at
    // fixed ε has a finite limit; the grid sequence must approach it.
    let spec = VectorFieldSpec::AttractingSink(SinkParams { alpha: 0.9, center: [0.5, 0.5] });
    let norms: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let grid = PeriodicGrid::new(2, n).unwrap();
            commutator_sweep(&spec, &cos_x(grid), &[0.125], &Mollifier::default()).unwrap()[0].l1_norm
        })
        .collect();
    assert!((norms[2] - norms[1]).abs() < (norms[1] - norms[0]).abs(), "{norms:?}");
    assert!(norms[2] > 0.0);
}

#[test]
fn swirl_cascade_agrees_with_classical_solve() {
    let grid = PeriodicGrid::new(2, 128).unwrap();
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams::default());
    let u0 = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin());
    let opts = CascadeOptions::default();
    let schedule = CascadeSchedule::diagonal(vec![0.5, 0.25, 0.125, 0.0625]);
    let result = cascade_solve(&spec, &u0, 0.5, 1.0 / 512.0, &schedule, &opts).unwrap();
    let b = sample_field(&spec, &grid).unwrap();
    let classical = solve_classical_transport(&b, &u0, 0.5, 1.0 / 512.0, &opts.solve).unwrap();
    let gap = result.solution.sup_distance(&classical, |d| lp_norm(d, 2.0)).unwrap();
    assert!(gap < 1e-3, "{gap}");
    assert!(result.summary.converged, "{:?}", result.summary);
    // the mollified stage is close to its limit candidate in the weak norm
    let s = result.summary.s;
    let weak = result.stage.sup_distance(&result.solution, |d| roughflow::negative_sobolev_norm(d, s)).unwrap();
    assert!(weak < 1e-3, "{weak}");
}

#[test]
fn shear_cascade_converges_to_exact_translation() {
    let mut errors = Vec::new();
    for n in [64, 128] {
        let grid = PeriodicGrid::new(2, n).unwrap();
        let spec = VectorFieldSpec::BvShear(ShearParams::default());
        let result =
            cascade_solve(&spec, &cos_x(grid), 0.5, 0.25 / n as f64, &shear_schedule(n), &CascadeOptions::default())
                .unwrap();
        assert!(result.summary.converged);
        let err = result
            .solution
            .times()
            .iter()
            .zip(result.solution.snapshots())
            .map(|(&t, u)| l1_distance(u, &shear_exact(grid, t)).unwrap())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[1] < 2e-2, "{errors:?}");
    assert!(errors[0] / errors[1] >= 1.5, "{errors:?}");
}

#[test]
fn remainders_shrink_along_the_schedule_and_gaps_decrease() {
    let grid = PeriodicGrid::new(2, 128).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let result =
        cascade_solve(&spec, &cos_x(grid), 0.5, 0.25 / 128.0, &shear_schedule(128), &CascadeOptions::default())
            .unwrap();
    let sup: Vec<f64> = result.summary.remainder_tv.iter().map(|r| r.iter().cloned().fold(0.0, f64::max)).collect();
    for w in sup.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "{sup:?}");
    }
    let gaps = &result.summary.hs_gaps;
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
    assert_eq!(result.summary.remainder_tv[0].len(), result.summary.times.len());
}

#[test]
fn remainder_is_uniform_in_delta_at_fixed_eps() {
    let grid = PeriodicGrid::new(2, 256).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let eps = 0.25;
    let mut sups = Vec::new();
    for delta in [0.25, 0.125, 0.0625] {
        let schedule = CascadeSchedule { eps: vec![eps], delta: Some(vec![delta]) };
        let r = cascade_solve(&spec, &cos_x(grid), 0.25, 1.0 / 1024.0, &schedule, &CascadeOptions::default()).unwrap();
        sups.push(r.summary.remainder_tv[0].iter().cloned().fold(0.0, f64::max));
    }
    let (lo, hi) = sups.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi <= 1.5 * lo, "{sups:?}");
}

#[test]
fn time_lipschitz_constant_is_uniform_across_stages() {
    let grid = PeriodicGrid::new(2, 128).unwrap();
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams::default());
    let u0 = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).cos());
    let schedule = CascadeSchedule::diagonal(vec![0.5, 0.25, 0.125]);
    let r = cascade_solve(&spec, &u0, 0.5, 1.0 / 512.0, &schedule, &CascadeOptions::default()).unwrap();
    let l = &r.summary.hs_lipschitz;
    let (lo, hi) = l.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi <= 1.2 * lo, "{l:?}");
}

#[test]
fn squares_of_solutions_are_approximable() {
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let mut gaps = Vec::new();
    for n in [64, 128] {
        let grid = PeriodicGrid::new(2, n).unwrap();
        let u0 = ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).cos() + 0.3 * (2.0 * PI * x[1]).sin());
        let opts = CascadeOptions::default();
        let dt = 0.25 / n as f64;
        let u = cascade_solve(&spec, &u0, 0.5, dt, &shear_schedule(n), &opts).unwrap();
        let v = cascade_solve(&spec, &u0.mul(&u0).unwrap(), 0.5, dt, &shear_schedule(n), &opts).unwrap();
        let squared = u.solution.map(|s| s.mul(s).unwrap());
        gaps.push(v.solution.sup_l1_distance(&squared).unwrap());
    }
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn renormalized_shear_solutions_are_weak_solutions() {
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let mut worst = Vec::new();
    for n in [64, 128] {
        let grid = PeriodicGrid::new(2, n).unwrap();
        let r =
            cascade_solve(&spec, &cos_x(grid), 0.5, 0.25 / n as f64, &shear_schedule(n), &CascadeOptions::default())
                .unwrap();
        let b = sample_field(&spec, &grid).unwrap();
        let d = beta_battery(-0.5, 0.5)
            .iter()
            .map(|beta| renormalization_defect(&r, &b, beta).unwrap())
            .fold(0.0, f64::max);
        worst.push(d);
    }
    assert!(worst[1] < 5e-2 && worst[1] < worst[0], "{worst:?}");
}

#[test]
fn uniqueness_integral_is_linear_in_eta_and_bounded() {
    let grid = PeriodicGrid::new(2, 128).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let etas = [1e-3, 2e-3, 4e-3];
    let report = uniqueness_probe(&spec, &grid, 0.5, 0.25 / 128.0, &etas, &UniquenessOptions::default()).unwrap();
    assert!(report.within_bound);
    assert_eq!(report.m_hat, 0.0);
    let r0 = &report.rows[0];
    // divergence-free field: the injected mass is transported, never created
    assert!((r0.integral - 0.5 * 1e-3).abs() < 1e-9, "{r0:?}");
    assert!(r0.integral <= 5.5e-4);
    for r in &report.rows[1..] {
        let ratio = (r.integral / r0.integral) / (r.eta / r0.eta);
        assert!((ratio - 1.0).abs() < 0.1);
    }
}

#[test]
fn identical_plan_reports_zero_gaps() {
    let grid = PeriodicGrid::new(2, 32).unwrap();
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams::default());
    let u0 = cos_x(grid);
    let report = stability_experiment(
        &spec,
        &u0,
        0.25,
        1.0 / 256.0,
        &PerturbationPlan::Identical { count: 3 },
        &CascadeSchedule::diagonal(vec![0.5, 0.25]),
        &CascadeOptions::default(),
    )
    .unwrap();
    assert!(report.solution_gaps.iter().all(|&g| g == 0.0));
    assert_eq!(report.verdict, StabilityVerdict::NotMonotone);
}

#[test]
fn data_perturbations_converge_monotonically() {
    let grid = PeriodicGrid::new(2, 64).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let report = stability_experiment(
        &spec,
        &cos_x(grid),
        0.5,
        0.25 / 64.0,
        &PerturbationPlan::DataPerturbed { ns: vec![1.0, 2.0, 4.0, 8.0] },
        &shear_schedule(64),
        &CascadeOptions::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, StabilityVerdict::MonotoneConvergent, "{report:?}");
}

#[test]
fn non_convergent_plans_are_rejected() {
    let grid = PeriodicGrid::new(2, 64).unwrap();
    let spec = VectorFieldSpec::BvShear(ShearParams::default());
    let err = stability_experiment(
        &spec,
        &cos_x(grid),
        0.25,
        1.0 / 256.0,
        &PerturbationPlan::Mollified { deltas: vec![0.125, 0.25] },
        &shear_schedule(64),
        &CascadeOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::PremiseViolated { .. }), "{err}");
}

#[test]
fn under_resolved_schedule_is_rejected() {
    let grid = PeriodicGrid::new(2, 32).unwrap();
    let spec = VectorFieldSpec::SmoothSwirl(SwirlParams::default());
    let err = cascade_solve(
        &spec,
        &cos_x(grid),
        0.1,
        1.0 / 256.0,
        &CascadeSchedule::diagonal(vec![0.5, 0.1]),
        &CascadeOptions::default(),
    )
    .unwrap_err();
    match err {
        Error::UnderResolved { eps, min_eps } => {
            assert_eq!(eps, 0.1);
            assert!((min_eps - 0.25).abs() < 1e-15);
        }
        other => panic!("{other}"),
    }
}
