//! Experiment runner behind the `roughflow` binary.
//!
//! [`execute`] does the numerics and returns every artifact in memory;
//! [`run`] validates the configuration first, so a bad configuration never
//! leaves files behind, and then writes the artifacts to the output directory.

pub mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use roughflow::approximable::{
    beta_battery, cascade_solve, commutator_sweep, renormalization_defect, stability_experiment, uniqueness_probe,
    StabilityVerdict, UniquenessOptions,
};
use roughflow::flow::{
    extract_flow_map, irreversibility_evidence, multiplicativity_defect, reversibility_probe, FlowConfig, ReturnRow,
};
use roughflow::osgood::{
    dilation_identity_defect, dyadic_range, lacunary_l1_growth, osgood_classify, weierstrass_modulus,
};
use roughflow::solver::{
    default_dt, solve_characteristics, solve_classical_transport, solve_density, solve_viscous, weak_defect_battery,
    ViscousOptions,
};
use roughflow::torus::io::write_container;
use roughflow::zoo::{check_conditions, sample_field, Verdict};
use roughflow::{lp_norm, Interpolation, ScalarField, Trajectory};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::ExperimentConfig;

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "ROUGHFLOW_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "roughflow-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Characteristics,
    Commutator,
    Cascade,
    Renormalize,
    Uniqueness,
    Stability,
    Flow,
    Reverse,
    Osgood,
    Weierstrass,
    Lacunary,
    CheckField,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Self::Solve,
        Self::Characteristics,
        Self::Commutator,
        Self::Cascade,
        Self::Renormalize,
        Self::Uniqueness,
        Self::Stability,
        Self::Flow,
        Self::Reverse,
        Self::Osgood,
        Self::Weierstrass,
        Self::Lacunary,
        Self::CheckField,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Characteristics => "characteristics",
            Self::Commutator => "commutator",
            Self::Cascade => "cascade",
            Self::Renormalize => "renormalize",
            Self::Uniqueness => "uniqueness",
            Self::Stability => "stability",
            Self::Flow => "flow",
            Self::Reverse => "reverse",
            Self::Osgood => "osgood",
            Self::Weierstrass => "weierstrass",
            Self::Lacunary => "lacunary",
            Self::CheckField => "check-field",
        }
    }
}

/// How a run failed; decides the exit status.
#[derive(Debug)]
pub enum RunError {
    /// Bad configuration; nothing was written.
    Config(anyhow::Error),
    /// Guard violation, I/O failure, or a non-converged result.
    Numerical(anyhow::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e:#}"),
            Self::Numerical(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Parameter errors raised inside the library are configuration errors too.
fn classify(e: roughflow::Error) -> RunError {
    use roughflow::Error as E;
    match e {
        E::InvalidParameter { .. }
        | E::InvalidGrid(_)
        | E::GridMismatch(_)
        | E::NonPositiveModulus { .. }
        | E::Unsupported(_) => RunError::Config(e.into()),
        other => RunError::Numerical(other.into()),
    }
}

trait Classify<T> {
    fn guard(self) -> Result<T, RunError>;
}

impl<T> Classify<T> for roughflow::Result<T> {
    fn guard(self) -> Result<T, RunError> {
        self.map_err(classify)
    }
}

/// A CSV table held as formatted strings.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner().map_err(|e| anyhow!("{e}"))?)
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

/// Everything a command produces, before anything touches the disk.
#[derive(Clone, Debug)]
pub struct Artifacts {
    /// `ok`, `converged` or `not_converged`.
    pub status: &'static str,
    pub results: Value,
    pub tables: Vec<(String, Table)>,
    /// Containers and field dumps, by file name.
    pub extra_files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn ok(results: Value) -> Self {
        Self { status: "ok", results, tables: Vec::new(), extra_files: Vec::new() }
    }

    fn table(mut self, name: &str, t: Table) -> Self {
        self.tables.push((format!("{name}.csv"), t));
        self
    }

    fn file(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.extra_files.push((name.to_string(), bytes));
        self
    }

    pub fn converged(&self) -> bool {
        self.status != "not_converged"
    }
}

/// The serialized report: config echo, versions, status and results.
#[derive(Serialize)]
pub struct Report<'a> {
    pub command: &'static str,
    pub tool: ToolVersions,
    pub config: &'a ExperimentConfig,
    pub status: &'static str,
    pub results: &'a Value,
}

#[derive(Serialize)]
pub struct ToolVersions {
    pub name: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
}

impl ToolVersions {
    pub fn current() -> Self {
        Self { name: "roughflow", version: env!("CARGO_PKG_VERSION"), core_version: roughflow::VERSION }
    }
}

pub fn report_json(command: Command, config: &ExperimentConfig, artifacts: &Artifacts) -> anyhow::Result<Vec<u8>> {
    let report = Report {
        command: command.name(),
        tool: ToolVersions::current(),
        config,
        status: artifacts.status,
        results: &artifacts.results,
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub allow_partial: bool,
    /// Overrides the configured directory.
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub status: &'static str,
    pub files: Vec<PathBuf>,
}

/// Validate, compute, write. A non-converged result still writes its
/// artifacts and then fails unless `allow_partial` is set.
pub fn run(command: Command, config: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary, RunError> {
    config.validate().map_err(RunError::Config)?;
    let artifacts = execute(command, config)?;
    let out_dir =
        opts.out_dir.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let files = write_artifacts(&out_dir, command, config, &artifacts).map_err(RunError::Numerical)?;
    if !artifacts.converged() && !opts.allow_partial {
        return Err(RunError::Numerical(anyhow!(
            "{} did not converge; artifacts written to {} (pass --allow-partial to accept)",
            command.name(),
            out_dir.display()
        )));
    }
    Ok(RunSummary { out_dir, status: artifacts.status, files })
}

fn write_artifacts(
    dir: &Path,
    command: Command,
    config: &ExperimentConfig,
    a: &Artifacts,
) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> anyhow::Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
        Ok(())
    };
    put("report.json", &report_json(command, config, a)?)?;
    for (name, t) in &a.tables {
        put(name, &t.to_csv()?)?;
    }
    for (name, bytes) in &a.extra_files {
        put(name, bytes)?;
    }
    Ok(files)
}

/// Run the numerics for a validated configuration.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    match command {
        Command::Solve => solve(cfg),
        Command::Characteristics => characteristics(cfg),
        Command::Commutator => commutator(cfg),
        Command::Cascade => cascade(cfg),
        Command::Renormalize => renormalize(cfg),
        Command::Uniqueness => uniqueness(cfg),
        Command::Stability => stability(cfg),
        Command::Flow => flow(cfg),
        Command::Reverse => reverse(cfg),
        Command::Osgood => osgood(cfg),
        Command::Weierstrass => weierstrass(cfg),
        Command::Lacunary => lacunary(cfg),
        Command::CheckField => check_field(cfg),
    }
}

fn cfg_err(e: anyhow::Error) -> RunError {
    RunError::Config(e)
}

fn encode(traj: &Trajectory) -> Result<Vec<u8>, RunError> {
    let mut buf = Vec::new();
    traj.write_container(&mut buf).guard()?;
    Ok(buf)
}

struct Setup {
    grid: roughflow::PeriodicGrid,
    b: roughflow::DiscreteVectorField,
    u0: ScalarField,
    dt: f64,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, RunError> {
    let grid = cfg.periodic_grid().map_err(cfg_err)?;
    let b = sample_field(&cfg.field, &grid).guard()?;
    let u0 = cfg.initial.sample(&grid, cfg.seed);
    let dt = cfg.dt.unwrap_or_else(|| default_dt(&b));
    Ok(Setup { grid, b, u0, dt })
}

fn norm_table(traj: &Trajectory) -> Result<(Table, f64), RunError> {
    let mut t = Table::new(&["t", "l1", "linf", "mean_re"]);
    let sup0 = lp_norm(traj.initial(), f64::INFINITY).guard()?;
    let mut overshoot = f64::NEG_INFINITY;
    for (time, u) in traj.times().iter().zip(traj.snapshots()) {
        let sup = lp_norm(u, f64::INFINITY).guard()?;
        overshoot = overshoot.max(sup - sup0);
        t.push(row![time, lp_norm(u, 1.0).guard()?, sup, u.mean().re]);
    }
    Ok((t, overshoot))
}

fn solve(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let opts = cfg.solve_options(Interpolation::Linear);
    let traj = match cfg.solve.mode {
        config::SolveMode::Classical => solve_classical_transport(&s.b, &s.u0, cfg.horizon, s.dt, &opts),
        config::SolveMode::Viscous => {
            let visc = ViscousOptions { heat_every: cfg.solve.heat_every };
            solve_viscous(&s.b, &s.u0, cfg.solve.viscosity, cfg.horizon, s.dt, &opts, &visc)
        }
        config::SolveMode::Density => solve_density(&s.b, &s.u0, cfg.horizon, s.dt, &opts),
    }
    .guard()?;
    let (norms, overshoot) = norm_table(&traj)?;
    let mut final_csv = Vec::new();
    roughflow::torus::io::write_field_csv(&mut final_csv, traj.last()).guard()?;
    let results = json!({
        "dt": s.dt,
        "interp": opts.interp,
        "snapshots": traj.len(),
        "initial_l1": lp_norm(traj.initial(), 1.0).guard()?,
        "final_l1": lp_norm(traj.last(), 1.0).guard()?,
        "initial_linf": lp_norm(traj.initial(), f64::INFINITY).guard()?,
        "final_linf": lp_norm(traj.last(), f64::INFINITY).guard()?,
        "initial_mean": traj.initial().mean().re,
        "final_mean": traj.last().mean().re,
        "max_linf_overshoot": overshoot,
        "weak_defect": weak_defect_battery(&traj, &s.b).guard()?,
    });
    let mut a = Artifacts::ok(results).table("norms", norms).file("trajectory.tfc", encode(&traj)?);
    a.extra_files.push(("final.csv".into(), final_csv));
    Ok(a)
}

fn characteristics(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let c = &cfg.characteristics;
    let dim = c.starts.first().map_or(0, Vec::len);
    let mut header = vec!["path".to_string(), "t".to_string()];
    header.extend((0..dim).map(|i| format!("z{i}")));
    let mut table = Table { header, rows: Vec::new() };
    let mut paths = Vec::new();
    for (k, x0) in c.starts.iter().enumerate() {
        let path = solve_characteristics(&cfg.field, x0, cfg.horizon, c.dt, c.reverse).guard()?;
        for (t, z) in path.times.iter().zip(&path.points) {
            let mut r = row![k, t];
            r.extend(z.iter().map(f64::to_string));
            table.push(r);
        }
        paths.push(json!({ "start": path.start, "end": path.end(), "singular_grazing": path.singular_grazing }));
    }
    Ok(Artifacts::ok(json!({ "paths": paths })).table("paths", table))
}

/// `2^-k` for `k ≥ 2` down to the finest resolved scale.
fn dyadic_eps(cfg: &ExperimentConfig) -> Result<Vec<f64>, RunError> {
    if !cfg.eps.is_empty() {
        return Ok(cfg.eps.clone());
    }
    let finest = cfg.mollifier().map_err(cfg_err)?.min_eps(&cfg.periodic_grid().map_err(cfg_err)?);
    Ok((2..30).map(|k| 0.5f64.powi(k)).take_while(|&e| e >= finest).collect())
}

fn commutator(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let eps = dyadic_eps(cfg)?;
    let rows = commutator_sweep(&cfg.field, &s.u0, &eps, &cfg.mollifier().map_err(cfg_err)?).guard()?;
    let mut table = Table::new(&["eps", "l1_norm"]);
    rows.iter().for_each(|r| table.push(row![r.eps, r.l1_norm]));
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].l1_norm / w[1].l1_norm).collect();
    let tv: f64 = s.b.components().iter().map(roughflow::discrete_tv).sum();
    let results = json!({
        "rows": rows,
        "decay_ratios": ratios,
        "field_tv": tv,
        "u_sup": lp_norm(&s.u0, f64::INFINITY).guard()?,
    });
    Ok(Artifacts::ok(results).table("commutator", table))
}

fn cascade_run(cfg: &ExperimentConfig) -> Result<(Setup, roughflow::CascadeResult), RunError> {
    let s = setup(cfg)?;
    let schedule = cfg.schedule().map_err(cfg_err)?;
    let opts = cfg.cascade_options().map_err(cfg_err)?;
    let result = cascade_solve(&cfg.field, &s.u0, cfg.horizon, s.dt, &schedule, &opts).guard()?;
    Ok((s, result))
}

fn gap_table(summary: &roughflow::CascadeSummary) -> Table {
    let mut t = Table::new(&["stage", "eps", "delta", "hs_gap"]);
    for (k, gap) in summary.hs_gaps.iter().enumerate() {
        t.push(row![k + 1, summary.eps_schedule[k + 1], summary.delta_schedule[k + 1], gap]);
    }
    t
}

fn status_of(converged: bool) -> &'static str {
    if converged {
        "converged"
    } else {
        "not_converged"
    }
}

fn cascade(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let (s, r) = cascade_run(cfg)?;
    let results = json!({
        "dt": s.dt,
        "summary": r.summary,
        "final_l1": lp_norm(r.solution.last(), 1.0).guard()?,
        "final_linf": lp_norm(r.solution.last(), f64::INFINITY).guard()?,
    });
    let mut a = Artifacts::ok(results)
        .table("hs_gaps", gap_table(&r.summary))
        .file("solution.tfc", encode(&r.solution)?)
        .file("stage.tfc", encode(&r.stage)?);
    a.status = status_of(r.summary.converged);
    Ok(a)
}

fn renormalize(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let (s, r) = cascade_run(cfg)?;
    let [lo, hi] = cfg.renormalize.clamp;
    let mut table = Table::new(&["beta", "defect"]);
    let mut defects = serde_json::Map::new();
    let base = weak_defect_battery(&r.solution, &s.b).guard()?;
    table.push(row!["identity", base]);
    for beta in beta_battery(lo, hi) {
        let d = renormalization_defect(&r, &s.b, &beta).guard()?;
        table.push(row![beta.name(), d]);
        defects.insert(beta.name().into(), json!(d));
    }
    let results = json!({
        "dt": s.dt,
        "weak_defect": base,
        "renormalization_defects": defects,
        "cascade_converged": r.summary.converged,
        "hs_gaps": r.summary.hs_gaps,
    });
    let mut a = Artifacts::ok(results).table("renormalization", table);
    a.status = status_of(r.summary.converged);
    Ok(a)
}

fn uniqueness(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let u = &cfg.uniqueness;
    let opts = UniquenessOptions {
        seed: cfg.seed,
        max_mode: u.max_mode,
        delta: u.delta,
        mollifier: cfg.mollifier().map_err(cfg_err)?,
        solve: cfg.solve_options(Interpolation::Linear),
    };
    let report = uniqueness_probe(&cfg.field, &s.grid, cfg.horizon, s.dt, &u.etas, &opts).guard()?;
    let mut table = Table::new(&["eta", "integral", "bound"]);
    report.rows.iter().for_each(|r| table.push(row![r.eta, r.integral, r.bound]));
    let results = json!({ "dt": s.dt, "report": report });
    Ok(Artifacts::ok(results).table("uniqueness", table))
}

fn stability(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let schedule = cfg.schedule().map_err(cfg_err)?;
    let opts = cfg.cascade_options().map_err(cfg_err)?;
    let report =
        stability_experiment(&cfg.field, &s.u0, cfg.horizon, s.dt, &cfg.stability, &schedule, &opts).guard()?;
    let mut table = Table::new(&["n", "field_l1_gap", "div_l1_gap", "solution_gap"]);
    for (n, ((f, d), u)) in report.field_l1_gaps.iter().zip(&report.div_l1_gaps).zip(&report.solution_gaps).enumerate()
    {
        table.push(row![n, f, d, u]);
    }
    let results = json!({
        "dt": s.dt,
        "report": report,
        "strictly_decreasing": report.verdict == StabilityVerdict::MonotoneConvergent,
    });
    Ok(Artifacts::ok(results).table("stability", table))
}

fn flow(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let method = match cfg.flow.method {
        config::FlowMethod::Classical => FlowConfig::classical(cfg.solve_options(Interpolation::Cubic)),
        config::FlowMethod::Cascade => {
            FlowConfig::cascade(cfg.schedule().map_err(cfg_err)?, cfg.cascade_options().map_err(cfg_err)?)
        }
    }
    .with_dt(s.dt);
    let map = extract_flow_map(&cfg.field, cfg.horizon, &s.grid, &method).guard()?;
    let g = ScalarField::from_fn(s.grid, |x| (2.0 * std::f64::consts::PI * (x[0] + x[1])).sin());
    let defect = multiplicativity_defect(&cfg.field, &s.u0, &g, cfg.horizon, &method).guard()?;
    let mut csv = Vec::new();
    map.write_csv(&mut csv).guard()?;
    let results = json!({
        "dt": s.dt,
        "multiplicativity_defect": defect,
        "max_modulus_defect": map.max_modulus_defect(),
        "modulus_defect_l1": map.modulus_defect_l1(),
        "flagged_nodes": map.flagged_count(),
        "histogram_discrepancy": map.histogram_discrepancy(cfg.flow.histogram_bins).guard()?,
    });
    let mut a = Artifacts::ok(results);
    a.extra_files.push(("flow_map.csv".into(), csv));
    Ok(a)
}

fn reverse(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let s = setup(cfg)?;
    let r = &cfg.reverse;
    let mut eps = r.viscosities.clone();
    eps.push(0.0);
    let opts = cfg.solve_options(Interpolation::Cubic);
    let visc = ViscousOptions { heat_every: r.heat_every };
    let probe = reversibility_probe(&cfg.field, &s.u0, cfg.horizon, &eps, cfg.dt, &opts, &visc).guard()?;
    let control = reversibility_probe(&r.control, &s.u0, cfg.horizon, &eps, cfg.dt, &opts, &visc).guard()?;
    let evidence = irreversibility_evidence(&control, &probe, r.factor).guard()?;
    let mut table = Table::new(&["run", "eps", "return_error"]);
    let mut add =
        |name: &str, rows: &[ReturnRow]| rows.iter().for_each(|x| table.push(row![name, x.eps, x.return_error]));
    add("probe", &probe);
    add("control", &control);
    let results = json!({ "probe": probe, "control": control, "evidence": evidence });
    Ok(Artifacts::ok(results).table("return_errors", table))
}

fn osgood(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let report = osgood_classify(&cfg.osgood.modulus, &cfg.osgood.deltas).guard()?;
    let mut table = Table::new(&["delta", "integral"]);
    report.deltas.iter().zip(&report.integrals).for_each(|(d, i)| table.push(row![d, i]));
    Ok(Artifacts::ok(json!({ "report": report })).table("integrals", table))
}

fn weierstrass(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let w = &cfg.weierstrass;
    let report = weierstrass_modulus(w.terms, &dyadic_range(w.coarsest, w.finest)).guard()?;
    let mut table = Table::new(&["h", "sup_difference"]);
    report.rows.iter().for_each(|r| table.push(row![r.h, r.sup_difference]));
    Ok(Artifacts::ok(json!({ "report": report })).table("modulus", table))
}

fn lacunary(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let l = &cfg.lacunary;
    let report = lacunary_l1_growth(&l.terms, l.dilation_max_m).guard()?;
    let mut growth = Table::new(&["terms", "l1_norm"]);
    report.rows.iter().for_each(|r| growth.push(row![r.terms, r.l1_norm]));
    let mut identity = Table::new(&["terms", "m", "defect"]);
    let mut checks = Vec::new();
    for &[k, m] in &l.identity_checks {
        let d = dilation_identity_defect(k, m).guard()?;
        identity.push(row![k, m, d]);
        checks.push(json!({ "terms": k, "m": m, "defect": d }));
    }
    let results = json!({ "report": report, "dilation_identity": checks });
    Ok(Artifacts::ok(results).table("lacunary", growth).table("dilation_identity", identity))
}

fn check_field(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let grid = cfg.periodic_grid().map_err(cfg_err)?;
    let report = check_conditions(&cfg.field, &grid).guard()?;
    let b = sample_field(&cfg.field, &grid).guard()?;
    let mut buf = Vec::new();
    let comps: Vec<&ScalarField> = b.components().iter().collect();
    write_container(&mut buf, &[0.0], &[comps]).guard()?;
    let mut table = Table::new(&["quantity", "coarse", "refined", "growth"]);
    table.push(row!["div_sup", report.div_sup_estimate, report.refined_div_sup_estimate, report.div_growth]);
    table.push(row!["w11_star", report.w11_star_estimate, report.refined_w11_star_estimate, report.w11_growth]);
    let results = json!({
        "kind": cfg.field.kind_name(),
        "metadata": cfg.field.metadata(),
        "report": report,
        "conforming": report.verdict == Verdict::Conforming,
    });
    Ok(Artifacts::ok(results).table("conditions", table).file("field.tfc", buf))
}
