use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use roughflow::torus::io::{read_container, write_field_csv};
use roughflow_cli::{run, Command, ExperimentConfig, RunError, RunOptions, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "roughflow", version, about = "Transport experiments with rough vector fields on the torus")]
struct Cli {
    /// JSON experiment configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit 0 on non-converged results.
    #[arg(long, global = true)]
    allow_partial: bool,
    /// Overrides the configured points per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classical, viscous or density solve.
    Solve,
    /// RK4 characteristics from the configured start points.
    Characteristics,
    /// Commutator norm over an eps sweep.
    Commutator,
    /// Double-mollification cascade.
    Cascade,
    /// Weak defects of beta(u) on a cascade solution.
    Renormalize,
    /// Injected-remainder uniqueness probe.
    Uniqueness,
    /// Perturbation stability experiment.
    Stability,
    /// Flow map extraction and multiplicativity defect.
    Flow,
    /// Forward-backward return errors against a smooth control.
    Reverse,
    /// Osgood integral classification.
    Osgood,
    /// Modulus of continuity of the truncated Weierstrass sum.
    Weierstrass,
    /// Lacunary L1 growth and dilation identity.
    Lacunary,
    /// Condition report for the configured field.
    CheckField,
    /// Print one frame component of a container as CSV.
    Dump {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        frame: usize,
        #[arg(long, default_value_t = 0)]
        component: usize,
    },
}

impl Cmd {
    fn command(&self) -> Option<Command> {
        Some(match self {
            Self::Solve => Command::Solve,
            Self::Characteristics => Command::Characteristics,
            Self::Commutator => Command::Commutator,
            Self::Cascade => Command::Cascade,
            Self::Renormalize => Command::Renormalize,
            Self::Uniqueness => Command::Uniqueness,
            Self::Stability => Command::Stability,
            Self::Flow => Command::Flow,
            Self::Reverse => Command::Reverse,
            Self::Osgood => Command::Osgood,
            Self::Weierstrass => Command::Weierstrass,
            Self::Lacunary => Command::Lacunary,
            Self::CheckField => Command::CheckField,
            Self::Dump { .. } => return None,
        })
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = cli.grid {
        cfg.grid = grid;
    }
    Ok(cfg)
}

fn dump(path: &PathBuf, frame: usize, component: usize) -> anyhow::Result<()> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let c = read_container(std::io::BufReader::new(file))?;
    let field = c
        .frames
        .get(frame)
        .and_then(|f| f.get(component))
        .ok_or_else(|| anyhow!("no component {component} in frame {frame}"))?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    write_field_csv(&mut lock, field)?;
    lock.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::Dump { path, frame, component } = &cli.command {
        return match dump(path, *frame, *component) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    let command = cli.command.command().expect("experiment subcommand");
    let outcome = load_config(&cli)
        .map_err(RunError::Config)
        .and_then(|cfg| run(command, &cfg, &RunOptions { allow_partial: cli.allow_partial, out_dir: cli.out.clone() }));
    match outcome {
        Ok(summary) => {
            if !cli.quiet {
                println!("{}: {} ({})", command.name(), summary.status, summary.out_dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
