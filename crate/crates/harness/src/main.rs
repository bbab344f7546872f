use clap::{Args, Parser, Subcommand};
use cubic_ist_harness::config::PotentialSpec;
use cubic_ist_harness::{emit, run, thread_cap, Command, HarnessError, Result, RunConfig, THREADS_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

/// Forward and inverse scattering verification suites.
#[derive(Parser)]
#[command(name = "cubic-ist", version)]
struct Cli {
    /// Run configuration (JSON); flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Primary output table (CSV); secondary tables are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report records (CSV); printed to stdout when absent.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Verb,
}

#[derive(Args)]
struct PotentialArg {
    /// Potential descriptor (JSON).
    #[arg(long)]
    potential: Option<PathBuf>,
}

#[derive(Args)]
struct InverseArgs {
    /// Spectral data (JSON).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    /// Quadrature nodes.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Identity families of the generalized exponentials at random points.
    VerifyIdentities {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Transition matrix and structure checks on the λ-grid.
    Forward(PotentialArg),
    /// Bound-state scan with the finiteness-condition diagnostic.
    BoundStates(PotentialArg),
    /// Reconstruction of F and q from spectral data.
    Invert(InverseArgs),
    /// Invert, then map the reconstruction forward again.
    Roundtrip(InverseArgs),
    /// Jump relations on the rays.
    JumpResidual {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        /// Ray parameter; repeatable.
        #[arg(long)]
        t: Vec<f64>,
    },
}

fn load_potential(arg: &PotentialArg, cfg: &mut RunConfig) -> Result<()> {
    if let Some(p) = &arg.potential {
        let text = cubic_ist_harness::config::read_text(p)?;
        cfg.potential = cubic_ist_harness::config::parse_json::<PotentialSpec>(&text, "potential")?;
    }
    Ok(())
}

fn apply_inverse(a: &InverseArgs, cfg: &mut RunConfig) {
    if let Some(d) = &a.data {
        cfg.data = Some(d.clone());
    }
    let g = &mut cfg.x_grid;
    g.min = a.x_min.unwrap_or(g.min);
    g.max = a.x_max.unwrap_or(g.max);
    g.dx = a.dx.unwrap_or(g.dx);
    cfg.inverse.nodes = a.nodes.unwrap_or(cfg.inverse.nodes);
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cmd = match &cli.command {
        Verb::VerifyIdentities { samples, radius } => {
            cfg.identities.samples = samples.unwrap_or(cfg.identities.samples);
            cfg.identities.radius = radius.unwrap_or(cfg.identities.radius);
            Command::VerifyIdentities
        }
        Verb::Forward(p) => {
            load_potential(p, &mut cfg)?;
            Command::Forward
        }
        Verb::BoundStates(p) => {
            load_potential(p, &mut cfg)?;
            Command::BoundStates
        }
        Verb::Invert(a) => {
            apply_inverse(a, &mut cfg);
            Command::Invert
        }
        Verb::Roundtrip(a) => {
            apply_inverse(a, &mut cfg);
            Command::Roundtrip
        }
        Verb::JumpResidual { potential, x, t } => {
            load_potential(potential, &mut cfg)?;
            cfg.jump.x = x.unwrap_or(cfg.jump.x);
            if !t.is_empty() {
                cfg.jump.t = Some(t.clone());
            }
            Command::JumpResidual
        }
    };
    if let Some(c) = cfg.command {
        if c != cmd {
            return Err(HarnessError::usage("command", format!("config is for `{}`, not `{}`", c.name(), cmd.name())));
        }
    }
    cfg.command = Some(cmd);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.out = cli.out.clone().or(cfg.out);
    cfg.report = cli.report.clone().or(cfg.report);
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<bool> {
    if let Some(n) = thread_cap(std::env::var(THREADS_ENV).ok().as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::usage(THREADS_ENV, e.to_string()))?;
    }
    let cfg = configure(cli)?;
    let outcome = run(&cfg)?;
    for d in &outcome.diagnostics {
        eprintln!("{} = {}", d.name, d.value);
    }
    emit(&cfg, &outcome, &mut std::io::stdout().lock())?;
    let failed: Vec<&str> = outcome.records.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    if !failed.is_empty() {
        eprintln!("{} check(s) failed: {}", failed.len(), failed.join("; "));
    }
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
