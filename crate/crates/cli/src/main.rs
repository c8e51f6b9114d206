mod config;
mod error;
mod experiments;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    BoundaryArg, Command, Format, Multiplicity, Process, RootsKind, RunConfig, SchemeArg, Suite,
};
use error::CliError;

/// Root-system identities, Dunkl process simulation and freezing experiments.
#[derive(Parser, Debug)]
#[command(name = "dunkl-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check an identity at many generic points and write a residual report.
    Verify {
        suite: Suite,
        #[command(flatten)]
        system: SystemArgs,
        /// Rational arithmetic; residuals must vanish exactly.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Polynomial part of the test function, in x1..xN.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Simulate an ensemble of radial or jumping Dunkl paths.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        k_scale: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ensemble: Option<usize>,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Starting point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        process: Option<Process>,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        #[arg(long, value_enum)]
        boundary: Option<BoundaryArg>,
        /// Extra observation times, comma separated.
        #[arg(long, value_delimiter = ',')]
        observe: Option<Vec<f64>>,
        #[arg(long)]
        record_steps: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Scaled radial positions at large multiplicity against Hermite zeros.
    Freeze {
        #[arg(long)]
        n: Option<usize>,
        /// Increasing multiplicities, comma separated.
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<f64>>,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        ensemble: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Integrate the deterministic limit instead of sampling.
        #[arg(long)]
        ode: bool,
        #[arg(long)]
        tol: Option<f64>,
        /// Type B with Laguerre zeros of this parameter as reference.
        #[arg(long, allow_negative_numbers = true)]
        laguerre_a: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Zeros of Hermite or Laguerre polynomials with identity residuals.
    Roots {
        kind: Option<RootsKind>,
        n: Option<usize>,
        #[arg(long = "a", allow_negative_numbers = true)]
        a: Option<f64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Print the JSON schema of configuration files.
    Schema,
}

#[derive(Args, Debug, Default)]
struct SystemArgs {
    /// A, B, D or I2.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// Comma separated; fractions such as 1/2 are exact.
    #[arg(long, visible_alias = "k", value_delimiter = ',')]
    multiplicities: Option<Vec<String>>,
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct IoArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl SystemArgs {
    fn apply(self, c: &mut RunConfig) {
        c.family = self.family;
        c.rank = self.rank;
        c.multiplicities = self
            .multiplicities
            .map(|v| v.into_iter().map(Multiplicity::Text).collect());
        c.omega = self.omega;
    }
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

/// Flags as a sparse config, plus the config file path.
fn flags_config(cmd: Cmd) -> (Command, Option<PathBuf>, RunConfig) {
    let mut c = RunConfig::default();
    let (command, io) = match cmd {
        Cmd::Verify { suite, system, exact, tol, points, poly, lambda, seed, io } => {
            system.apply(&mut c);
            c.suite = Some(suite);
            c.exact = flag(exact);
            c.tol = tol;
            c.points = points;
            c.poly = poly;
            c.lambda = lambda;
            c.seed = seed;
            (Command::Verify, io)
        }
        Cmd::Simulate {
            system, k_scale, seed, ensemble, t, dt, x0, process, scheme, boundary, observe, record_steps, io,
        } => {
            system.apply(&mut c);
            c.k_scale = k_scale;
            c.seed = seed;
            c.ensemble = ensemble;
            c.t = t;
            c.dt = dt;
            c.x0 = x0;
            c.process = process;
            c.scheme = scheme;
            c.boundary = boundary;
            c.observe = observe;
            c.record_steps = flag(record_steps);
            (Command::Simulate, io)
        }
        Cmd::Freeze { n, k_list, t, ensemble, seed, ode, tol, laguerre_a, io } => {
            c.n = n;
            c.k_list = k_list;
            c.t = t;
            c.ensemble = ensemble;
            c.seed = seed;
            c.ode = flag(ode);
            c.tol = tol;
            c.laguerre_a = laguerre_a;
            (Command::Freeze, io)
        }
        Cmd::Roots { kind, n, a, io } => {
            c.roots = kind;
            c.n = n;
            c.laguerre_a = a;
            (Command::Roots, io)
        }
        Cmd::Schema => unreachable!("handled before"),
    };
    c.out = io.out;
    c.format = io.format;
    (command, io.config, c)
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    if matches!(cmd, Cmd::Schema) {
        print!("{}", output::json(&config::schema()));
        return Ok(());
    }
    let threads = match std::env::var("DUNKL_LAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Some(t),
            _ => return Err(CliError::Config(format!("DUNKL_LAB_THREADS must be a positive integer, got '{v}'"))),
        },
        Err(_) => None,
    };
    let (command, path, flags) = flags_config(cmd);
    let file = match &path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    file.expect_command(command)?;
    let mut cfg = file.overlay(flags);
    cfg.command = Some(command);
    dunkl_core::sde::with_thread_cap(threads, move || dispatch(command, cfg))
}

fn dispatch(command: Command, cfg: RunConfig) -> Result<(), CliError> {
    match command {
        Command::Verify => {
            let suite = cfg
                .suite
                .ok_or_else(|| CliError::Config("verify needs a suite".into()))?;
            let cfg = verify::resolve(cfg, suite)?;
            let rep = verify::run(&cfg, suite)?;
            let name = format!("{}.{}", suite.name(), match cfg.format() {
                Format::Json => "json",
                Format::Csv => "csv",
            });
            let body = verify::render(&rep, cfg.format());
            output::emit(cfg.out.as_deref(), &[(&name, body), ("config.json", output::json(&cfg.to_json()))], &name)?;
            eprintln!(
                "{} on {}: {} points, max rel residual {:.3e}{}",
                rep.identity,
                rep.family,
                rep.points,
                rep.max_rel_residual,
                rep.exact_residual.as_ref().map(|e| format!(", exact residual {e}")).unwrap_or_default()
            );
            if rep.passed == Some(true) {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "{} exceeds tolerance {:e}",
                    rep.identity,
                    rep.tolerance.unwrap_or(0.0)
                )))
            }
        }
        Command::Simulate => experiments::simulate(&experiments::resolve_simulate(cfg)?),
        Command::Freeze => experiments::freeze(&experiments::resolve_freeze(cfg)?),
        Command::Roots => experiments::roots(&experiments::resolve_roots(cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
