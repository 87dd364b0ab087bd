use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rieszkit::maximal::maximal_with;
use rieszkit::morrey::indicator_weight;
use rieszkit::verify::families::{gaussian, random_bump};
use rieszkit::verify::{oracle_gate, CheckName, GateConfig};
use rieszkit::{
    morrey_constant, power_weight, random_weight, riesz_direct, riesz_fft, Field, GridSpec, MorreyConvention,
    RadiusLadder, SpectralBox,
};
use rieszkit_cli::config::RunConfig;
use rieszkit_cli::io::{read_field, write_field};
use rieszkit_cli::report::{curves_csv, summary, write_text, JsonReport};
use rieszkit_cli::run;

/// Riesz potentials, maximal functions, Morrey constants and fractional
/// Laplacians on uniform grids, and a harness for the weighted estimates
/// relating them.
#[derive(Parser)]
#[command(name = "rieszkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Riesz potential R_alpha f of a field file.
    Riesz {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_enum, default_value_t = Method::Fft)]
        method: Method,
    },
    /// Centered maximal function of a field file.
    Maximal {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_enum, default_value_t = Ladder::Default)]
        ladder: Ladder,
    },
    /// Morrey constant of a weight file, printed as JSON.
    Morrey {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Convention::Avg)]
        morrey_convention: Convention,
        /// Include every scanned ball in the output.
        #[arg(long)]
        scan: bool,
    },
    /// Fractional Laplacian (-Delta)^(alpha/2) of a field file.
    Fraclap {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        io: InOut,
        /// Padding factor of the periodic box; 1 treats the grid as periodic.
        #[arg(long, default_value_t = 2)]
        pad: usize,
    },
    /// Writes a probe field to a file.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        shape: Shape,
    },
    /// Runs one check, or `all`, over the families of a run configuration.
    Verify {
        check: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compares the fast operators with their brute-force oracles.
    OracleGate {
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.json`.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Overrides `output.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Overrides `conventions.morrey`.
    #[arg(long, value_enum)]
    morrey_convention: Option<Convention>,
    /// Skips the oracle gate.
    #[arg(long)]
    no_gate: bool,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct Shape {
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    cutoff: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.15)]
    smoothness: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Fft,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ladder {
    Default,
    /// Provably within 5% of the exhaustive maximal function.
    Bounded,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Avg,
    Raw,
}

impl From<Convention> for MorreyConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Avg => MorreyConvention::Avg,
            Convention::Raw => MorreyConvention::Raw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Power,
    Indicator,
    RandomWeight,
    Bump,
}

/// Exit status 1 for a violation or a failed check, 2 for bad input.
enum Failure {
    Violation(String),
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Riesz { alpha, io, method } => {
            let f = read_field(&io.input)?;
            let v = match method {
                Method::Fft => riesz_fft(&f, alpha)?,
                Method::Direct => riesz_direct(&f, alpha)?,
            };
            write_field(&v, &io.out)?;
        }
        Command::Maximal { io, ladder } => {
            let f = read_field(&io.input)?;
            let ladder = match ladder {
                Ladder::Default => RadiusLadder::default_for(&f.spec),
                Ladder::Bounded => RadiusLadder::bounded(&f.spec, 0.05)?,
                Ladder::Full => RadiusLadder::full(&f.spec),
            };
            write_field(&maximal_with(&f, &ladder), &io.out)?;
        }
        Command::Morrey { input, p, alpha, morrey_convention, scan } => {
            let b = read_field(&input)?;
            b.check_nonnegative("b")?;
            let mut rep = morrey_constant(&b, p, alpha, morrey_convention.into())?;
            if !scan {
                rep.scan.clear();
            }
            println!("{}", serde_json::to_string_pretty(&rep)?);
        }
        Command::Fraclap { alpha, io, pad } => {
            let u = read_field(&io.input)?;
            let out = SpectralBox::new(u.spec, pad)?.frac_laplacian(&u, alpha)?;
            write_field(&out, &io.out)?;
        }
        Command::Generate { kind, d, n, h, out, shape } => {
            let spec = GridSpec::centered(d, n, h)?;
            write_field(&generate(kind, &spec, &shape)?, &out)?;
        }
        Command::Verify { check, run } => verify(&check, &run)?,
        Command::OracleGate { json } => {
            let gate = oracle_gate(&GateConfig::default())?;
            for e in &gate.entries {
                let mark = if e.passed { "PASS" } else { "FAIL" };
                println!("{mark} {:.3e} <= {:.0e}  {}", e.deviation, e.tolerance, e.name);
            }
            if let Some(path) = json {
                write_text(&path, &serde_json::to_string_pretty(&gate)?)?;
            }
            if !gate.passed {
                return Err(Failure::Violation("oracle gate failed".into()));
            }
        }
    }
    Ok(())
}

fn generate(kind: Kind, spec: &GridSpec, s: &Shape) -> Result<Field, Failure> {
    Ok(match kind {
        Kind::Gaussian => gaussian(s.sigma, spec).scaled(s.scale),
        Kind::Power => power_weight(s.beta, s.scale, s.cutoff, spec)?,
        Kind::Indicator => indicator_weight(s.radius, s.scale, spec),
        Kind::RandomWeight => random_weight(s.seed, spec, s.smoothness).scaled(s.scale),
        Kind::Bump => random_bump(s.seed, spec).scaled(s.scale),
    })
}

fn verify(check: &str, args: &RunArgs) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(&args.config).map_err(|e| config_error(&args.config, e))?;
    if check != "all" {
        let name = CheckName::parse(check)?;
        cfg.checks.names = vec![name.as_str().into()];
    }
    if let Some(c) = args.morrey_convention {
        cfg.conventions.morrey = c.into();
    }
    if args.no_gate {
        cfg.gate.enabled = false;
    }
    if args.json.is_some() {
        cfg.output.json = args.json.clone();
    }
    if args.csv.is_some() {
        cfg.output.csv = args.csv.clone();
    }
    let prep = cfg.prepare().map_err(|e| config_error(&args.config, e))?;
    let suite = run::run(&prep).map_err(|e| Failure::Violation(e.to_string()))?;
    if !args.quiet {
        print!("{}", summary(&suite));
    }
    if let Some(path) = &cfg.output.json {
        write_text(path, &JsonReport::new(&cfg, prep.suite.params, &suite).to_json())?;
    }
    if let Some(path) = &cfg.output.csv {
        write_text(path, &curves_csv(&suite.reports))?;
    }
    if suite.is_clean() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("suite verdict {}", suite.verdict.as_str())))
    }
}

fn config_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("config {}: {e}", path.display()))
}
