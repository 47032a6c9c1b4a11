//! `cutlocus`: command-line front end for distance-squared functions, their
//! retractions and cut loci.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use output::Format;

const AFTER_HELP: &str = "\
Output formats:
  Matrix commands and flows default to JSON, `cut` to CSV, `verify` to a text table.
  Matrices are {\"rows\":r,\"cols\":c,\"real\":[...],\"imag\":[...]} with row-major entries;
  `imag` is present only for complex matrices.

CSV column orders:
  nearest-orth, dist-on, leftinv-dist, upq-*   quantity,value
      (matrix entries appear as name[i,j]; complex ones as name[i,j].re and name[i,j].im)
  flow-on, retraction, leftinv-geodesic        t,m00,m01,...  (row-major entries)
  flow to-n, flow to-cut                       t,x0,x1,...    (ambient coordinates)
  cut                                          index,base0..,dir0..,s_value,cause,focal_time,cut0..
      (focal_time is empty when no focal point lies before the bracket end)
  verify all                                   id,name,status,budget_secs,detail

Exit codes: 0 success, 1 some `verify` check failed, 2 malformed input or numerical error.";

#[derive(Debug, Parser)]
#[command(name = "cutlocus", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Bisection tolerance for cut times.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Sample count for the injectivity certificate.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Seed for all random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nearest orthogonal matrix (polar factor) and the distance to O(n).
    NearestOrth { matrix: PathBuf },
    /// Squared distance to O(n) and its gradient where it exists.
    DistOn { matrix: PathBuf },
    /// Closed-form gradient flow of the squared distance to O(n).
    FlowOn {
        matrix: PathBuf,
        /// Time grid `start:end:count`.
        #[arg(long, default_value = "0:2:21")]
        t_grid: TimeGrid,
    },
    /// Straight-line retraction onto the nearest orthogonal matrix, t in [0,1].
    Retraction {
        matrix: PathBuf,
        #[arg(long, default_value = "0:1:11")]
        t_grid: TimeGrid,
    },
    /// Left-invariant distance from GL+(n) to SO(n).
    LeftinvDist { matrix: PathBuf },
    /// Minimal left-invariant geodesic from SO(n) (t = 0) to the input (t = 1).
    LeftinvGeodesic {
        matrix: PathBuf,
        #[arg(long, default_value = "0:1:11")]
        t_grid: TimeGrid,
    },
    /// Membership test for U(p,q).
    UpqCheck(UpqArgs),
    /// Factorization A = U e^Y and the exponential form e^Z e^Y.
    UpqDecompose(UpqArgs),
    /// Squared distance from an element of U(p,q) to its maximal compact subgroup.
    UpqDist(UpqArgs),
    /// Cut times along unit normals of a submanifold.
    Cut(CutArgs),
    /// Gradient flow of d² or the deformation onto the cut locus.
    #[command(subcommand)]
    Flow(FlowCommand),
    /// Acceptance checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args)]
struct UpqArgs {
    /// Complex matrix JSON.
    matrix: PathBuf,
    /// Signature `p,q`.
    #[arg(long)]
    sig: Sig,
}

#[derive(Debug, Args)]
pub struct CutArgs {
    #[command(subcommand)]
    target: Target,
    /// Number of unit normals (rounded up to a multiple of 4 for the ellipse).
    #[arg(long, global = true, default_value_t = 200)]
    normals: usize,
    /// Also run the injectivity certificate with `--samples` points (JSON only; summary on stderr for CSV).
    #[arg(long, global = true)]
    injectivity: bool,
}

#[derive(Debug, Subcommand)]
enum FlowCommand {
    /// Flow line toward the submanifold, t ≥ 0 (default grid 0:2:21).
    ToN(FlowArgs),
    /// Deformation onto the cut locus, t in [0,1] (default grid 0:1:11).
    ToCut(FlowArgs),
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(subcommand)]
    target: Target,
    /// Start point, comma separated; normalized onto the sphere for sphere models.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    point: Vec<f64>,
    #[arg(long, global = true)]
    t_grid: Option<TimeGrid>,
}

/// Model space and submanifold.
#[derive(Debug, Clone, Subcommand)]
pub enum Target {
    /// A point of Sⁿ (default the first basis vector).
    SpherePoint {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Option<Vec<f64>>,
    },
    /// The great Sᵏ on the first k+1 coordinates of Sⁿ.
    Equator {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// The Hopf link of two great circles in S³.
    Clifford,
    /// The ellipse (x/a)² + (y/b)² = 1 in the plane, a > b > 0.
    Ellipse {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Run every check and print a PASS/FAIL table.
    All,
    /// List the checks.
    List,
}

/// `start:end:count`, evenly spaced and inclusive of both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(pub Vec<f64>);

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start:end:count, got `{s}`"));
        };
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad start `{a}`: {e}"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad end `{b}`: {e}"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| format!("bad count `{n}`: {e}"))?;
        if !a.is_finite() || !b.is_finite() {
            return Err("grid ends must be finite".into());
        }
        match n {
            0 => Err("grid count must be positive".into()),
            1 if a == b => Ok(TimeGrid(vec![a])),
            1 => Err("a single-point grid needs start == end".into()),
            _ if b <= a => Err("grid end must exceed start".into()),
            _ => {
                let span = b - a;
                let last = (n - 1) as f64;
                Ok(TimeGrid(
                    (0..n)
                        .map(|i| {
                            if i + 1 == n {
                                b
                            } else {
                                a + span * i as f64 / last
                            }
                        })
                        .collect(),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sig(pub usize, pub usize);

impl FromStr for Sig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (p, q) = s
            .split_once(',')
            .ok_or_else(|| format!("expected p,q, got `{s}`"))?;
        let p = p.trim().parse().map_err(|e| format!("bad p `{p}`: {e}"))?;
        let q = q.trim().parse().map_err(|e| format!("bad q `{q}`: {e}"))?;
        Ok(Sig(p, q))
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(format!("--tol must be positive, got {}", cli.tol));
    }
    if cli.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    let cfg = RunConfig {
        tol: cli.tol,
        samples: cli.samples,
        seed: cli.seed,
        format: cli.format,
    };

    // Compute before opening the output file so failures leave no partial file.
    let (rendered, code) = match cli.command {
        Command::Verify(VerifyCommand::All) => commands::verify_all(&cfg)?,
        Command::Verify(VerifyCommand::List) => (commands::verify_list(&cfg)?, ExitCode::SUCCESS),
        other => {
            let (report, default) = dispatch(other, &cfg)?;
            let mut buf = Vec::new();
            report
                .write(cfg.format.unwrap_or(default), &mut buf)
                .map_err(|e| e.to_string())?;
            (buf, ExitCode::SUCCESS)
        }
    };

    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    sink.write_all(&rendered)
        .and_then(|_| sink.flush())
        .map_err(|e| e.to_string())?;
    Ok(code)
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<(output::Report, Format), String> {
    use commands as c;
    Ok(match cmd {
        Command::NearestOrth { matrix } => (c::nearest_orth(&matrix)?, Format::Json),
        Command::DistOn { matrix } => (c::dist_on(&matrix)?, Format::Json),
        Command::FlowOn { matrix, t_grid } => (c::flow_on(&matrix, &t_grid.0)?, Format::Json),
        Command::Retraction { matrix, t_grid } => {
            (c::retraction(&matrix, &t_grid.0)?, Format::Json)
        }
        Command::LeftinvDist { matrix } => (c::leftinv_dist(&matrix)?, Format::Json),
        Command::LeftinvGeodesic { matrix, t_grid } => {
            (c::leftinv_geodesic(&matrix, &t_grid.0)?, Format::Json)
        }
        Command::UpqCheck(a) => (c::upq_check(&a.matrix, a.sig)?, Format::Json),
        Command::UpqDecompose(a) => (c::upq_decompose(&a.matrix, a.sig)?, Format::Json),
        Command::UpqDist(a) => (c::upq_dist(&a.matrix, a.sig)?, Format::Json),
        Command::Cut(args) => (
            c::cut(&args.target, args.normals, args.injectivity, cfg)?,
            Format::Csv,
        ),
        Command::Flow(FlowCommand::ToN(args)) => (
            c::flow(&args, cutlocus::flow::FlowKind::ToSubmanifold, cfg)?,
            Format::Json,
        ),
        Command::Flow(FlowCommand::ToCut(args)) => (
            c::flow(&args, cutlocus::flow::FlowKind::ToCutLocus, cfg)?,
            Format::Json,
        ),
        Command::Verify(_) => unreachable!("handled by run"),
    })
}
