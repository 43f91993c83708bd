//! Command-line front end: scenario in, artifact out, nonzero exit on any
//! domain error or failed invariant.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use escape_gauge::report::{self, GridWindow};
use escape_gauge::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "escape-gauge",
    about = "Escape-set diagnostics for a family of meromorphic maps with \
             tower-of-exponentials growth",
    version
)]
struct Cli {
    #[command(flatten)]
    overrides: ScenarioArgs,
    /// Write the artifact here instead of stdout (grid writes BASE.pgm and
    /// BASE.csv next to each other).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML or JSON); inline flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Outer power of the iterated map.
    #[arg(long = "M", global = true)]
    m: Option<u32>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long = "kmax", global = true)]
    k_max: Option<u64>,
    /// Series tail ceiling.
    #[arg(long = "tail", global = true)]
    tail: Option<f64>,
    /// Base radius of the cover schedule.
    #[arg(long = "R0", global = true)]
    r0: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario, escape_gauge::Error> {
        let mut s = match &self.config {
            Some(path) => Scenario::from_path(path)?,
            None => Scenario::default(),
        };
        if let Some(n) = self.n {
            s.n = n;
        }
        if let Some(rho) = self.rho {
            s.rho = rho;
        }
        if let Some(m) = self.m {
            s.m = m;
        }
        if let Some(gamma) = self.gamma {
            s.gamma = gamma;
        }
        if let Some(k_max) = self.k_max {
            s.k_max = k_max;
        }
        if let Some(tail) = self.tail {
            s.tail_policy = tail;
        }
        if let Some(r0) = self.r0 {
            s.r0 = r0;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pgm,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality margin suites and report worst margins as JSON.
    VerifyLemmas {
        /// Random inputs per gauge suite.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Ring span of the separation grid (pairs over k0+1 ..= k0+1+span).
        #[arg(long, default_value_t = 199)]
        ring_span: u64,
    },
    /// Emit the pole/residue table as CSV.
    Poles,
    /// Sample the spider's web and compare with the certified bound (JSON).
    Web,
    /// Rasterize escape steps over a window (PGM P2 plus CSV).
    Grid {
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_max: f64,
        /// Pixels per side.
        #[arg(long, default_value_t = 101)]
        px: u32,
        #[arg(long, default_value_t = 16)]
        max_iter: u32,
    },
    /// Emit the key-series ledger and mass-sequence table as JSON.
    Sums {
        /// Pole budget for the direct cumulative cross-check.
        #[arg(long, default_value_t = 10_000)]
        j_max: u64,
        /// Number of dyadic bins to close.
        #[arg(long, default_value_t = 3)]
        bins: u32,
        /// Ring budget for closing bins.
        #[arg(long, default_value_t = 10_000_000)]
        ring_budget: u64,
        /// Levels of the mass sequence.
        #[arg(long, default_value_t = 12)]
        levels: u32,
    },
    /// Emit the pole-count table and order estimate as CSV.
    Count {
        /// Radii of the count rows.
        #[arg(long, value_delimiter = ',', default_values_t = vec![12.0, 14.0, 16.0])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        order_k_lo: u64,
        #[arg(long, default_value_t = 100_000)]
        order_k_hi: u64,
        #[arg(long, default_value_t = 1_800)]
        order_step: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether all invariants checked by the subcommand hold.
fn run(cli: &Cli) -> Result<bool, escape_gauge::Error> {
    let scenario = cli.overrides.resolve()?;
    match &cli.command {
        Command::VerifyLemmas { samples, ring_span } => {
            require_format(cli, Format::Json)?;
            let rep = report::verify_lemmas(&scenario, *samples, *ring_span)?;
            emit(cli, &report::to_json(&rep))?;
            Ok(rep.pass)
        }
        Command::Poles => {
            require_format(cli, Format::Csv)?;
            emit(cli, &report::poles_csv(&scenario)?)?;
            Ok(true)
        }
        Command::Web => {
            require_format(cli, Format::Json)?;
            let rep = report::web_summary(&scenario)?;
            emit(cli, &report::to_json(&rep))?;
            Ok(rep.pass)
        }
        Command::Grid {
            re_min,
            re_max,
            im_min,
            im_max,
            px,
            max_iter,
        } => {
            let window = GridWindow {
                re_min: *re_min,
                re_max: *re_max,
                im_min: *im_min,
                im_max: *im_max,
                px: *px,
            };
            let grid = report::escape_grid(&scenario, &window, *max_iter)?;
            let base = cli.out.clone().unwrap_or_else(|| PathBuf::from("grid"));
            let base = base.with_extension("");
            let pgm_path = base.with_extension("pgm");
            let csv_path = base.with_extension("csv");
            write_file(&pgm_path, &grid.pgm)?;
            write_file(&csv_path, &grid.csv)?;
            eprintln!(
                "wrote {} and {} (escape radius {})",
                pgm_path.display(),
                csv_path.display(),
                grid.escape_radius
            );
            Ok(true)
        }
        Command::Sums {
            j_max,
            bins,
            ring_budget,
            levels,
        } => {
            require_format(cli, Format::Json)?;
            let rep = report::sums_report(&scenario, *j_max, *bins, *ring_budget, *levels)?;
            emit(cli, &report::to_json(&rep))?;
            Ok(true)
        }
        Command::Count {
            radii,
            order_k_lo,
            order_k_hi,
            order_step,
        } => {
            require_format(cli, Format::Csv)?;
            let csv =
                report::count_csv(&scenario, radii, (*order_k_lo, *order_k_hi, *order_step))?;
            emit(cli, &csv)?;
            Ok(true)
        }
    }
}

fn require_format(cli: &Cli, native: Format) -> Result<(), escape_gauge::Error> {
    match cli.format {
        None => Ok(()),
        Some(f) if f == native => Ok(()),
        Some(_) => Err(escape_gauge::Error::domain(
            "this subcommand has a single native format; omit --format or pass \
             the matching one",
        )),
    }
}

fn emit(cli: &Cli, artifact: &str) -> Result<(), escape_gauge::Error> {
    match &cli.out {
        Some(path) => write_file(path, artifact),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), escape_gauge::Error> {
    fs::write(path, content)
        .map_err(|e| escape_gauge::Error::domain(format!("cannot write {}: {e}", path.display())))
}
