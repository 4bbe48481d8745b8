use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use connexion_core::l2lab::GridPreset;
use connexion_lab::{analyze, catalog_list, l2verify, resolve, side_path, to_json, write_csv, write_file, CliError, Config};

/// Formal decomposition, model metrics and weighted L² checks for meromorphic connections.
///
/// Exit codes: 0 success, 1 output not writable, 2 parse error or unknown input,
/// 3 decomposition error, 4 numerical instability, 5 bound violated.
#[derive(Parser)]
#[command(name = "connexion-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polygon, formal decomposition, metric diagnostics and local index.
    Analyze {
        /// Spec file or catalog name.
        input: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Phase, ψ-profile, Hardy and vanishing checks on each exponential part.
    L2verify {
        /// Spec file or catalog name.
        input: String,
        #[command(flatten)]
        opts: Opts,
        /// Manufactured forms per line.
        #[arg(long, default_value_t = Config::default().trials)]
        trials: usize,
        /// Weight exponent β of r^{2β}.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
        /// Power κ of |log r|.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        kappa: i32,
        /// Inner sector "θ0,θ1" in radians, replacing the automatic choice.
        #[arg(long, value_parser = parse_sector, allow_hyphen_values = true)]
        sector: Option<(f64, f64)>,
    },
    /// List the built-in examples.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Opts {
    /// Series budget: trusted terms past the valuation.
    #[arg(long, default_value_t = Config::default().trunc)]
    trunc: i64,
    /// Quadrature preset.
    #[arg(long, default_value = "default", value_parser = parse_grid)]
    grid: GridPreset,
    /// Tolerance for metric identities.
    #[arg(long, default_value_t = Config::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = Config::default().seed)]
    seed: u64,
    /// Metric sample points.
    #[arg(long, default_value_t = Config::default().samples)]
    samples: usize,
    /// Report path; CSV tables are written beside it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn config(&self) -> Config {
        Config { trunc: self.trunc, grid: self.grid, tol: self.tol, seed: self.seed, samples: self.samples, ..Config::default() }
    }
}

fn parse_grid(s: &str) -> Result<GridPreset, String> {
    GridPreset::parse(s).ok_or_else(|| format!("expected coarse, default or fine, got {s:?}"))
}

fn parse_sector(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated angles")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(a < b) {
        return Err("need θ0 < θ1".into());
    }
    Ok((a, b))
}

fn emit(out: &Option<PathBuf>, json: String) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, json.as_bytes()),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Catalog { json } => {
            let items = catalog_list();
            if json {
                print!("{}", to_json(&items));
            } else {
                for it in items {
                    println!("{:<16} {}", it.name, it.description);
                }
            }
            Ok(())
        }
        Command::Analyze { input, opts } => {
            let cfg = opts.config();
            let input = resolve(&input)?;
            let (report, rows) = analyze(&input, &cfg)?;
            emit(&opts.out, to_json(&report))?;
            if let Some(p) = &opts.out {
                write_csv(&side_path(p, "metric"), &rows)?;
            }
            report.failure().map_or(Ok(()), Err)
        }
        Command::L2verify { input, opts, trials, beta, kappa, sector } => {
            let cfg = Config { trials, beta, kappa, sector, ..opts.config() };
            let input = resolve(&input)?;
            let (report, tables) = l2verify(&input, &cfg)?;
            emit(&opts.out, to_json(&report))?;
            if let Some(p) = &opts.out {
                write_csv(&side_path(p, "psi_profile"), &tables.psi_profile)?;
                write_csv(&side_path(p, "hardy"), &tables.hardy)?;
                write_csv(&side_path(p, "vanishing"), &tables.vanishing)?;
            }
            report.failure().map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
