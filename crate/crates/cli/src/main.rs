//! `classrank`: class groups, torsion certificates, family searches and
//! the higher-degree construction from the command line.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands as cmd;
use crate::config::{BudgetOverrides, RunConfig};

#[derive(Parser)]
#[command(name = "classrank", version, about = "Quadratic fields with large class-group m-rank from Jacobian torsion")]
struct Cli {
    /// TOML file with `workers`, `seed` and a `[budgets]` table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (output order never depends on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(flatten)]
    budgets: BudgetOverrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArgs {
    /// `toy`, `yamamoto`, or a path to a family JSON file.
    #[arg(long, default_value = "toy")]
    family: String,
    #[arg(short, long, default_value_t = 3)]
    m: u64,
    /// Yamamoto parameter.
    #[arg(long, default_value = "2")]
    lambda: String,
    /// Power N of the bad-prime product in the Yamamoto map.
    #[arg(long, default_value_t = 1)]
    delta_power: u32,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    t_min: i64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 99)]
    t_max: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordFormat {
    Jsonl,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Class group structure and m-ranks of a fundamental discriminant.
    Classgroup {
        #[arg(short = 'D', allow_negative_numbers = true)]
        disc: i64,
        #[arg(short, value_delimiter = ',', default_values_t = [3u64])]
        m: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Checks torsion certificates (one JSON object or an array) modulo primes.
    VerifyCertificate {
        path: PathBuf,
        /// Defaults to the two smallest good primes.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Rational root of h used for the odd model when deg h is even.
        #[arg(long)]
        weierstrass_point: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Prints a family description as JSON.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Specializes a family over a range of t and writes one record per fiber.
    Search {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: RecordFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a tally report here, using --x-bound and --target.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(short = 'X', long, default_value_t = 1_000_000)]
        x_bound: u64,
        #[arg(long, default_value_t = 1)]
        target: u32,
    },
    /// Counts distinct fields with certified rank >= target and |D| <= X.
    Tally {
        /// JSONL records from `search`; without it the search is run here.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(short = 'X', long, default_value_t = 1_000_000)]
        x_bound: u64,
        #[arg(long, default_value_t = 1)]
        target: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The higher-degree construction: f, psi, phi, fiber polynomials and discriminant growth.
    HigherDegree {
        #[arg(short, long, default_value_t = 3)]
        m: u64,
        #[arg(short, long, default_value_t = 5)]
        d: u64,
        /// The r values a_i; defaults to 1..r.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<i64>>,
        #[arg(long, default_value = "0")]
        c0: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        t_min: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 30)]
        t_max: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded check that #J(F_p) = L(1) annihilates random divisors.
    CheckJacobian {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        curves: usize,
        #[arg(long, default_value_t = 50)]
        divisors: usize,
        #[arg(long, default_value_t = 13)]
        max_p: u64,
        #[arg(long, default_value_t = 2)]
        max_genus: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let seed = match &cli.command {
        Command::CheckJacobian { seed, .. } => *seed,
        _ => None,
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &cli.budgets, cli.workers, seed)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let budgets = &cfg.budgets;
    match cli.command {
        Command::Classgroup { disc, m, json } => {
            let r = cmd::classgroup(disc, &m, budgets)?;
            if json {
                cmd::write_json(&r, None)?;
            } else {
                let mut w = cmd::open_output(None)?;
                cmd::print_classgroup(&r, &mut w)?;
                w.flush()?;
            }
        }
        Command::VerifyCertificate { path, primes, weierstrass_point, json } => {
            let text = std::fs::read_to_string(&path)?;
            let r = cmd::verify_certificates(&text, primes.as_deref(), weierstrass_point.as_deref())?;
            if json {
                cmd::write_json(&r, None)?;
            } else {
                let mut w = cmd::open_output(None)?;
                cmd::print_verify(&r, &mut w)?;
                w.flush()?;
            }
        }
        Command::Family { family, output } => {
            let fam = cmd::load_family(&family.family, family.m, &family.lambda, family.delta_power)?;
            let mut w = cmd::open_output(output.as_deref())?;
            writeln!(w, "{}", fam.to_json()?)?;
            w.flush()?;
        }
        Command::Search { family, range, format, output, report, x_bound, target } => {
            let fam = cmd::load_family(&family.family, family.m, &family.lambda, family.delta_power)?;
            let records = cmd::search(&fam, range.t_min, range.t_max, budgets)?;
            cmd::write_records(&records, matches!(format, RecordFormat::Csv), output.as_deref())?;
            if let Some(path) = report {
                cmd::write_json(&cmd::tally_report(&fam, &records, x_bound, target), Some(&path))?;
            }
            note_errors(&records);
        }
        Command::Tally { input, family, range, x_bound, target, output } => {
            let fam = cmd::load_family(&family.family, family.m, &family.lambda, family.delta_power)?;
            let records = match &input {
                Some(p) => cmd::read_records(p)?,
                None => cmd::search(&fam, range.t_min, range.t_max, budgets)?,
            };
            cmd::write_json(&cmd::tally_report(&fam, &records, x_bound, target), output.as_deref())?;
            note_errors(&records);
        }
        Command::HigherDegree { m, d, a, c0, t_min, t_max, output } => {
            let r = cmd::higher_degree(m, d, a.as_deref(), &c0, t_min, t_max)?;
            cmd::write_json(&r, output.as_deref())?;
        }
        Command::CheckJacobian { curves, divisors, max_p, max_genus, output, .. } => {
            let r = cmd::check_jacobian(cfg.seed, curves, divisors, max_p, max_genus, budgets)?;
            cmd::write_json(&r, output.as_deref())?;
        }
    }
    Ok(())
}

fn note_errors(records: &[classrank::specialize::SpecRecord]) {
    let n = cmd::error_records(records);
    if n > 0 {
        eprintln!("note: {n} of {} records hit a budget or arithmetic error (status \"error\")", records.len());
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
