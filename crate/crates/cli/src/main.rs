//! `cmvscat`: forward and inverse scattering runs, verification and class reports.

mod commands;
mod complex;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use commands::{ClassSource, Generator};
use complex::ComplexList;
use failure::Failure;

#[derive(Parser)]
#[command(
    name = "cmvscat",
    version,
    about = "Scattering data of CMV matrices on a discretized circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Weight, Szegő function and scattering function of Verblunsky data.
    Forward {
        #[arg(long)]
        alphas: PathBuf,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Verblunsky data from a scattering function.
    Inverse {
        #[arg(long)]
        scattering: PathBuf,
        /// Must match the sample count of the CSV when given.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        /// Comma-separated unimodular parameters; lists the solution family of s = κtᴺ.
        #[arg(long, value_parser = complex::parse_list)]
        family: Option<ComplexList>,
        #[command(flatten)]
        common: Common,
    },
    /// Operator identities, asymptotics and roundtrips for Verblunsky data.
    Verify {
        #[arg(long)]
        alphas: PathBuf,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        block: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Helson–Szegő and Golinskii–Ibragimov evidence.
    Classify {
        #[arg(long, group = "input")]
        alphas: Option<PathBuf>,
        #[arg(long, group = "input")]
        weight: Option<PathBuf>,
        #[arg(long, group = "input")]
        scattering: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form example data.
    Example {
        generator: GeneratorName,
        #[arg(long, default_value_t = 0.0)]
        gamma1: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma2: f64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, value_parser = complex::parse_list)]
        roots: Option<ComplexList>,
        #[arg(long, value_parser = complex::parse_complex, default_value = "-1", allow_hyphen_values = true)]
        alpha_minus_one: Complex64,
        #[arg(long, value_parser = complex::parse_complex, default_value = "0.5", allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorName {
    Jacobi,
    Polyweight,
    Bernstein,
    Geometric,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Forward {
            alphas,
            grid,
            common,
        } => {
            let tol = commands::parse_tolerances(&common.tol)?;
            commands::forward(&alphas, commands::check_grid(grid)?, &tol)?.commit(&common.out)
        }
        Command::Inverse {
            scattering,
            grid,
            depth,
            family,
            common,
        } => {
            let tol = commands::parse_tolerances(&common.tol)?;
            commands::inverse(
                &scattering,
                grid,
                depth,
                family.as_ref().map(|f| f.0.as_slice()),
                &tol,
            )?
            .commit(&common.out)
        }
        Command::Verify {
            alphas,
            grid,
            block,
            common,
        } => {
            let tol = commands::parse_tolerances(&common.tol)?;
            let (arts, all_pass) =
                commands::verify(&alphas, commands::check_grid(grid)?, block, &tol)?;
            arts.commit(&common.out)?;
            if all_pass {
                Ok(())
            } else {
                Err(Failure::Invalid(format!(
                    "verification checks failed; see {}",
                    common.out.join("report.json").display()
                )))
            }
        }
        Command::Classify {
            alphas,
            weight,
            scattering,
            grid,
            depth,
            common,
        } => {
            let tol = commands::parse_tolerances(&common.tol)?;
            let source = match (&alphas, &weight, &scattering) {
                (Some(p), None, None) => ClassSource::Alphas(p),
                (None, Some(p), None) => ClassSource::Weight(p),
                (None, None, Some(p)) => ClassSource::Scattering(p),
                _ => {
                    return Err(Failure::Invalid(
                        "classify needs exactly one of --alphas, --weight, --scattering".into(),
                    ))
                }
            };
            commands::classify_cmd(source, commands::check_grid(grid)?, depth, &tol)?
                .commit(&common.out)
        }
        Command::Example {
            generator,
            gamma1,
            gamma2,
            n,
            roots,
            alpha_minus_one,
            a,
            ratio,
            grid,
            common,
        } => {
            let tol = commands::parse_tolerances(&common.tol)?;
            let gen = match generator {
                GeneratorName::Jacobi => Generator::Jacobi { gamma1, gamma2, n },
                GeneratorName::Polyweight => Generator::Polyweight {
                    roots: roots
                        .ok_or_else(|| Failure::Invalid("polyweight needs --roots".into()))?
                        .0,
                    alpha_minus_one,
                },
                GeneratorName::Bernstein => Generator::Bernstein { a },
                GeneratorName::Geometric => Generator::Geometric { ratio, n },
            };
            commands::example(&gen, commands::check_grid(grid)?, &tol)?.commit(&common.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cmvscat: {e}");
            ExitCode::from(e.code())
        }
    }
}
