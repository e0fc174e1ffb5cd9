//! `mgfnorm`: normality tests based on the empirical moment generating
//! function, for i.i.d. data and CCC-GARCH innovations.

mod commands;
mod config;
mod error;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "mgfnorm", version, about = "MGF-based tests for multivariate normality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test an i.i.d. sample for multivariate normality.
    Test(TestArgs),
    /// Monte Carlo critical values of the scaled statistic.
    Critvals(CritvalsArgs),
    /// Rejection rate against an i.i.d. alternative.
    Power(PowerArgs),
    /// Simulate a CCC-GARCH(p,q) path.
    GarchSim(GarchSimArgs),
    /// Gaussian QMLE of a CCC-GARCH(p,q) model.
    GarchFit(GarchFitArgs),
    /// Parametric bootstrap test of Gaussian GARCH innovations.
    GarchTest(GarchTestArgs),
    /// Warp-speed level or power study for the GARCH test.
    GarchPower(GarchPowerArgs),
    /// Regenerate a reference table and compare it cell by cell.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    /// Off-diagonal GARCH coefficients fixed at zero.
    Diagonal,
    /// All GARCH coefficients free.
    Full,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV with n rows and d columns, optional header.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    pub beta: f64,
    /// Null replicates behind the p-value.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CritvalsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Alternative: normal, t:5, ase:1.75, gn:1.65, aep:0.4,1.182,1.820.
    #[arg(long)]
    pub alt: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0)]
    pub beta: f64,
    /// Use the BHEP statistic with `--beta` as its smoothing parameter.
    #[arg(long)]
    pub hw: bool,
    /// Null replicates for the critical value.
    #[arg(long, default_value_t = 20_000)]
    pub reps: usize,
    /// Trials under the alternative.
    #[arg(long, default_value_t = 10_000)]
    pub mc: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GarchSimArgs {
    /// Parameters as CSV or JSON; the bivariate or trivariate design is used otherwise.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.4)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    /// Innovation law, standardized to zero mean and unit variance.
    #[arg(long, default_value = "normal")]
    pub alt: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GarchFitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = Structure::Diagonal)]
    pub structure: Structure,
    /// Parameter file; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the residuals as CSV.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GarchTestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = Structure::Diagonal)]
    pub structure: Structure,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 500)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GarchPowerArgs {
    /// Innovation law; `normal` gives the level.
    #[arg(long, default_value = "normal")]
    pub alt: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.4)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2.1")]
    pub beta: Vec<f64>,
    /// BHEP smoothing parameters evaluated on the same fits.
    #[arg(long = "hw-beta", value_delimiter = ',')]
    pub hw_beta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Structure::Diagonal)]
    pub structure: Structure,
    /// Monte Carlo samples, each with one bootstrap resample.
    #[arg(long, default_value_t = 2000)]
    pub mc: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Table1,
    Table2,
    Table3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Reduced Monte Carlo sizes.
    Desk,
    /// The reference Monte Carlo sizes.
    #[value(alias = "paper")]
    Full,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(value_enum)]
    pub which: Which,
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    pub scale: Scale,
    /// Override the replicate count of the scale (null replicates for table1 and table2).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the Monte Carlo sample count of the scale (table2 and table3).
    #[arg(long)]
    pub mc: Option<usize>,
    /// Restrict to these dimensions.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Restrict table1 to these sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Restrict to these alternatives (table2, table3).
    #[arg(long, value_delimiter = ';')]
    pub alt: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the CSV here; an aligned text report goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a gnuplot script comparing computed and reference values (needs --out).
    #[arg(long = "emit-gnuplot")]
    pub emit_gnuplot: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::Critvals(a) => commands::critvals(&a),
        Command::Power(a) => commands::power(&a),
        Command::GarchSim(a) => commands::garch_sim(&a),
        Command::GarchFit(a) => commands::garch_fit(&a),
        Command::GarchTest(a) => commands::garch_test(&a),
        Command::GarchPower(a) => commands::garch_power(&a),
        Command::Tables(a) => tables::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mgfnorm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
