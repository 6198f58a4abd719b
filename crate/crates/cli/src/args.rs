use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "toptrap",
    version,
    about = "Spin dynamics of a weak-field seeker in a TOP trap"
)]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format. Tables default to csv, reports to plain text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Print timing and diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival and transition probabilities over time.
    Evolve(EvolveArgs),
    /// Resurrection time against omega0/omega.
    Tau(TauArgs),
    /// Canned figure datasets.
    Fig(FigArgs),
    /// Adiabaticity parameter and its finite-difference counterpart.
    Adiabatic(AdiabaticArgs),
    /// Trap length and frequency scales.
    Geometry(GeometryArgs),
    /// Compare an escape time with the resurrection time.
    Confine(ConfineArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct DriveArgs {
    /// Larmor frequency (rad per time unit).
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: f64,
    /// Rotation frequency of the bias field.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: f64,
    /// Tilt of the field from the z axis, radians.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolveMethod {
    Closed,
    Ode,
    Lab,
    All,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub drive: DriveArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = EvolveMethod::Closed)]
    pub method: EvolveMethod,
    #[arg(long, default_value_t = 1e-11)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-13)]
    pub abs_tol: f64,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Tilt angle; repeat for several curves.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 401)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigName {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Args)]
pub struct FigArgs {
    #[arg(value_enum)]
    pub which: FigName,
    /// Add ODE oracle columns and fail on disagreement.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct AdiabaticArgs {
    #[command(flatten)]
    pub drive: DriveArgs,
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Time at which the matrix element is evaluated.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Central-difference step; defaults to 1e-6 of the shorter period.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Quadrupole gradient, T/m.
    #[arg(long)]
    pub a0: f64,
    /// Rotating bias field, T.
    #[arg(long)]
    pub b0: f64,
    /// Bias rotation frequency, rad/s.
    #[arg(long)]
    pub omega: f64,
    /// Gyromagnetic ratio, rad/(s T).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Magnetic moment, J/T.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Atomic mass, kg.
    #[arg(long)]
    pub mass: f64,
    #[arg(long, default_value_t = 10.0)]
    pub margin: f64,
}

#[derive(Debug, Args)]
pub struct ConfineArgs {
    #[command(flatten)]
    pub drive: DriveArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub escape_time: f64,
}
