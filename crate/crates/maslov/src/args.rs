use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use maslov_core::models::Potential;
use maslov_core::{NumericConfig, Point, SystemModel};

/// Quantum propagators of quadratic Lagrangians with their Maslov phase,
/// cross-checked against second-variation inertia and the Morse index.
#[derive(Parser, Debug)]
#[command(name = "maslov", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate K(x2, T | x1, 0) at one time.
    Kernel {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ends: Endpoints,
        /// Elapsed time T.
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        methods: MethodArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate the kernel over an evenly spaced range of T.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        /// Number of sample times, endpoints included.
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[command(flatten)]
        methods: MethodArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conjugate points, Morse index and second-variation inertia at T.
    Morse {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-arm interference: a free reference arm against an oscillator arm
    /// through the focus.
    Interfere {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Duration of the free arm [default: a quarter period].
        #[arg(long)]
        t_a: Option<f64>,
        /// Duration of the oscillator arm [default: half a period + 0.25/ω].
        #[arg(long)]
        t_b: Option<f64>,
        /// Width of the source packet.
        #[arg(long, default_value_t = 0.3)]
        width: f64,
        /// Source position.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x1: f64,
        /// Detector position.
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        x2: f64,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    Free,
    Osc,
    Forced,
    Magnetic,
    Potential,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialName {
    /// m ω² x²/2
    Harmonic,
    /// m ω² x²/2 + g x⁴
    Quartic,
    /// m ω² (1 − cos x)
    Pendulum,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelName::Osc)]
    pub model: ModelName,
    /// Mass.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Oscillator frequency; for the magnetic model eB/2m.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Constant force of the forced oscillator.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub f: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Potential for `--model potential`.
    #[arg(long, value_enum, default_value_t = PotentialName::Harmonic)]
    pub potential: PotentialName,
    /// Quartic coupling.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub g: f64,
}

impl ModelArgs {
    pub fn build(&self) -> Result<SystemModel, clap::Error> {
        let model = match self.model {
            ModelName::Free => SystemModel::free(self.m),
            ModelName::Osc => SystemModel::oscillator(self.m, self.omega),
            ModelName::Forced => SystemModel::forced(self.m, self.omega, self.f),
            ModelName::Magnetic => SystemModel::magnetic(self.m, self.omega),
            ModelName::Potential => {
                if !self.g.is_finite() {
                    return Err(usage("--g must be finite"));
                }
                let v = match self.potential {
                    PotentialName::Harmonic => Potential::harmonic(self.m, self.omega),
                    PotentialName::Quartic => Potential::quartic(self.m, self.omega, self.g),
                    PotentialName::Pendulum => Potential::pendulum(self.m, self.omega),
                };
                SystemModel::potential(self.m, v)
            }
        }
        .with_hbar(self.hbar);
        model.validate().map_err(|e| usage(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Endpoints {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x2: f64,
    /// Second coordinate of the start (magnetic model only).
    #[arg(long, allow_negative_numbers = true)]
    pub y1: Option<f64>,
    /// Second coordinate of the end (magnetic model only).
    #[arg(long, allow_negative_numbers = true)]
    pub y2: Option<f64>,
}

impl Endpoints {
    pub fn points(&self, model: &SystemModel) -> Result<(Point, Point), clap::Error> {
        if model.dimension() == 1 {
            if self.y1.is_some() || self.y2.is_some() {
                return Err(usage("--y1/--y2 apply to the magnetic model only"));
            }
            return Ok((Point::line(self.x1), Point::line(self.x2)));
        }
        Ok((
            Point::new(self.x1, self.y1.unwrap_or(0.0)),
            Point::new(self.x2, self.y2.unwrap_or(0.0)),
        ))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Closed-form kernel.
    Closed,
    /// Fluctuation factor from the Fourier-mode eigenvalue product.
    Modes,
    /// Van Vleck determinant with the Morse index.
    Vanvleck,
    /// Damped spectral sum over oscillator eigenstates.
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Modes => "modes",
            Method::Vanvleck => "vanvleck",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// Comma-separated list of methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed")]
    pub methods: Vec<Method>,
}

impl MethodArgs {
    pub fn list(&self) -> Vec<Method> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct NumericArgs {
    /// Time-grid intervals for paths, the second variation and Jacobi fields.
    #[arg(long, env = "MASLOV_DEFAULT_GRID", default_value_t = 2048)]
    pub grid: usize,
    /// Fourier modes in the eigenvalue product.
    #[arg(long, default_value_t = 10_000)]
    pub modes: usize,
    /// Damping of the spectral sum.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
}

impl NumericArgs {
    pub fn config(&self) -> Result<NumericConfig, clap::Error> {
        if self.modes == 0 {
            return Err(usage("--modes must be >= 1"));
        }
        let cfg = NumericConfig {
            grid_points: self.grid,
            mode_count: self.modes,
            damping_eta: self.eta,
            ..NumericConfig::default()
        };
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format [default: json for kernel, morse and interfere; csv for scan].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

/// A flag-level error; reported like a parse error, exit status 2.
pub fn usage(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}
