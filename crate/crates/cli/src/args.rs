//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pohozaev::nonlinearity::{QUINTIC_B, QUINTIC_C, QUINTIC_D};
use pohozaev::{LinearSolver, NonlinearityModel, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "pohozaev", version, about = "Radial ground states of -Δu + λu = f(u) in R^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Directory receiving all output files
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for independent solves (0 = all cores, 1 = serial)
    #[arg(long, global = true, default_value_t = 0)]
    pub parallel: usize,
    /// Recorded in the manifest; the solver itself is deterministic
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and write profile.csv, trace.csv and result.json
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve the asymptotically linear model over a λ × s grid (grid.csv)
    Sweep {
        /// Comma-separated λ values
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        /// Comma-separated s values
        #[arg(long = "s-values", value_delimiter = ',', required = true)]
        s_values: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Numerical studies of the method (study.csv)
    Study {
        #[arg(value_enum)]
        kind: StudyKind,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Mesh sizes of the convergence study
        #[arg(long = "panels-list", value_delimiter = ',', default_values_t = [100usize, 200, 400, 800, 1600])]
        panels_list: Vec<usize>,
        /// Spacings of the domain study
        #[arg(long, value_delimiter = ',', default_values_t = pohozaev::studies::reference::DOMAIN_SPACINGS)]
        spacings: Vec<f64>,
        /// Initial extents of the domain study
        #[arg(long, value_delimiter = ',', default_values_t = pohozaev::studies::reference::DOMAIN_RADII)]
        radii: Vec<f64>,
    },
    /// Demonstrations of cases other methods cannot handle
    Demo {
        #[arg(value_enum)]
        kind: DemoKind,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Recompute a published table and compare (exit 4 on any mismatch)
    Reproduce {
        #[arg(value_enum)]
        table: TableKind,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Re-run the command recorded in a manifest
    Replay {
        /// Path to a manifest.json written by an earlier run
        manifest: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyKind {
    Convergence,
    Domain,
    Robustness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    TwoMaxima,
    Nonmonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    PowerHeights,
    AsymGrid,
    AsymProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Power,
    Asym,
    Quintic,
    Nonmono,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Sor,
    Thomas,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Nonlinearity family
    #[arg(long, value_enum, default_value = "power")]
    pub model: ModelKind,
    /// Linear coefficient λ > 0
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Saturation parameter of the asym and nonmono models
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub s: f64,
    /// Quintic coefficient of u³ in F
    #[arg(long = "B", default_value_t = QUINTIC_B, allow_negative_numbers = true)]
    pub b: f64,
    /// Quintic coefficient of -u⁴ in F
    #[arg(long = "C", default_value_t = QUINTIC_C, allow_negative_numbers = true)]
    pub c: f64,
    /// Quintic coefficient of u⁵ in F
    #[arg(long = "D", default_value_t = QUINTIC_D, allow_negative_numbers = true)]
    pub d: f64,
}

impl ModelArgs {
    pub fn build(&self) -> pohozaev::Result<NonlinearityModel> {
        match self.model {
            ModelKind::Power => NonlinearityModel::power(self.lambda),
            ModelKind::Asym => NonlinearityModel::asym_linear(self.lambda, self.s),
            ModelKind::Quintic => NonlinearityModel::quintic(self.lambda, self.b, self.c, self.d),
            ModelKind::Nonmono => NonlinearityModel::nonmonotone(self.lambda, self.s),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Panels M of the radial mesh
    #[arg(long)]
    pub panels: Option<usize>,
    /// Initial extent R* of the mesh
    #[arg(long)]
    pub rstar: Option<f64>,
    /// Initial line-search step α₀
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Smallest line-search step before a line search ends
    #[arg(long = "alpha-min")]
    pub alpha_min: Option<f64>,
    /// Stop once ‖v‖ drops below this
    #[arg(long)]
    pub eps: Option<f64>,
    /// SOR relaxation factor in (0, 2)
    #[arg(long = "sor-omega")]
    pub sor_omega: Option<f64>,
    /// Relative residual tolerance of SOR
    #[arg(long = "sor-tol")]
    pub sor_tol: Option<f64>,
    /// Project onto the manifold every N line-search steps
    #[arg(long = "reproject-every")]
    pub reproject_every: Option<usize>,
    /// Amplitude a of the initial guess a·exp(-b r²)
    #[arg(long = "guess-amplitude")]
    pub guess_amplitude: Option<f64>,
    /// Decay rate b of the initial guess a·exp(-b r²)
    #[arg(long = "guess-width")]
    pub guess_width: Option<f64>,
    /// Linear solver for the descent direction
    #[arg(long = "linear-solver", value_enum)]
    pub linear_solver: Option<SolverKind>,
    /// Cap on outer descent iterations
    #[arg(long = "max-iterations")]
    pub max_iterations: Option<usize>,
    /// Cap on line-search restarts
    #[arg(long = "max-restarts")]
    pub max_restarts: Option<usize>,
}

impl SolverArgs {
    /// `base` with every flag that was given applied.
    pub fn apply(&self, base: SolverConfig) -> SolverConfig {
        let mut c = base;
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    c.$field = v;
                }
            };
        }
        set!(panels => panels);
        set!(rstar => r_star);
        set!(alpha0 => alpha0);
        set!(alpha_min => alpha_min);
        set!(eps => eps_stop);
        set!(sor_omega => sor_omega);
        set!(sor_tol => sor_tol);
        set!(reproject_every => reproject_stride);
        set!(guess_amplitude => guess_amplitude);
        set!(guess_width => guess_width);
        set!(max_iterations => max_outer_iterations);
        set!(max_restarts => max_restarts);
        if let Some(k) = self.linear_solver {
            c.linear_solver = match k {
                SolverKind::Sor => LinearSolver::Sor,
                SolverKind::Thomas => LinearSolver::Thomas,
            };
        }
        c
    }

    pub fn config(&self) -> SolverConfig {
        self.apply(SolverConfig::default())
    }
}
