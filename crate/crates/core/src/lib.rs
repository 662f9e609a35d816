//! Positive radial ground states of `-Δu + λu = f(u)` in ℝ³.
//!
//! The ground state is found as the minimizer of the action
//! `I(u) = ½∫|∇u|² - ∫G(u)` on the Pohozaev manifold `J(u) = 0`, following a
//! projected steepest descent on a truncated radial mesh:
//!
//! - [`radial`]: the mesh, nodal functions and radial quadrature;
//! - [`nonlinearity`]: the model families `f`, their primitives and checks;
//! - [`energy`]: `I`, `J`, the dilation onto the manifold and fiber scans;
//! - [`descent`]: the H¹ steepest descent direction by SOR;
//! - [`mmap`]: the line search, restarts and the outer loop;
//! - [`studies`]: parameter studies, demos and the published reference data;
//! - [`sweep`]: batches of independent solves, parallel with `parallel`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descent;
pub mod energy;
pub mod error;
pub mod mmap;
pub mod nonlinearity;
pub mod radial;
pub mod studies;
pub mod sweep;

pub use descent::{
    solve_direction, sor_solve, steepest_direction, thomas_solve, DescentDirection, LinearSolver, SorOptions,
    TridiagonalSystem,
};
pub use energy::{action_i, fiber_scan, interior_maxima, pohozaev_j, project, project_t, Moments, ProjectionResult};
pub use error::{Error, Result};
pub use mmap::{initial_guess, solve, solve_default, SolveResult, SolveStatus, SolveSummary, SolverConfig, TraceEntry};
pub use nonlinearity::{Family, ModelSpec, NonlinearityModel};
pub use radial::{RadialFunction, RadialGrid};
