//! Steepest descent direction of the action in H¹.
//!
//! The H¹ gradient of `I` at `w` is the Riesz representative of `I'(w)`, so
//! the descent direction `v = -∇_{H¹} I(w)` solves
//!
//! ```text
//! v'' + (2/r) v' - v = -w'' - (2/r) w' + λw - f(w),   v'(0) = 0,  v(R*) = 0.
//! ```
//!
//! Rows `i = 1..M-1` use second-order centered differences and are relaxed by
//! SOR; `v_M = 0` and `v_0 = (4v_1 - v_2)/3` are imposed after each sweep.
//! At `i = 1` the lower coefficient vanishes, so `v_0` never feeds back into
//! the interior rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityModel;
use crate::radial::{h1_norm_sq, RadialFunction, RadialGrid};

/// Three-point rows `upper·v_{i+1} + diag·v_i + lower·v_{i-1} = rhs_i` for the
/// interior nodes. Arrays are indexed by node; entries 0 and `M` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub grid: RadialGrid,
    pub upper: Vec<f64>,
    pub diag: Vec<f64>,
    pub lower: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    /// The operator `Δ - 1` on `grid` with an empty right-hand side.
    pub fn helmholtz(grid: RadialGrid) -> Self {
        let n = grid.len();
        let dr = grid.spacing();
        let inv_h2 = 1.0 / (dr * dr);
        let mut upper = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut lower = vec![0.0; n];
        for i in 1..n - 1 {
            let r = grid.node(i);
            let drift = 1.0 / (r * dr);
            upper[i] = inv_h2 + drift;
            diag[i] = -(2.0 * inv_h2 + 1.0);
            lower[i] = inv_h2 - drift;
        }
        Self {
            grid,
            upper,
            diag,
            lower,
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Left-hand side applied to `v` at the interior rows (zero elsewhere).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = self.upper[i] * v[i + 1] + self.diag[i] * v[i] + self.lower[i] * v[i - 1];
        }
        out
    }

    /// `max_i |(A v - b)_i|` over the interior rows.
    pub fn residual_max(&self, v: &[f64]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 1..n - 1 {
            let r = self.upper[i] * v[i + 1] + self.diag[i] * v[i] + self.lower[i] * v[i - 1] - self.rhs[i];
            worst = worst.max(r.abs());
        }
        worst
    }

    /// `max_i |b_i|` over the interior rows, or 1 when `b = 0`.
    pub fn rhs_scale(&self) -> f64 {
        let n = self.len();
        let b = self.rhs[1..n - 1].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if b > 0.0 {
            b
        } else {
            1.0
        }
    }

    /// `max_i (|upper_i| + |diag_i| + |lower_i|)` over the interior rows.
    pub fn operator_norm(&self) -> f64 {
        let n = self.len();
        (1..n - 1)
            .map(|i| self.upper[i].abs() + self.diag[i].abs() + self.lower[i].abs())
            .fold(0.0, f64::max)
    }

    /// Residual relative to the right-hand side, `‖Av - b‖∞ / ‖b‖∞`.
    ///
    /// Unlike a diagonally scaled residual, this does not shrink like `Δr²`
    /// as the mesh is refined, so one tolerance means the same accuracy of
    /// the direction on coarse and fine meshes.
    pub fn relative_residual(&self, v: &[f64]) -> f64 {
        self.residual_max(v) / self.rhs_scale()
    }
}

/// Build the descent system at `w1`.
pub fn assemble_system(model: &NonlinearityModel, w1: &RadialFunction) -> TridiagonalSystem {
    let mut sys = TridiagonalSystem::helmholtz(*w1.grid());
    let dr = w1.grid().spacing();
    let w = w1.values();
    let lambda = model.lambda();
    let centre = 2.0 / (dr * dr) + lambda;
    for i in 1..w.len() - 1 {
        sys.rhs[i] = -sys.upper[i] * w[i + 1] + centre * w[i] - sys.lower[i] * w[i - 1] - model.f(w[i]);
    }
    sys
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SorOptions {
    /// Relaxation factor in `(0, 2)`.
    pub omega: f64,
    /// Bound on the relative residual `‖Av - b‖∞ / ‖b‖∞`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SorOptions {
    fn default() -> Self {
        Self {
            omega: 1.9,
            tolerance: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SorSolution {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Multiple of `ε·‖A‖∞·‖v‖∞` treated as a residual at rounding level.
const ROUNDOFF_MARGIN: f64 = 16.0;

#[inline]
fn close_boundaries(v: &mut [f64]) {
    let m = v.len() - 1;
    v[m] = 0.0;
    v[0] = (4.0 * v[1] - v[2]) / 3.0;
}

/// SOR update written as `v_i ← keep·v_i + a_i + p_i·v_{i+1} + q_i·v_{i-1}`,
/// which leaves a single multiply-add on the loop-carried dependency.
struct Relaxation<'a> {
    system: &'a TridiagonalSystem,
    keep: f64,
    a: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl<'a> Relaxation<'a> {
    fn new(system: &'a TridiagonalSystem, omega: f64) -> Self {
        let n = system.len();
        let mut a = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 1..n - 1 {
            let w = omega / system.diag[i];
            a[i] = w * system.rhs[i];
            p[i] = -w * system.upper[i];
            q[i] = -w * system.lower[i];
        }
        Self {
            system,
            keep: 1.0 - omega,
            a,
            p,
            q,
        }
    }

    /// One sweep over `i = 1..M-1` followed by the boundary closures.
    ///
    /// Returns `max_i |(Av - b)_i|` and `max_i |v_i|` for the updated
    /// iterate. Row `i - 1` only involves `v_{i-2..i}`, so its residual is
    /// final as soon as `v_i` has been updated and is accumulated in the same
    /// pass. Rows `M - 2` and `M - 1` touch `v_M`, and row 1 does not depend
    /// on `v_0`, so only those two are evaluated after the closures.
    fn sweep(&self, v: &mut [f64]) -> (f64, f64) {
        let sys = self.system;
        let n = v.len();
        assert!(n >= 3 && sys.len() == n);
        let (up, dg, lo, rhs) = (&sys.upper[..n], &sys.diag[..n], &sys.lower[..n], &sys.rhs[..n]);
        let (a, p, q) = (&self.a[..n], &self.p[..n], &self.q[..n]);
        let keep = self.keep;
        let mut worst: f64 = 0.0;
        let mut size: f64 = 0.0;
        // row 1 has no lower neighbour in the residual pass
        let mut prev = keep * v[1] + a[1] + p[1] * v[2] + q[1] * v[0];
        v[1] = prev;
        size = size.max(prev.abs());
        for i in 2..n - 1 {
            let vi = keep * v[i] + a[i] + p[i] * v[i + 1] + q[i] * prev;
            let j = i - 1;
            let r = (up[j] * vi + dg[j] * prev + lo[j] * v[j - 1] - rhs[j]).abs();
            v[i] = vi;
            // plain comparisons; `f64::max` handles NaN and does not vectorize
            if r > worst {
                worst = r;
            }
            if vi.abs() > size {
                size = vi.abs();
            }
            prev = vi;
        }
        close_boundaries(v);
        // rows M-2 and M-1 involve v_M, reset by the closure
        for j in (n.saturating_sub(3)).max(1)..n - 1 {
            let r = up[j] * v[j + 1] + dg[j] * v[j] + lo[j] * v[j - 1] - rhs[j];
            worst = worst.max(r.abs());
        }
        (worst, size.max(v[0].abs()))
    }
}

/// Successive over-relaxation, sweeping `i = 1..M-1` in order, until the
/// relative residual drops to `tolerance`.
pub fn sor_solve(system: &TridiagonalSystem, options: &SorOptions, initial: Option<&[f64]>) -> Result<SorSolution> {
    let SorOptions {
        omega,
        tolerance,
        max_iterations,
    } = *options;
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::Config(format!("SOR relaxation must lie in (0, 2), got {omega}")));
    }
    let n = system.len();
    let mut v = match initial {
        Some(x) if x.len() == n => x.to_vec(),
        Some(x) => {
            return Err(Error::Dimension {
                expected: n,
                actual: x.len(),
            })
        }
        None => vec![0.0; n],
    };
    close_boundaries(&mut v);
    let scale = system.rhs_scale();
    // The residual of a row cannot be evaluated more accurately than about
    // ε·‖A‖·‖v‖; below that level further sweeps only stir rounding noise.
    let noise = ROUNDOFF_MARGIN * f64::EPSILON * system.operator_norm() / scale;
    let mut residual = system.relative_residual(&v);
    let mut size = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let relax = Relaxation::new(system, omega);
    let mut iterations = 0;
    while residual > tolerance.max(noise * size) {
        if iterations >= max_iterations {
            return Err(Error::SorNonConvergence { iterations, residual });
        }
        let (worst, vmax) = relax.sweep(&mut v);
        residual = worst / scale;
        size = vmax;
        iterations += 1;
    }
    Ok(SorSolution {
        values: v,
        iterations,
        residual,
    })
}

/// Exact solution of the interior rows by the Thomas algorithm.
///
/// Row 1 has no lower coefficient and `v_M = 0`, so rows `1..M-1` form a
/// closed tridiagonal system; `v_0` follows from the closure. This is the
/// fixed point SOR converges to, obtained in `O(M)` operations. The matrix is
/// diagonally dominant for `Δ - 1`, so no pivoting is needed.
pub fn thomas_solve(system: &TridiagonalSystem) -> Result<SorSolution> {
    let n = system.len();
    let (up, dg, lo, rhs) = (&system.upper, &system.diag, &system.lower, &system.rhs);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (sub, prev_c, prev_d) = if i == 1 {
            (0.0, 0.0, 0.0)
        } else {
            (lo[i], c[i - 1], d[i - 1])
        };
        let denom = dg[i] - sub * prev_c;
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::NonFinite { node: i, value: denom });
        }
        c[i] = up[i] / denom;
        d[i] = (rhs[i] - sub * prev_d) / denom;
    }
    let mut v = vec![0.0; n];
    for i in (1..n - 1).rev() {
        v[i] = d[i] - c[i] * v[i + 1];
    }
    close_boundaries(&mut v);
    let residual = system.relative_residual(&v);
    Ok(SorSolution {
        values: v,
        iterations: 0,
        residual,
    })
}

/// Linear solver for the descent system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    /// Successive over-relaxation with [`SorOptions`].
    #[default]
    Sor,
    /// Direct tridiagonal elimination.
    Thomas,
}

impl std::str::FromStr for LinearSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sor" => Ok(Self::Sor),
            "thomas" => Ok(Self::Thomas),
            other => Err(Error::Config(format!("unknown linear solver {other:?}"))),
        }
    }
}

/// Unit-norm descent direction plus the bookkeeping of the solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentDirection {
    /// `v / ‖v‖`, or zero when `‖v‖ = 0`.
    pub direction: RadialFunction,
    /// The solved `v` itself.
    pub raw: RadialFunction,
    /// `‖v‖` in H¹.
    pub raw_norm: f64,
    pub sor_iterations: usize,
    pub final_residual: f64,
}

/// Solve for `v = -∇_{H¹} I(w1)` and normalize it.
///
/// `warm_start` seeds SOR (typically the previous raw direction).
pub fn steepest_direction(
    model: &NonlinearityModel,
    w1: &RadialFunction,
    options: &SorOptions,
    warm_start: Option<&[f64]>,
) -> Result<DescentDirection> {
    solve_direction(model, w1, LinearSolver::Sor, options, warm_start)
}

/// [`steepest_direction`] with a choice of linear solver.
pub fn solve_direction(
    model: &NonlinearityModel,
    w1: &RadialFunction,
    solver: LinearSolver,
    options: &SorOptions,
    warm_start: Option<&[f64]>,
) -> Result<DescentDirection> {
    let system = assemble_system(model, w1);
    let sol = match solver {
        LinearSolver::Sor => {
            let warm = warm_start.filter(|x| x.len() == system.len());
            sor_solve(&system, options, warm)?
        }
        LinearSolver::Thomas => thomas_solve(&system)?,
    };
    let raw = RadialFunction::new(*w1.grid(), sol.values)?;
    let raw_norm = h1_norm_sq(&raw).max(0.0).sqrt();
    let direction = if raw_norm > 0.0 {
        raw.scaled_values(1.0 / raw_norm)
    } else {
        RadialFunction::zeros(*w1.grid())
    };
    Ok(DescentDirection {
        direction,
        raw,
        raw_norm,
        sor_iterations: sol.iterations,
        final_residual: sol.residual,
    })
}
