//! Minimization of the action on the Pohozaev manifold.
//!
//! Each outer iteration projects the current point onto `𝒫`, computes the
//! H¹ steepest descent direction `v̂` there, and minimizes
//! `φ(α) = I(P(w + αv̂))` by stepping `α_k = kα₀` until `φ` rises, then
//! refining `α₀ ← α₀/10` from the best point down to `α_min`. `P` is the
//! dilation onto `𝒫`; it never fails while `∫G > 0` and maximizes `I` along
//! `t ↦ u(·/t)`.
//!
//! When the line has no minimum (φ keeps decreasing, the dilation collapses,
//! or `∫G` turns nonpositive) the solver restarts from the furthest feasible
//! point on the line.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::descent::{solve_direction, LinearSolver, SorOptions};
use crate::energy::{action_i, project, Moments, ProjectionResult};
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityModel;
use crate::radial::{RadialFunction, RadialGrid, MIN_PANELS};

/// Numerical parameters of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Panels `M` of the radial mesh (`M + 1` nodes).
    pub panels: usize,
    /// Initial extent `R*` of the mesh.
    pub r_star: f64,
    /// Coarsest line-search step `α₀`.
    pub alpha0: f64,
    /// Finest line-search step.
    pub alpha_min: f64,
    /// Maximum number of steps `K` per line-search level.
    pub line_search_cap: usize,
    /// Stop once the H¹ norm of the descent direction drops below this.
    pub eps_stop: f64,
    /// Solver for the descent system.
    pub linear_solver: LinearSolver,
    pub sor_omega: f64,
    pub sor_tol: f64,
    pub sor_max_iterations: usize,
    /// Project onto the manifold every `N_r`-th line-search step.
    pub reproject_stride: usize,
    pub max_outer_iterations: usize,
    /// A dilation parameter below this triggers a restart.
    pub t_min: f64,
    pub positivity_tol: f64,
    /// Restarts allowed before giving up.
    pub max_restarts: usize,
    /// Amplitude `A` of the default guess `A·exp(-σr²)`.
    pub guess_amplitude: f64,
    /// Width `σ` of the default guess.
    pub guess_width: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            panels: 1000,
            r_star: 1.0,
            alpha0: 0.1,
            alpha_min: 1e-10,
            line_search_cap: 1000,
            eps_stop: 1e-3,
            linear_solver: LinearSolver::Sor,
            sor_omega: 1.9,
            sor_tol: 1e-10,
            sor_max_iterations: 1_000_000,
            reproject_stride: 1,
            max_outer_iterations: 10_000,
            t_min: 1e-6,
            positivity_tol: 1e-8,
            max_restarts: 50,
            guess_amplitude: 100.0,
            guess_width: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r_star", self.r_star),
            ("alpha0", self.alpha0),
            ("alpha_min", self.alpha_min),
            ("eps_stop", self.eps_stop),
            ("sor_tol", self.sor_tol),
            ("t_min", self.t_min),
            ("positivity_tol", self.positivity_tol),
            ("guess_amplitude", self.guess_amplitude),
            ("guess_width", self.guess_width),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {x}")));
            }
        }
        if self.panels < MIN_PANELS {
            return Err(Error::Config(format!(
                "panels must be at least {MIN_PANELS}, got {}",
                self.panels
            )));
        }
        if self.alpha_min > self.alpha0 {
            return Err(Error::Config(format!(
                "alpha_min ({}) exceeds alpha0 ({})",
                self.alpha_min, self.alpha0
            )));
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return Err(Error::Config(format!(
                "sor_omega must lie in (0, 2), got {}",
                self.sor_omega
            )));
        }
        for (name, n) in [
            ("line_search_cap", self.line_search_cap),
            ("sor_max_iterations", self.sor_max_iterations),
            ("reproject_stride", self.reproject_stride),
            ("max_outer_iterations", self.max_outer_iterations),
        ] {
            if n == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn sor_options(&self) -> SorOptions {
        SorOptions {
            omega: self.sor_omega,
            tolerance: self.sor_tol,
            max_iterations: self.sor_max_iterations,
        }
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_star, self.panels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    RestartedExhausted,
    /// The line search could not move although `‖v‖ ≥ ε`.
    Stalled,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::RestartedExhausted => "restarted_exhausted",
            SolveStatus::Stalled => "stalled",
        }
    }
}

/// One accepted outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `I` at the projected point reached by this iteration.
    pub action: f64,
    /// Dilation applied by that projection.
    pub t_star: f64,
    /// Accepted step `α̂` along the unit direction.
    pub alpha: f64,
    /// `‖v‖` of the direction used by this iteration.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: RadialFunction,
    pub action: f64,
    /// `‖v‖` at the last computed direction.
    pub grad_norm: f64,
    pub u_at_zero: f64,
    pub outer_iterations: usize,
    pub restarts: usize,
    pub sor_sweeps: usize,
    pub trace: Vec<TraceEntry>,
    pub status: SolveStatus,
}

impl SolveResult {
    pub fn r_star_final(&self) -> f64 {
        self.solution.grid().extent()
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            u0: self.u_at_zero,
            action: self.action,
            v_norm: self.grad_norm,
            iterations: self.outer_iterations,
            restarts: self.restarts,
            status: self.status,
            r_star_final: self.r_star_final(),
        }
    }
}

/// Scalar outcome of a solve, as written to `result.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub u0: f64,
    pub action: f64,
    pub v_norm: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub status: SolveStatus,
    #[serde(rename = "R_star_final")]
    pub r_star_final: f64,
}

/// Nodal samples of `A·exp(-σr²)` with the last node set to zero.
///
/// Descent directions vanish at `R*`, so whatever value the guess has there
/// is carried unchanged to the solution; zeroing it imposes the boundary
/// condition at infinity from the start.
pub fn initial_guess(amplitude: f64, width: f64, grid: RadialGrid) -> Result<RadialFunction> {
    if !(amplitude > 0.0 && width > 0.0) {
        return Err(Error::Domain(format!(
            "guess amplitude and width must be positive, got {amplitude}, {width}"
        )));
    }
    let last = grid.panels();
    let values = grid
        .nodes()
        .enumerate()
        .map(|(i, r)| {
            if i == last {
                0.0
            } else {
                amplitude * (-width * r * r).exp()
            }
        })
        .collect();
    RadialFunction::new(grid, values)
}

/// Value of `φ` at one trial step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineValue {
    Value(f64),
    /// `∫G ≤ 0`: no projection exists.
    Infeasible,
    /// The projection exists but its dilation is below `t_min`.
    Collapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartReason {
    /// `φ` decreased for all `K` steps.
    Unbounded,
    Infeasible,
    Collapsed,
}

/// Result of [`refine_line`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearch {
    Minimum {
        alpha: f64,
        value: f64,
    },
    Restart {
        reason: RestartReason,
        /// Base offset and step of the scan that failed.
        offset: f64,
        step: f64,
    },
}

/// Bracketing line search with decimal refinement.
///
/// `phi(α, k)` is called with the trial step `α ≥ 0` and its index `k` within
/// the current scan (`k = 0` for the base point). At every level the scan
/// moves in whichever direction decreases `φ` (backwards only while `α ≥ 0`),
/// stops at the first rise, and keeps the last point before it.
pub fn refine_line(
    mut phi: impl FnMut(f64, usize) -> LineValue,
    alpha0: f64,
    alpha_min: f64,
    cap: usize,
) -> Result<LineSearch> {
    let mut current = match phi(0.0, 0) {
        LineValue::Value(v) => v,
        LineValue::Infeasible => {
            return Ok(LineSearch::Restart {
                reason: RestartReason::Infeasible,
                offset: 0.0,
                step: alpha0,
            })
        }
        LineValue::Collapsed => {
            return Ok(LineSearch::Restart {
                reason: RestartReason::Collapsed,
                offset: 0.0,
                step: alpha0,
            })
        }
    };
    let mut offset = 0.0;
    let mut step = alpha0;
    // guards against 0.1 not being exact in binary
    let floor = alpha_min * (1.0 - 1e-9);
    while step >= floor {
        let restart = |reason| LineSearch::Restart { reason, offset, step };
        let forward = match phi(offset + step, 1) {
            LineValue::Value(v) => v,
            LineValue::Infeasible => return Ok(restart(RestartReason::Infeasible)),
            LineValue::Collapsed => return Ok(restart(RestartReason::Collapsed)),
        };
        let mut sign = 1.0;
        let mut first = forward;
        if forward >= current {
            // both neighbours may be lower when the base is a local maximum
            // of φ; take the lower one
            let back_room = offset - step >= -1e-12 * step;
            let backward = if back_room {
                match phi((offset - step).max(0.0), 1) {
                    LineValue::Value(v) => Some(v),
                    _ => None,
                }
            } else {
                None
            };
            match backward {
                Some(b) if b < current && b < forward => {
                    sign = -1.0;
                    first = b;
                }
                _ => {
                    step /= 10.0;
                    continue;
                }
            }
        }

        let mut prev = current;
        let mut value = first;
        let mut k = 1usize;
        let mut strictly_decreasing = true;
        loop {
            if value > prev {
                break;
            }
            strictly_decreasing &= value < prev;
            prev = value;
            if sign > 0.0 && k == cap {
                if strictly_decreasing {
                    return Ok(restart(RestartReason::Unbounded));
                }
                return Err(Error::FlatLandscape { steps: cap });
            }
            k += 1;
            let alpha = offset + sign * k as f64 * step;
            if alpha < -1e-12 * step {
                break;
            }
            value = match phi(alpha.max(0.0), k) {
                LineValue::Value(v) => v,
                LineValue::Infeasible if sign > 0.0 => return Ok(restart(RestartReason::Infeasible)),
                LineValue::Collapsed if sign > 0.0 => return Ok(restart(RestartReason::Collapsed)),
                _ => break,
            };
        }
        offset = (offset + sign * (k - 1) as f64 * step).max(0.0);
        current = prev;
        step /= 10.0;
    }
    Ok(LineSearch::Minimum {
        alpha: offset,
        value: current,
    })
}

/// Outcome of minimizing along a descent direction.
#[derive(Debug, Clone, PartialEq)]
pub enum LineOutcome {
    LineMinimum {
        alpha: f64,
        projection: ProjectionResult,
    },
    NeedRestart {
        reason: RestartReason,
        /// Largest `k ≤ K` for which the restart point has `∫G > 0`.
        k0: usize,
        restart_from: RadialFunction,
    },
}

fn line_point(base: &[f64], direction: &[f64], alpha: f64, out: &mut Vec<f64>) {
    out.clear();
    out.extend(base.iter().zip(direction).map(|(u, v)| u + alpha * v));
}

/// Minimize `α ↦ I(P(w1 + αv̂))` for `α ≥ 0`.
///
/// `w1` should lie on the manifold and `direction` should have unit H¹ norm.
pub fn line_minimize(
    model: &NonlinearityModel,
    w1: &RadialFunction,
    direction: &RadialFunction,
    config: &SolverConfig,
) -> Result<LineOutcome> {
    if direction.values().len() != w1.values().len() {
        return Err(Error::Dimension {
            expected: w1.values().len(),
            actual: direction.values().len(),
        });
    }
    let lambda = model.lambda();
    let dr = w1.grid().spacing();
    let base = w1.values();
    let dir = direction.values();
    let stride = config.reproject_stride.max(1);
    let mut buf = Vec::with_capacity(base.len());

    let search = refine_line(
        |alpha, k| {
            line_point(base, dir, alpha, &mut buf);
            let m = Moments::from_nodes(model, &buf, dr);
            if k % stride != 0 {
                return LineValue::Value(m.action(lambda));
            }
            match m.projection_t(lambda) {
                Err(_) => LineValue::Infeasible,
                Ok(t) if t < config.t_min => LineValue::Collapsed,
                Ok(t) => LineValue::Value(t * m.grad / 3.0),
            }
        },
        config.alpha0,
        config.alpha_min,
        config.line_search_cap,
    )?;

    match search {
        LineSearch::Minimum { alpha, .. } => {
            let accepted = w1.axpy(alpha, direction)?;
            let projection = project(model, &accepted)?;
            Ok(LineOutcome::LineMinimum { alpha, projection })
        }
        LineSearch::Restart { reason, offset, step } => {
            let mut k0 = 0;
            for k in (1..=config.line_search_cap).rev() {
                line_point(base, dir, offset + k as f64 * step, &mut buf);
                if Moments::from_nodes(model, &buf, dr).g_integral(lambda) > 0.0 {
                    k0 = k;
                    break;
                }
            }
            let restart_from = w1.axpy(offset + k0 as f64 * step, direction)?;
            Ok(LineOutcome::NeedRestart {
                reason,
                k0,
                restart_from,
            })
        }
    }
}

/// Minimize the action on the Pohozaev manifold starting from `guess`.
pub fn solve(model: &NonlinearityModel, config: &SolverConfig, guess: &RadialFunction) -> Result<SolveResult> {
    config.validate()?;
    let lambda = model.lambda();
    let g0 = Moments::of(model, guess).g_integral(lambda);
    if !(g0 > 0.0) {
        return Err(Error::InfeasibleGuess { g_integral: g0 });
    }
    let sor = config.sor_options();

    let mut w0 = guess.clone();
    let mut trace = Vec::new();
    let mut iteration = 0usize;
    let mut restarts = 0usize;
    let mut positivity_restarts = 0usize;
    let mut sor_sweeps = 0usize;
    let mut warm: Option<Vec<f64>> = None;
    // ‖v‖ of the most recent direction; the guess has none yet
    let mut last_norm = f64::INFINITY;

    let finish = |w: RadialFunction, grad_norm, iteration, restarts, sor_sweeps, trace, status| {
        let action = action_i(model, &w);
        if w.grid().extent() < 5.0 / lambda.sqrt() {
            warn!(
                "final extent {:.3} is below 5/sqrt(λ) = {:.3}; the tail is likely truncated",
                w.grid().extent(),
                5.0 / lambda.sqrt()
            );
        }
        SolveResult {
            u_at_zero: w.at_origin(),
            solution: w,
            action,
            grad_norm,
            outer_iterations: iteration,
            restarts,
            sor_sweeps,
            trace,
            status,
        }
    };

    'restart: loop {
        // Step 1 and 2: dilate onto the manifold. Restart points are chosen
        // with ∫G > 0, so only the user's guess can fail here.
        let mut current = project(model, &w0)?;
        loop {
            let w1 = &current.projected;
            if iteration >= config.max_outer_iterations {
                return Ok(finish(
                    current.projected,
                    last_norm,
                    iteration,
                    restarts,
                    sor_sweeps,
                    trace,
                    SolveStatus::MaxIterations,
                ));
            }
            iteration += 1;

            // Step 3
            let dir = solve_direction(model, w1, config.linear_solver, &sor, warm.as_deref())?;
            sor_sweeps += dir.sor_iterations;
            last_norm = dir.raw_norm;
            debug!(
                "iter {iteration}: I = {:.10}, |v| = {:.3e}, R* = {:.4}, sor = {}",
                current.action_at_t,
                dir.raw_norm,
                w1.grid().extent(),
                dir.sor_iterations
            );
            if dir.raw_norm < config.eps_stop {
                if w1.min_value() >= -config.positivity_tol {
                    return Ok(finish(
                        current.projected,
                        dir.raw_norm,
                        iteration,
                        restarts,
                        sor_sweeps,
                        trace,
                        SolveStatus::Converged,
                    ));
                }
                positivity_restarts += 1;
                warn!(
                    "critical point changes sign (min {:.3e}); restart {positivity_restarts}",
                    w1.min_value()
                );
                if positivity_restarts > 3 {
                    return Ok(finish(
                        current.projected,
                        dir.raw_norm,
                        iteration,
                        restarts,
                        sor_sweeps,
                        trace,
                        SolveStatus::RestartedExhausted,
                    ));
                }
                w0 = lower_energy_guess(model, config, current.action_at_t)?;
                restarts += 1;
                warm = None;
                continue 'restart;
            }
            warm = Some(dir.raw.values().to_vec());

            // Step 4 and 5
            match line_minimize(model, w1, &dir.direction, config)? {
                LineOutcome::LineMinimum { alpha, projection } => {
                    if alpha == 0.0 {
                        return Ok(finish(
                            current.projected,
                            dir.raw_norm,
                            iteration,
                            restarts,
                            sor_sweeps,
                            trace,
                            SolveStatus::Stalled,
                        ));
                    }
                    trace.push(TraceEntry {
                        iteration,
                        action: projection.action_at_t,
                        t_star: projection.t_star,
                        alpha,
                        grad_norm: dir.raw_norm,
                    });
                    current = projection;
                }
                LineOutcome::NeedRestart {
                    reason,
                    k0,
                    restart_from,
                } => {
                    restarts += 1;
                    debug!("restart {restarts} ({reason:?}, k0 = {k0})");
                    if restarts > config.max_restarts {
                        return Ok(finish(
                            current.projected,
                            dir.raw_norm,
                            iteration,
                            restarts,
                            sor_sweeps,
                            trace,
                            SolveStatus::RestartedExhausted,
                        ));
                    }
                    w0 = restart_from;
                    warm = None;
                    continue 'restart;
                }
            }
        }
    }
}

/// A positive Gaussian guess whose action lies below `level`.
fn lower_energy_guess(model: &NonlinearityModel, config: &SolverConfig, level: f64) -> Result<RadialFunction> {
    let grid = config.grid()?;
    let mut amplitude = config.guess_amplitude;
    for _ in 0..64 {
        let guess = initial_guess(amplitude, config.guess_width, grid)?;
        let m = Moments::of(model, &guess);
        if m.g_integral(model.lambda()) > 0.0 && m.action(model.lambda()) < level {
            return Ok(guess);
        }
        amplitude *= 2.0;
    }
    Err(Error::Domain(
        "no positive Gaussian guess below the critical level".into(),
    ))
}

/// Solve with the default Gaussian guess built from `config`.
pub fn solve_default(model: &NonlinearityModel, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let guess = initial_guess(config.guess_amplitude, config.guess_width, config.grid()?)?;
    solve(model, config, &guess)
}
