//! Checks shared by the property tests and the acceptance report. Each
//! returns a one-line summary on success and a description on failure.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use pohozaev::descent::{sor_solve, steepest_direction, SorOptions, TridiagonalSystem};
use pohozaev::energy::{action_i, pohozaev_j, project, Moments};
use pohozaev::radial::grad_l2_sq;
use pohozaev::{NonlinearityModel, RadialFunction, RadialGrid, SolveResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn models() -> Vec<NonlinearityModel> {
    vec![
        NonlinearityModel::power(1.0).unwrap(),
        NonlinearityModel::power(2.5).unwrap(),
        NonlinearityModel::asym_linear(1.0, 0.5).unwrap(),
        NonlinearityModel::asym_linear(0.3, 2.0).unwrap(),
        NonlinearityModel::quintic_example(),
        NonlinearityModel::nonmonotone(0.5, 1.0).unwrap(),
    ]
}

/// A smooth, positive, decaying profile `a·e^{-(r/b)²}(1 + c·cos r)` with a
/// zero at the end of the mesh.
pub fn bump(grid: RadialGrid, a: f64, b: f64, c: f64) -> RadialFunction {
    let end = grid.extent();
    let shape = |r: f64| a * (-(r / b).powi(2)).exp() * (1.0 + c * r.cos());
    let tail = shape(end);
    RadialFunction::from_fn(grid, |r| shape(r) - tail).unwrap()
}

/// A random start with `∫G > 0`; the amplitude grows until it projects.
pub fn random_start(rng: &mut ChaCha8Rng, model: &NonlinearityModel) -> RadialFunction {
    let grid = RadialGrid::new(10.0, rng.gen_range(100..400)).unwrap();
    let (b, c) = (rng.gen_range(0.7..2.5), rng.gen_range(0.0..0.3));
    let mut a = rng.gen_range(1.0..6.0);
    let mut w = bump(grid, a, b, c);
    while Moments::of(model, &w).g_integral(model.lambda()) <= 0.0 {
        a *= 1.5;
        w = bump(grid, a, b, c);
    }
    w
}

/// `|J| ≤ 1e-9·∫|∇u|²` after projecting `w`.
pub fn projection_residual(model: &NonlinearityModel, w: &RadialFunction) -> Check {
    let p = project(model, w).map_err(|e| e.to_string())?;
    let j = pohozaev_j(model, &p.projected);
    let scale = grad_l2_sq(&p.projected);
    if j.abs() <= 1e-9 * scale {
        Ok(format!("|J|/scale = {:.1e}", j.abs() / scale))
    } else {
        Err(format!("J = {j:e} with scale {scale:e} ({model})"))
    }
}

/// `∫|∇u_t|² = t∫|∇u|²`, `∫G(u_t) = t³∫G(u)` and `I(u_t) = h(t)` to rounding.
pub fn rescale_identities(model: &NonlinearityModel, w: &RadialFunction, t: f64) -> Check {
    let lambda = model.lambda();
    let before = Moments::of(model, w);
    let after = Moments::of(model, &w.rescale(t).map_err(|e| e.to_string())?);
    let tol = 1e-13;
    let scale = t.powi(3) * (before.primitive.abs() + lambda * before.mass);
    let grad_err = (after.grad - t * before.grad).abs() / (t * before.grad);
    let g_err = (after.g_integral(lambda) - t.powi(3) * before.g_integral(lambda)).abs() / scale;
    let h_err = (after.action(lambda) - before.h(lambda, t)).abs() / (t * before.grad + scale);
    let worst = grad_err.max(g_err).max(h_err);
    if worst <= tol {
        Ok(format!("worst relative error {worst:.1e}"))
    } else {
        Err(format!("t = {t}: errors {grad_err:e}, {g_err:e}, {h_err:e} ({model})"))
    }
}

/// Forward secant of `I` along the normalized steepest-descent direction is
/// negative for 20 seeded random starts.
pub fn descent_secants() -> Check {
    let models = models();
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = &models[rng.gen_range(0..models.len())];
        let w = random_start(&mut rng, model);
        let w1 = project(model, &w).map_err(|e| e.to_string())?.projected;
        let dir = steepest_direction(model, &w1, &SorOptions::default(), None).map_err(|e| e.to_string())?;
        let i0 = action_i(model, &w1);
        let h = 1e-6 * w1.max_abs();
        let moved = w1.axpy(h, &dir.direction).map_err(|e| e.to_string())?;
        let secant = (action_i(model, &moved) - i0) / h;
        if !(secant < 0.0) {
            return Err(format!("seed {seed} ({model}): secant {secant:e}"));
        }
        worst = worst.max(secant);
    }
    Ok(format!("20 seeds, largest secant {worst:.3e}"))
}

/// Observed order of the relaxation solve of `Δv - v = b` against the smooth
/// exact solution `e^{-r²} - e^{-R²}` on M = 250, 500, 1000.
pub fn sor_orders() -> Vec<f64> {
    let extent: f64 = 5.0;
    let shift = (-extent * extent).exp();
    let exact = |r: f64| (-r * r).exp() - shift;
    let rhs = |r: f64| (4.0 * r * r - 6.0) * (-r * r).exp() - exact(r);
    let options = SorOptions {
        tolerance: 1e-13,
        ..SorOptions::default()
    };
    let errors: Vec<f64> = [250usize, 500, 1000]
        .iter()
        .map(|&m| {
            let grid = RadialGrid::new(extent, m).unwrap();
            let mut sys = TridiagonalSystem::helmholtz(grid);
            sys.rhs = grid.nodes().map(rhs).collect();
            let sol = sor_solve(&sys, &options, None).unwrap();
            grid.nodes()
                .zip(&sol.values)
                .map(|(r, v)| (v - exact(r)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    errors.windows(2).map(|p| (p[0] / p[1]).log2()).collect()
}

pub fn sor_order() -> Check {
    let orders = sor_orders();
    if orders.iter().all(|o| (o - 2.0).abs() < 0.15) {
        Ok(format!("observed orders {orders:.3?}"))
    } else {
        Err(format!("observed orders {orders:?}"))
    }
}

/// Central differences of `F` reproduce `f` for every built-in model.
pub fn primitive_matches_f() -> Check {
    let d = 1e-5;
    let mut worst: f64 = 0.0;
    for model in models() {
        for k in -80..=80 {
            let u = k as f64 / 20.0;
            let numeric = (model.primitive(u + d) - model.primitive(u - d)) / (2.0 * d);
            let exact = model.f(u);
            let err = (numeric - exact).abs() / (1.0 + exact.abs());
            if err > 1e-6 {
                return Err(format!("{model} at u = {u}: {numeric} vs {exact}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

/// Actions along the trace never increase.
pub fn trace_monotone(result: &SolveResult) -> Check {
    for pair in result.trace.windows(2) {
        let (a, b) = (pair[0].action, pair[1].action);
        if b > a * (1.0 + 1e-12) {
            return Err(format!("iteration {}: {a} -> {b}", pair[1].iteration));
        }
    }
    Ok(format!("{} entries nonincreasing", result.trace.len()))
}

/// Finite-difference residual of `-u'' - (2/r)u' + λu - f(u)` at the nodes.
pub fn ode_residual(model: &NonlinearityModel, result: &SolveResult) -> Check {
    let u = result.solution.values();
    let grid = result.solution.grid();
    let h = grid.spacing();
    let f_max = u.iter().map(|&x| model.f(x).abs()).fold(0.0, f64::max);
    let worst = (1..u.len() - 1)
        .map(|i| {
            let r = grid.node(i);
            let lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) + (u[i + 1] - u[i - 1]) / (r * h);
            (-lap + model.lambda() * u[i] - model.f(u[i])).abs()
        })
        .fold(0.0, f64::max);
    if worst <= 1e-2 * f_max {
        Ok(format!("residual {worst:.3e} ≤ 1e-2·{f_max:.3e}"))
    } else {
        Err(format!("residual {worst:e} vs max|f| {f_max:e}"))
    }
}

/// Nodal values are ≥ -1e-8 and nonincreasing in r.
pub fn profile_shape(result: &SolveResult) -> Check {
    let u = result.solution.values();
    if let Some(x) = u.iter().find(|&&x| x < -1e-8) {
        return Err(format!("negative value {x:e}"));
    }
    for (i, pair) in u.windows(2).enumerate() {
        if pair[1] > pair[0] + 1e-8 {
            return Err(format!("node {i}: {} -> {}", pair[0], pair[1]));
        }
    }
    Ok(format!("{} nodes, min {:.2e}", u.len(), result.solution.min_value()))
}
