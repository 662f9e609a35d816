//! The action `I`, the Pohozaev functional `J`, and projection onto the
//! Pohozaev manifold `𝒫 = {u ≠ 0 : J(u) = 0}` along dilations `u(·/t)`.
//!
//! In R^3, with `a = ∫|∇u|²` and `g = ∫G(u)`,
//!
//! ```text
//! h(t) = I(u(·/t)) = t·a/2 - t³·g,      J(u) = a - 6g,
//! ```
//!
//! so `h` has a single positive critical point `t*² = a / (6g)` whenever
//! `g > 0`, and there `h(t*) = t*·a/3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityModel;
use crate::radial::RadialFunction;

/// Space dimension.
pub const DIM: f64 = 3.0;
/// Critical Sobolev exponent `2N/(N-2)` for `N = 3`.
pub const CRITICAL_EXPONENT: f64 = 2.0 * DIM / (DIM - 2.0);

/// Integrals over R^3 (truncated at `R*`) that determine `I`, `J` and the
/// dilation fiber of a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `∫|∇u|²`
    pub grad: f64,
    /// `∫u²`
    pub mass: f64,
    /// `∫F(u)`
    pub primitive: f64,
}

impl Moments {
    /// All three trapezoid sums in one pass over the nodes.
    pub fn of(model: &NonlinearityModel, w: &RadialFunction) -> Self {
        Self::from_nodes(model, w.values(), w.grid().spacing())
    }

    /// Same as [`Moments::of`] for raw nodal values with spacing `dr`.
    ///
    /// The derivative stencils match [`crate::radial::derivative`]; the
    /// `r = 0` node carries zero weight.
    pub fn from_nodes(model: &NonlinearityModel, u: &[f64], dr: f64) -> Self {
        let m = u.len() - 1;
        let inv2h = 0.5 / dr;
        let (mut grad, mut mass, mut prim) = (0.0, 0.0, 0.0);
        for i in 1..=m {
            let r = i as f64 * dr;
            let (weight, du) = if i == m {
                (0.5 * r * r, (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) * inv2h)
            } else {
                (r * r, (u[i + 1] - u[i - 1]) * inv2h)
            };
            grad += weight * du * du;
            mass += weight * u[i] * u[i];
            prim += weight * model.primitive(u[i]);
        }
        let scale = 4.0 * std::f64::consts::PI * dr;
        Self {
            grad: scale * grad,
            mass: scale * mass,
            primitive: scale * prim,
        }
    }

    /// `∫G(u) = ∫F(u) - λ/2 ∫u²`.
    #[inline]
    pub fn g_integral(&self, lambda: f64) -> f64 {
        self.primitive - 0.5 * lambda * self.mass
    }

    #[inline]
    pub fn action(&self, lambda: f64) -> f64 {
        0.5 * (self.grad + lambda * self.mass) - self.primitive
    }

    #[inline]
    pub fn pohozaev(&self, lambda: f64) -> f64 {
        self.grad - CRITICAL_EXPONENT * self.g_integral(lambda)
    }

    /// Dilation parameter of the projection, if it exists.
    pub fn projection_t(&self, lambda: f64) -> Result<f64> {
        let g = self.g_integral(lambda);
        if !(g > 0.0) || !(self.grad > 0.0) {
            return Err(Error::ProjectionInfeasible { g_integral: g });
        }
        Ok(((DIM - 2.0) * self.grad / (2.0 * DIM * g)).sqrt())
    }

    /// `max_t I(u(·/t))`.
    pub fn projected_action(&self, lambda: f64) -> Result<f64> {
        let t = self.projection_t(lambda)?;
        Ok(t * self.grad / DIM)
    }

    pub fn h(&self, lambda: f64, t: f64) -> f64 {
        0.5 * t * self.grad - t * t * t * self.g_integral(lambda)
    }

    pub fn h_prime(&self, lambda: f64, t: f64) -> f64 {
        0.5 * self.grad - 3.0 * t * t * self.g_integral(lambda)
    }
}

/// `I(w) = ½∫(|∇w|² + λw²) - ∫F(w)`.
pub fn action_i(model: &NonlinearityModel, w: &RadialFunction) -> f64 {
    Moments::of(model, w).action(model.lambda())
}

/// `J(w) = ∫|∇w|² - 6∫G(w)`.
pub fn pohozaev_j(model: &NonlinearityModel, w: &RadialFunction) -> f64 {
    Moments::of(model, w).pohozaev(model.lambda())
}

/// `∫G(w)`.
pub fn g_integral(model: &NonlinearityModel, w: &RadialFunction) -> f64 {
    Moments::of(model, w).g_integral(model.lambda())
}

/// The `t > 0` for which `w(·/t)` lies on the Pohozaev manifold.
pub fn project_t(model: &NonlinearityModel, w: &RadialFunction) -> Result<f64> {
    Moments::of(model, w).projection_t(model.lambda())
}

/// Outcome of a projection onto the Pohozaev manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub t_star: f64,
    pub projected: RadialFunction,
    pub action_at_t: f64,
    /// `∫G` of the function before dilation.
    pub g_integral: f64,
}

/// Dilate `w` onto the Pohozaev manifold by stretching its mesh.
pub fn project(model: &NonlinearityModel, w: &RadialFunction) -> Result<ProjectionResult> {
    let moments = Moments::of(model, w);
    let lambda = model.lambda();
    let t_star = moments.projection_t(lambda)?;
    let projected = w.rescale(t_star)?;
    let action_at_t = action_i(model, &projected);
    debug_assert!(
        [0.5, 0.9, 1.1, 2.0]
            .iter()
            .all(|&s| moments.h(lambda, s * t_star) <= action_at_t + 1e-9 * action_at_t.abs().max(1.0)),
        "projection is not the fiber maximum"
    );
    Ok(ProjectionResult {
        t_star,
        projected,
        action_at_t,
        g_integral: moments.g_integral(lambda),
    })
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("dilation must be positive, got {t}")))
    }
}

/// `h(t) = I(w(·/t))`.
pub fn h_eval(model: &NonlinearityModel, w: &RadialFunction, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(Moments::of(model, w).h(model.lambda(), t))
}

/// `h'(t)`.
pub fn h_prime(model: &NonlinearityModel, w: &RadialFunction, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(Moments::of(model, w).h_prime(model.lambda(), t))
}

/// `I(t·w)` along the amplitude ray for each `t` in `t_grid`.
pub fn fiber_scan(model: &NonlinearityModel, w: &RadialFunction, t_grid: &[f64]) -> Vec<(f64, f64)> {
    t_grid
        .iter()
        .map(|&t| (t, action_i(model, &w.scaled_values(t))))
        .collect()
}

/// Strict interior local maxima `(t, value)` of a scanned curve.
pub fn interior_maxima(scan: &[(f64, f64)]) -> Vec<(f64, f64)> {
    scan.windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1])
        .collect()
}
