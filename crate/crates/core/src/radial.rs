//! Uniform radial meshes, nodal functions and the quadratures used for
//! integrals over R^3 of radially symmetric functions.
//!
//! A radial function `u(|x|)` is stored by its values at `r_i = i·Δr`,
//! `i = 0..=M`. Integrals over R^3 become `4π ∫ g(u) r² dr` and are evaluated
//! with the composite trapezoid rule, truncated at `R* = M·Δr`.
//!
//! Dilations `u(·/t)` never resample: [`RadialFunction::rescale`] keeps the
//! nodal values and stretches the spacing. Every quadrature below is then
//! homogeneous in `Δr`, so the discrete functionals pick up the exact factors
//! `t` (gradient energy) and `t³` (potential terms).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest panel count; the one-sided derivative closures need three
/// interior nodes.
pub const MIN_PANELS: usize = 4;

const FOUR_PI: f64 = 4.0 * PI;

/// Uniform mesh `r_i = i·Δr` on `[0, R*]` with `M` panels and `M + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    panels: usize,
    spacing: f64,
}

impl RadialGrid {
    /// Mesh of `panels` panels covering `[0, extent]`.
    pub fn new(extent: f64, panels: usize) -> Result<Self> {
        if panels < MIN_PANELS {
            return Err(Error::Grid(format!("need at least {MIN_PANELS} panels, got {panels}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::Grid(format!("extent must be positive, got {extent}")));
        }
        Ok(Self {
            panels,
            spacing: extent / panels as f64,
        })
    }

    pub fn with_spacing(spacing: f64, panels: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Grid(format!("spacing must be positive, got {spacing}")));
        }
        Self::new(spacing * panels as f64, panels).map(|g| Self { spacing, ..g })
    }

    #[inline]
    pub fn panels(&self) -> usize {
        self.panels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.panels + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn extent(&self) -> f64 {
        self.spacing * self.panels as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// The same node count with every coordinate multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {t}")));
        }
        Ok(Self {
            panels: self.panels,
            spacing: self.spacing * t,
        })
    }
}

/// Nodal samples of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { node, value });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at the origin.
    pub fn at_origin(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear interpolation; zero beyond the last node.
    pub fn sample(&self, r: f64) -> f64 {
        let dr = self.grid.spacing();
        if r <= 0.0 {
            return self.values[0];
        }
        let x = r / dr;
        let i = x.floor() as usize;
        let m = self.grid.panels();
        if i >= m {
            return if x <= m as f64 + 1e-9 { self.values[m] } else { 0.0 };
        }
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// `self + alpha·direction`, node by node.
    ///
    /// The two functions must have the same node count; the result lives on
    /// `self`'s grid.
    pub fn axpy(&self, alpha: f64, direction: &RadialFunction) -> Result<Self> {
        if direction.values.len() != self.values.len() {
            return Err(Error::Dimension {
                expected: self.values.len(),
                actual: direction.values.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&direction.values)
            .map(|(u, v)| u + alpha * v)
            .collect();
        Self::new(self.grid, values)
    }

    pub fn scaled_values(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Represents `u(·/t)`: the values are kept, the mesh is stretched by `t`.
    pub fn rescale(&self, t: f64) -> Result<Self> {
        Ok(Self {
            grid: self.grid.scaled(t)?,
            values: self.values.clone(),
        })
    }

    pub fn with_grid(&self, grid: RadialGrid) -> Result<Self> {
        Self::new(grid, self.values.clone())
    }
}

/// Composite trapezoid rule `Δr·((h_0 + h_M)/2 + Σ h_i)`.
pub fn trapezoid(values: &[f64], grid: &RadialGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    let last = values.len() - 1;
    let inner: f64 = values[1..last].iter().sum();
    Ok(grid.spacing() * (0.5 * (values[0] + values[last]) + inner))
}

/// `∫_{|x| < R*} g(w(|x|)) dx = 4π ∫ g(w) r² dr` by the trapezoid rule.
pub fn radial_integral(g: impl Fn(f64) -> f64, w: &RadialFunction) -> Result<f64> {
    let grid = w.grid();
    let mut integrand = Vec::with_capacity(grid.len());
    for (i, (&u, r)) in w.values().iter().zip(grid.nodes()).enumerate() {
        let gu = g(u);
        if !gu.is_finite() {
            return Err(Error::NonFinite { node: i, value: gu });
        }
        integrand.push(gu * r * r);
    }
    Ok(FOUR_PI * trapezoid(&integrand, grid)?)
}

/// Nodal derivative: centered differences inside, second-order one-sided
/// differences at `r = 0` and `r = R*`.
pub fn derivative(w: &RadialFunction) -> Vec<f64> {
    let u = w.values();
    let m = u.len() - 1;
    let inv2h = 0.5 / w.grid().spacing();
    let mut du = vec![0.0; u.len()];
    du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2h;
    for i in 1..m {
        du[i] = (u[i + 1] - u[i - 1]) * inv2h;
    }
    du[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) * inv2h;
    du
}

/// `∫ |∇w|² dx` over the ball of radius `R*`.
pub fn grad_l2_sq(w: &RadialFunction) -> f64 {
    let integrand: Vec<f64> = derivative(w)
        .iter()
        .zip(w.grid().nodes())
        .map(|(d, r)| d * d * r * r)
        .collect();
    // lengths agree by construction
    FOUR_PI * trapezoid(&integrand, w.grid()).unwrap_or(f64::NAN)
}

/// Squared H¹ norm `∫ |∇w|² + w²`.
pub fn h1_norm_sq(w: &RadialFunction) -> f64 {
    grad_l2_sq(w) + l2_sq(w)
}

pub fn l2_sq(w: &RadialFunction) -> f64 {
    radial_integral(|u| u * u, w).unwrap_or(f64::NAN)
}

/// H¹ inner product with the same stencils as [`h1_norm_sq`].
pub fn h1_inner(a: &RadialFunction, b: &RadialFunction) -> Result<f64> {
    if a.values().len() != b.values().len() {
        return Err(Error::Dimension {
            expected: a.values().len(),
            actual: b.values().len(),
        });
    }
    let grid = a.grid();
    let da = derivative(a);
    let db = derivative(b);
    let integrand: Vec<f64> = grid
        .nodes()
        .enumerate()
        .map(|(i, r)| (da[i] * db[i] + a.values()[i] * b.values()[i]) * r * r)
        .collect();
    Ok(FOUR_PI * trapezoid(&integrand, grid)?)
}
