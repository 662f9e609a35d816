//! Problem instances `-Δu + λu = f(u)`: the nonlinearity `f`, its primitive
//! `F(u) = ∫_0^u f`, and `G(u) = F(u) - λu²/2`.
//!
//! Four families are built in. All of them are evaluated through an odd
//! extension (`f(-u) = -f(u)`, `F(-u) = F(u)`), which only matters for the
//! quintic family whose polynomial is not odd.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Profile radius of the two-maxima example.
pub const QUINTIC_PROFILE_RADIUS: f64 = 3.075;

/// `λ` used by the two-maxima example.
pub const QUINTIC_LAMBDA: f64 = 3.0;

/// Coefficients of `F(u) = B u³ - C u⁴ + D u⁵` for which `t ↦ I(t·u)` on the
/// two-maxima profile equals `P(κt)` with
/// `P(τ) = 4(1+√5)τ² - 4(2+√5)τ³ + (5+√5)τ⁴ - τ⁵`.
///
/// Generated by `scripts/derive_quintic.py`; see [`QuinticCalibration`] for
/// the same computation at run time.
pub const QUINTIC_B: f64 = 13.726_324_414_816_786;
pub const QUINTIC_C: f64 = 33.072_564_691_338_76;
pub const QUINTIC_D: f64 = 24.895_404_947_954_535;

/// Built-in nonlinearity families.
#[derive(Debug, Clone)]
pub enum Family {
    /// `f(u) = u³`.
    Power,
    /// `f(u) = u³ / (1 + s u²)`, asymptotically linear with slope `1/s`.
    AsymptoticallyLinear { s: f64 },
    /// `F(u) = B u³ - C u⁴ + D u⁵`.
    Quintic { b: f64, c: f64, d: f64 },
    /// `f(u) = (u⁷ - 5/2 u⁵ + 2u³) / (1 + s u⁶)`; `f(u)/u` is not monotone.
    NonMonotone { s: f64, primitive: Arc<PrimitiveTable> },
}

/// Identifier plus parameters; enough to rebuild a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Power { lambda: f64 },
    Asym { lambda: f64, s: f64 },
    Quintic { lambda: f64, b: f64, c: f64, d: f64 },
    Nonmono { lambda: f64, s: f64 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<NonlinearityModel> {
        match *self {
            ModelSpec::Power { lambda } => NonlinearityModel::power(lambda),
            ModelSpec::Asym { lambda, s } => NonlinearityModel::asym_linear(lambda, s),
            ModelSpec::Quintic { lambda, b, c, d } => NonlinearityModel::quintic(lambda, b, c, d),
            ModelSpec::Nonmono { lambda, s } => NonlinearityModel::nonmonotone(lambda, s),
        }
    }
}

/// A problem instance. Immutable once built and cheap to clone.
#[derive(Debug, Clone)]
pub struct NonlinearityModel {
    lambda: f64,
    family: Family,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("λ must be positive, got {lambda}")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {x}")))
    }
}

impl NonlinearityModel {
    pub fn power(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            family: Family::Power,
        })
    }

    /// Requires `λs < 1`; otherwise no ground state exists.
    pub fn asym_linear(lambda: f64, s: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_positive("s", s)?;
        if lambda * s >= 1.0 {
            return Err(Error::InfeasibleFamily(format!(
                "λs ≥ 1 (λ = {lambda}, s = {s}): no solution for f(u) = u³/(1+su²)"
            )));
        }
        Ok(Self {
            lambda,
            family: Family::AsymptoticallyLinear { s },
        })
    }

    pub fn quintic(lambda: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_positive("B", b)?;
        check_positive("C", c)?;
        check_positive("D", d)?;
        Ok(Self {
            lambda,
            family: Family::Quintic { b, c, d },
        })
    }

    /// The two-maxima example with its calibrated coefficients.
    pub fn quintic_example() -> Self {
        Self {
            lambda: QUINTIC_LAMBDA,
            family: Family::Quintic {
                b: QUINTIC_B,
                c: QUINTIC_C,
                d: QUINTIC_D,
            },
        }
    }

    pub fn nonmonotone(lambda: f64, s: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_positive("s", s)?;
        let primitive = Arc::new(PrimitiveTable::build(
            move |u| nonmonotone_f(u, s),
            NONMONO_TABLE_MAX,
            NONMONO_TABLE_CELLS,
        ));
        Ok(Self {
            lambda,
            family: Family::NonMonotone { s, primitive },
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Power => "power",
            Family::AsymptoticallyLinear { .. } => "asym",
            Family::Quintic { .. } => "quintic",
            Family::NonMonotone { .. } => "nonmono",
        }
    }

    pub fn spec(&self) -> ModelSpec {
        let lambda = self.lambda;
        match self.family {
            Family::Power => ModelSpec::Power { lambda },
            Family::AsymptoticallyLinear { s } => ModelSpec::Asym { lambda, s },
            Family::Quintic { b, c, d } => ModelSpec::Quintic { lambda, b, c, d },
            Family::NonMonotone { s, .. } => ModelSpec::Nonmono { lambda, s },
        }
    }

    /// `f(u)`, extended oddly to `u < 0`.
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        let a = u.abs();
        let fa = match &self.family {
            Family::Power => a * a * a,
            Family::AsymptoticallyLinear { s } => a * a * a / (1.0 + s * a * a),
            Family::Quintic { b, c, d } => a * a * (3.0 * b - a * (4.0 * c - 5.0 * d * a)),
            Family::NonMonotone { s, .. } => nonmonotone_f(a, *s),
        };
        fa.copysign(u)
    }

    /// `F(u) = ∫_0^u f`, even in `u`.
    #[inline]
    pub fn primitive(&self, u: f64) -> f64 {
        let a = u.abs();
        match &self.family {
            Family::Power => 0.25 * a * a * a * a,
            Family::AsymptoticallyLinear { s } => {
                let x = s * a * a;
                // u²/(2s) - ln(1+su²)/(2s²); x - ln(1+x) cancels for small x
                let d = if x < 1e-3 {
                    x * x * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x * (0.2 - x / 6.0))))
                } else {
                    x - x.ln_1p()
                };
                d / (2.0 * s * s)
            }
            Family::Quintic { b, c, d } => a * a * a * (b - a * (c - d * a)),
            Family::NonMonotone { primitive, .. } => primitive.eval(a),
        }
    }

    /// `G(u) = F(u) - λu²/2`.
    #[inline]
    pub fn g(&self, u: f64) -> f64 {
        self.primitive(u) - 0.5 * self.lambda * u * u
    }

    /// Whether `u ↦ f(u)/u` is nondecreasing on a positive increasing grid.
    pub fn monotonicity_probe(&self, u_grid: &[f64]) -> bool {
        let ratios: Vec<f64> = u_grid.iter().map(|&u| self.f(u) / u).collect();
        ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12)
    }
}

impl fmt::Display for NonlinearityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Power => write!(f, "power(λ={})", self.lambda),
            Family::AsymptoticallyLinear { s } => write!(f, "asym(λ={}, s={s})", self.lambda),
            Family::Quintic { b, c, d } => {
                write!(f, "quintic(λ={}, B={b}, C={c}, D={d})", self.lambda)
            }
            Family::NonMonotone { s, .. } => write!(f, "nonmono(λ={}, s={s})", self.lambda),
        }
    }
}

#[inline]
fn nonmonotone_f(u: f64, s: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    u3 * (u2 * (u2 - 2.5) + 2.0) / (1.0 + s * u3 * u3)
}

const NONMONO_TABLE_MAX: f64 = 128.0;
const NONMONO_TABLE_CELLS: usize = 1 << 15;
const PRIMITIVE_TOL: f64 = 1e-12;

/// Cumulative primitive of a smooth `f` on `[0, u_max]`, interpolated by
/// cubic Hermite polynomials that use `f` itself as the slope.
///
/// Beyond `u_max` the tail integral is computed on demand.
pub struct PrimitiveTable {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl fmt::Debug for PrimitiveTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimitiveTable")
            .field("step", &self.step)
            .field("cells", &(self.values.len() - 1))
            .finish()
    }
}

impl PrimitiveTable {
    pub fn build(f: impl Fn(f64) -> f64 + Send + Sync + 'static, u_max: f64, cells: usize) -> Self {
        let step = u_max / cells as f64;
        let cell_tol = PRIMITIVE_TOL / cells as f64;
        let mut values = Vec::with_capacity(cells + 1);
        let mut slopes = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(f(0.0));
        for i in 0..cells {
            let a = i as f64 * step;
            let b = a + step;
            acc += adaptive_simpson(&f, a, b, cell_tol);
            values.push(acc);
            slopes.push(f(b));
        }
        Self {
            f: Box::new(f),
            step,
            values,
            slopes,
        }
    }

    pub fn u_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// `∫_0^u f` for `u ≥ 0`.
    pub fn eval(&self, u: f64) -> f64 {
        let cells = self.values.len() - 1;
        let x = u / self.step;
        if x >= cells as f64 {
            let top = self.u_max();
            let last = self.values[cells];
            if u == top {
                return last;
            }
            let tol = PRIMITIVE_TOL * (1.0 + (u - top));
            return last + adaptive_simpson(&self.f, top, u, tol);
        }
        let i = x.floor() as usize;
        let s = x - i as f64;
        let h = self.step;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Moments of the two-maxima profile
/// `u(r) = c` for `r ≤ R`, `u(r) = c·e^{-(r-R)}` for `r > R`, `c = 1/√(4π)`,
/// and the coefficients that turn `I(t·u)` into the target quintic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticCalibration {
    pub radius: f64,
    pub lambda: f64,
    /// `∫|∇u|²` over R^3.
    pub grad: f64,
    /// `∫u²` over R^3.
    pub mass: f64,
    /// `∫u³, ∫u⁴, ∫u⁵`.
    pub power_moments: [f64; 3],
    /// Quadratic coefficient `(∫|∇u|² + λ∫u²)/2` of `I(t·u)`.
    pub quadratic: f64,
    /// Fiber rescaling `κ` with `quadratic = 4(1+√5)κ²`.
    pub kappa: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Coefficients of the target `P(τ) = Σ p_k τ^k`, `k = 2..=5`.
pub fn two_maxima_polynomial() -> [f64; 4] {
    let s5 = 5f64.sqrt();
    [4.0 * (1.0 + s5), -4.0 * (2.0 + s5), 5.0 + s5, -1.0]
}

/// Height of both maxima of the target polynomial, `128/(25√5)`.
pub fn two_maxima_height() -> f64 {
    128.0 / (25.0 * 5f64.sqrt())
}

impl QuinticCalibration {
    pub fn new(radius: f64, lambda: f64) -> Self {
        let c = 1.0 / (4.0 * PI).sqrt();
        // 4π c^k [R³/3 + ∫_0^∞ e^{-ks} (s+R)² ds]
        let moment = |k: f64| {
            4.0 * PI
                * c.powf(k)
                * (radius.powi(3) / 3.0 + radius * radius / k + 2.0 * radius / (k * k) + 2.0 / (k * k * k))
        };
        let tail2 = radius * radius / 2.0 + radius / 2.0 + 0.25;
        let grad = tail2;
        let mass = moment(2.0);
        let power_moments = [moment(3.0), moment(4.0), moment(5.0)];
        let quadratic = 0.5 * (grad + lambda * mass);
        let [p2, p3, p4, p5] = two_maxima_polynomial();
        let kappa = (quadratic / p2).sqrt();
        let b = -p3 * kappa.powi(3) / power_moments[0];
        let cc = p4 * kappa.powi(4) / power_moments[1];
        let d = -p5 * kappa.powi(5) / power_moments[2];
        Self {
            radius,
            lambda,
            grad,
            mass,
            power_moments,
            quadratic,
            kappa,
            b,
            c: cc,
            d,
        }
    }

    /// How far `‖u‖²/2` (H¹ norm) is from the quadratic coefficient `4(1+√5)`.
    pub fn h1_identity_residual(&self) -> f64 {
        0.5 * (self.grad + self.mass) - two_maxima_polynomial()[0]
    }

    /// The profile itself.
    pub fn profile(&self, r: f64) -> f64 {
        let c = 1.0 / (4.0 * PI).sqrt();
        if r <= self.radius {
            c
        } else {
            c * (self.radius - r).exp()
        }
    }

    pub fn model(&self) -> Result<NonlinearityModel> {
        NonlinearityModel::quintic(self.lambda, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(model: &NonlinearityModel, u: f64, delta: f64) -> f64 {
        (model.primitive(u + delta) - model.primitive(u - delta)) / (2.0 * delta)
    }

    fn all_models() -> Vec<NonlinearityModel> {
        vec![
            NonlinearityModel::power(1.0).unwrap(),
            NonlinearityModel::asym_linear(1.0, 0.5).unwrap(),
            NonlinearityModel::quintic_example(),
            NonlinearityModel::quintic(1.0, 1.0, 1.0, 1.0).unwrap(),
            NonlinearityModel::nonmonotone(0.5, 1.0).unwrap(),
        ]
    }

    #[test]
    fn power_family() {
        let m = NonlinearityModel::power(1.0).unwrap();
        assert_eq!(m.f(0.0), 0.0);
        assert_eq!(m.primitive(0.0), 0.0);
        assert_eq!(m.f(2.0), 8.0);
        assert_eq!(m.primitive(2.0), 4.0);
        assert!((central(&m, 1.3, 1e-5) - m.f(1.3)).abs() < 1e-8);
        assert!(NonlinearityModel::power(0.0).is_err());
        assert!(NonlinearityModel::power(-1.0).is_err());
    }

    #[test]
    fn asym_family() {
        let m = NonlinearityModel::asym_linear(1.0, 0.5).unwrap();
        assert_eq!(m.f(0.0), 0.0);
        assert!((m.f(2.0) - 8.0 / 3.0).abs() < 1e-15);
        let s = 0.5;
        let u = 1e6;
        assert!((m.f(u) / u - 1.0 / s).abs() < 1e-6 / s);
        for u in [0.3, 1.7, 4.0] {
            assert!((central(&m, u, 1e-5) - m.f(u)).abs() < 1e-8, "u = {u}");
        }
        assert!(matches!(
            NonlinearityModel::asym_linear(5.0, 0.5),
            Err(Error::InfeasibleFamily(_))
        ));
        assert!(matches!(
            NonlinearityModel::asym_linear(2.0, 0.5),
            Err(Error::InfeasibleFamily(_))
        ));
        assert!(NonlinearityModel::asym_linear(1.0, 0.0).is_err());
    }

    #[test]
    fn asym_primitive_is_accurate_near_zero() {
        let m = NonlinearityModel::asym_linear(1.0, 0.5).unwrap();
        let u: f64 = 1e-4;
        // F(u) = u⁴/4 - s u⁶/6 + ...
        let series = u.powi(4) / 4.0 - 0.5 * u.powi(6) / 6.0;
        assert!((m.primitive(u) - series).abs() < 1e-12 * series);
    }

    #[test]
    fn quintic_family() {
        let m = NonlinearityModel::quintic(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.f(0.0), 0.0);
        assert_eq!(m.primitive(0.0), 0.0);
        assert_eq!(m.f(1.0), 4.0);
        assert_eq!(m.primitive(1.0), 1.0);
        // odd extension
        assert_eq!(m.f(-1.0), -4.0);
        assert_eq!(m.primitive(-1.0), 1.0);
        assert!(NonlinearityModel::quintic(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(NonlinearityModel::quintic(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn nonmonotone_family() {
        let m = NonlinearityModel::nonmonotone(0.5, 1.0).unwrap();
        assert_eq!(m.f(0.0), 0.0);
        assert_eq!(m.primitive(0.0), 0.0);
        assert!((m.f(1.0) - 0.25).abs() < 1e-15);
        for u in [0.5, 1.0, 1.5] {
            assert!((central(&m, u, 1e-5) - m.f(u)).abs() < 1e-6, "u = {u}");
        }
        // beyond the table
        let u = 150.0;
        assert!((central(&m, u, 1e-3) - m.f(u)).abs() < 1e-6 * m.f(u));
    }

    #[test]
    fn nonmonotone_primitive_matches_quadrature() {
        let m = NonlinearityModel::nonmonotone(0.5, 1.0).unwrap();
        for u in [0.37, 1.0, 2.5, 9.9, 64.3] {
            let direct = adaptive_simpson(&|x| m.f(x), 0.0, u, 1e-13);
            assert!((m.primitive(u) - direct).abs() < 1e-10 * (1.0 + direct), "u = {u}");
        }
    }

    #[test]
    fn g_examples() {
        let m = NonlinearityModel::power(1.0).unwrap();
        assert_eq!(m.g(0.0), 0.0);
        assert_eq!(m.g(2.0), 2.0);
        let root = 2f64.sqrt();
        assert!(m.g(root - 1e-9) < 0.0);
        assert!(m.g(root + 1e-9) > 0.0);
        for model in all_models() {
            assert_eq!(model.g(0.0), 0.0, "{model}");
        }
    }

    #[test]
    fn monotonicity_probe_verdicts() {
        let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
        assert!(NonlinearityModel::power(1.0).unwrap().monotonicity_probe(&grid));
        assert!(NonlinearityModel::asym_linear(1.0, 0.5)
            .unwrap()
            .monotonicity_probe(&grid));
        assert!(!NonlinearityModel::nonmonotone(0.5, 1.0)
            .unwrap()
            .monotonicity_probe(&grid));
    }

    #[test]
    fn primitive_derivative_matches_f_for_all_models() {
        for model in all_models() {
            for i in 0..50 {
                let u = 0.01 * (1000f64).powf(i as f64 / 49.0);
                let fd = central(&model, u, 1e-5);
                let f = model.f(u);
                assert!(
                    (fd - f).abs() <= 1e-6 * (1.0 + f.abs()),
                    "{model}: u = {u}, F' = {fd}, f = {f}"
                );
            }
        }
    }

    #[test]
    fn asym_ratio_bounded_by_asymptote() {
        let s = 0.5;
        let m = NonlinearityModel::asym_linear(1.0, s).unwrap();
        for i in 1..200 {
            let u = i as f64 * 0.25;
            assert!(m.f(u) / u <= 1.0 / s);
        }
    }

    #[test]
    fn calibration_reproduces_target_polynomial() {
        let cal = QuinticCalibration::new(QUINTIC_PROFILE_RADIUS, QUINTIC_LAMBDA);
        // shipped constants agree with the run-time derivation
        assert!((cal.b - QUINTIC_B).abs() < 1e-10 * QUINTIC_B);
        assert!((cal.c - QUINTIC_C).abs() < 1e-10 * QUINTIC_C);
        assert!((cal.d - QUINTIC_D).abs() < 1e-10 * QUINTIC_D);
        let [p2, p3, p4, p5] = two_maxima_polynomial();
        let k = cal.kappa;
        assert!((cal.b * cal.power_moments[0] + p3 * k.powi(3)).abs() < 1e-12);
        assert!((cal.c * cal.power_moments[1] - p4 * k.powi(4)).abs() < 1e-12);
        assert!((cal.d * cal.power_moments[2] + p5 * k.powi(5)).abs() < 1e-12);
        assert!((cal.quadratic - p2 * k * k).abs() < 1e-12);
    }

    #[test]
    fn target_polynomial_has_two_equal_maxima() {
        let [p2, p3, p4, p5] = two_maxima_polynomial();
        let p = |t: f64| p2 * t * t + p3 * t.powi(3) + p4 * t.powi(4) + p5 * t.powi(5);
        let s5 = 5f64.sqrt();
        let (t1, t2) = (2.0 / s5, 2.0 + 2.0 / s5);
        let h = two_maxima_height();
        assert!((p(t1) - h).abs() < 1e-12);
        assert!((p(t2) - h).abs() < 1e-12);
        assert!(p(t1 - 1e-3) < h && p(t1 + 1e-3) < h);
        assert!(p(t2 - 1e-3) < h && p(t2 + 1e-3) < h);
    }
}
