//! Riemann–Liouville fractional integral and derivative on the disc.
//!
//! Two independent routes are provided for I^a:
//!
//! * series-exact rules on [`FracPowerSeries`], using
//!   I^a z^p = Γ(p+1)/Γ(p+1+a) z^{p+a} and D^a z^p = Γ(p+1)/Γ(p+1−a) z^{p−a};
//! * Gauss–Jacobi quadrature along the radial segment [0, z]. With ζ = tz the
//!   kernel (z−ζ)^{a−1} becomes z^{a−1}(1−t)^{a−1}, and the principal branch
//!   keeps arg(z−ζ) = arg z along the whole segment.
//!
//! D^a is only available through the series rule; its correctness is checked
//! through the inversion identities against quadrature I^a.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::series::{principal_pow, FracPowerSeries, SeriesError};
use crate::specfun::{self, SpecfunError};

/// Default node count for oracle comparisons.
pub const DEFAULT_NODES: usize = 64;

const NEWTON_MAX_ITER: usize = 50;
const MOMENT_TOL: f64 = 1e-12;
/// Relative step size below which a non-shrinking Newton step is accepted.
const NEWTON_NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracOpsError {
    #[error("order must lie in (0, 1), got {0}")]
    Order(f64),
    #[error("series offset mu = {0} must exceed -1")]
    Offset(f64),
    #[error("quadrature needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("jacobi exponents must exceed -1, got alpha = {alpha}, beta = {beta}")]
    Exponents { alpha: f64, beta: f64 },
    #[error("gauss-jacobi node solver failed: {0}")]
    NodeSolver(String),
    #[error("quadrature rule of order {rule} used with order {requested}")]
    RuleMismatch { rule: f64, requested: f64 },
    #[error("quadrature point z = 0 is excluded")]
    ZeroPoint,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

fn check_order(a: f64) -> Result<(), FracOpsError> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(FracOpsError::Order(a))
    }
}

fn check_offset(mu: f64) -> Result<(), FracOpsError> {
    if mu > -1.0 {
        Ok(())
    } else {
        Err(FracOpsError::Offset(mu))
    }
}

/// I^a s, series-exact. The output offset is μ + a.
pub fn frac_integral_series(s: &FracPowerSeries, a: f64) -> Result<FracPowerSeries, FracOpsError> {
    check_offset(s.mu)?;
    if !(a > 0.0) {
        return Err(FracOpsError::Order(a));
    }
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let p = k as f64 + s.mu + 1.0;
            Ok(c * specfun::gamma_ratio(p, p + a)?)
        })
        .collect::<Result<Vec<_>, FracOpsError>>()?;
    Ok(FracPowerSeries::new(s.mu + a, coeffs))
}

/// D^a s, series-exact. The output offset is μ − a; a term z^{a−1} maps to 0.
pub fn frac_derivative_series(
    s: &FracPowerSeries,
    a: f64,
) -> Result<FracPowerSeries, FracOpsError> {
    check_offset(s.mu)?;
    check_order(a)?;
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let p = k as f64 + s.mu + 1.0;
            let m = specfun::gamma_ratio(p, p - a)?;
            Ok(if m == 0.0 { Complex64::new(0.0, 0.0) } else { c * m })
        })
        .collect::<Result<Vec<_>, FracOpsError>>()?;
    Ok(FracPowerSeries::new(s.mu - a, coeffs))
}

/// Gauss rule for ∫₀¹ g(t) (1−t)^{a−1} t^β dt.
///
/// The standard rule of the fractional integral has β = 0. A nonzero β
/// absorbs a known power of the integrand at the origin, which is how the
/// Picard image of ζ^{−a}φ(ζ) is evaluated without losing exactness.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    order: f64,
    origin_exponent: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn origin_exponent(&self) -> f64 {
        self.origin_exponent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// ∫₀¹ t^m (1−t)^{a−1} t^β dt = B(m + 1 + β, a).
    pub fn exact_moment(&self, m: usize) -> Result<f64, SpecfunError> {
        specfun::beta(m as f64 + 1.0 + self.origin_exponent, self.order)
    }

    /// Largest relative moment residual over m = 0..2n−1.
    pub fn moment_residual(&self) -> Result<f64, SpecfunError> {
        let mut worst: f64 = 0.0;
        for m in 0..2 * self.len() {
            let exact = self.exact_moment(m)?;
            let approx: f64 = self.iter().map(|(t, w)| w * t.powi(m as i32)).sum();
            worst = worst.max(((approx - exact) / exact).abs());
        }
        Ok(worst)
    }

    /// Rule with weight (1−t)^{a−1} t^β on [0, 1].
    pub fn with_origin_exponent(n: usize, a: f64, beta: f64) -> Result<Self, FracOpsError> {
        check_order(a)?;
        if n < 2 {
            return Err(FracOpsError::TooFewNodes(n));
        }
        let alpha = a - 1.0;
        if !(beta > -1.0) {
            return Err(FracOpsError::Exponents { alpha, beta });
        }
        let (diag, off) = jacobi_recurrence(n + 1, alpha, beta);
        let mass = specfun::beta(beta + 1.0, alpha + 1.0)?;

        // Golub–Welsch for starting values.
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jm[(i, i)] = diag[i];
            if i + 1 < n {
                jm[(i, i + 1)] = off[i + 1];
                jm[(i + 1, i)] = off[i + 1];
            }
        }
        let eig = SymmetricEigen::new(jm);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));

        // Newton polish on the orthonormal recurrence, Christoffel weights.
        let mut weights = Vec::with_capacity(n);
        for t in nodes.iter_mut() {
            let mut converged = false;
            let mut last = f64::INFINITY;
            for _ in 0..NEWTON_MAX_ITER {
                let (p, dp, _) = orthonormal_eval(*t, n, &diag, &off, mass);
                let step = p / dp;
                let size = step.abs();
                // Once the step stops shrinking it is rounding noise in p.
                if size >= last && last <= NEWTON_NOISE_FLOOR * t.abs() {
                    converged = true;
                    break;
                }
                *t -= step;
                if size <= 4.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
                    converged = true;
                    break;
                }
                last = size;
            }
            if !converged || !(*t > 0.0 && *t < 1.0) {
                return Err(FracOpsError::NodeSolver(format!(
                    "node {t} did not settle inside (0, 1) (n = {n}, a = {a}, beta = {beta})"
                )));
            }
            let (_, _, sumsq) = orthonormal_eval(*t, n, &diag, &off, mass);
            weights.push(1.0 / sumsq);
        }

        let rule = Self {
            order: a,
            origin_exponent: beta,
            nodes,
            weights,
        };
        let residual = rule.moment_residual()?;
        if !(residual <= MOMENT_TOL) {
            return Err(FracOpsError::NodeSolver(format!(
                "moment residual {residual:e} exceeds {MOMENT_TOL:e}"
            )));
        }
        Ok(rule)
    }

    /// ∫₀¹ g(t) w(t) dt.
    pub fn integrate<E>(
        &self,
        mut g: impl FnMut(f64) -> Result<Complex64, E>,
    ) -> Result<Complex64, E> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, w) in self.iter() {
            acc += g(t)? * w;
        }
        Ok(acc)
    }
}

/// Orthonormal Jacobi recurrence on [0, 1] for weight (1−t)^α t^β:
/// diagonal entries d_0..d_{n−1} and off-diagonals e_1..e_{n−1} (e_0 = 0).
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(n);
    let mut off = vec![0.0; n];
    for (k, slot) in off.iter_mut().enumerate() {
        let kf = k as f64;
        // on [-1, 1] with weight (1-x)^α (1+x)^β
        let d = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push((d + 1.0) / 2.0);
        if k >= 1 {
            let e2 = if k == 1 {
                // (k + α + β) cancels against (2k + α + β − 1), which matters
                // when α + β = −1
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                    / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
            };
            *slot = e2.sqrt() / 2.0;
        }
    }
    (diag, off)
}

/// Returns (p̂_n(t), p̂_n'(t), Σ_{k<n} p̂_k(t)²) for the orthonormal family.
fn orthonormal_eval(t: f64, n: usize, diag: &[f64], off: &[f64], mass: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = 1.0 / mass.sqrt();
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += p * p;
        let e_k = off[k];
        let e_next = off[k + 1];
        let p_next = ((t - diag[k]) * p - e_k * p_prev) / e_next;
        let dp_next = (p + (t - diag[k]) * dp - e_k * dp_prev) / e_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp, sumsq)
}

/// n-node rule for ∫₀¹ g(t)(1−t)^{a−1} dt, exact through degree 2n − 1.
pub fn gauss_jacobi_rule(n: usize, a: f64) -> Result<JacobiRule, FracOpsError> {
    JacobiRule::with_origin_exponent(n, a, 0.0)
}

/// Quadrature value of I^a[ζ^β u(ζ)] at z, where β is the rule's origin
/// exponent (zero for [`gauss_jacobi_rule`]):
///
/// z^{a+β}/Γ(a) Σ w_i u(t_i z).
pub fn frac_integral_quad<E>(
    u: impl Fn(Complex64) -> Result<Complex64, E>,
    a: f64,
    z: Complex64,
    rule: &JacobiRule,
) -> Result<Complex64, E>
where
    E: From<FracOpsError>,
{
    check_order(a)?;
    if (rule.order - a).abs() > 1e-15 {
        return Err(FracOpsError::RuleMismatch {
            rule: rule.order,
            requested: a,
        }
        .into());
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(FracOpsError::ZeroPoint.into());
    }
    let sum = rule.integrate(|t| u(z * t))?;
    let prefactor = principal_pow(z, a + rule.origin_exponent).map_err(FracOpsError::from)?
        * specfun::recip_gamma(a);
    Ok(prefactor * sum)
}
