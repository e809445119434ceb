//! Real-line Riemann–Liouville and Caputo problems on [0, R].
//!
//! The real problem is solved through its complex counterpart: RL data goes
//! through the homogeneous shift, Caputo data through the regularized
//! problem. With real coefficients the complex solution is real on the real
//! axis, so taking Re u(x) loses nothing. Residuals are then recomputed
//! independently with the series derivative rule, not the integral form the
//! solver iterated.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fracops::{frac_derivative_series, FracOpsError};
use crate::series::{principal_pow, AnalyticSeries, BivariateSeries, SeriesError};
use crate::solver::{solve_picard, ProblemKind, ProblemSpec, SolveError, SolveReport};

pub const REAL_COMPAT_TOL: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 101;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealError {
    #[error("real-line problems need real coefficients and initial value (max |Im| = {max_imag:e})")]
    RealCompatViolated { max_imag: f64 },
    #[error("problem kind {0:?} is not a real-line kind")]
    NotRealKind(ProblemKind),
    #[error("grid needs at least 2 points, got {0}")]
    Grid(usize),
    #[error("residual grid points must be positive, got {0}")]
    NonPositivePoint(f64),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    FracOps(#[from] FracOpsError),
}

impl RealError {
    pub fn is_hypothesis_violation(&self) -> bool {
        match self {
            RealError::RealCompatViolated { .. } => true,
            RealError::Solve(e) => e.is_hypothesis_violation(),
            _ => false,
        }
    }
}

/// All c_{jk} and b real to within 1e-12.
pub fn check_real_compat(rhs: &BivariateSeries, b: Complex64) -> bool {
    rhs.has_real_coeffs(REAL_COMPAT_TOL) && b.im.abs() <= REAL_COMPAT_TOL
}

fn max_imag(rhs: &BivariateSeries, b: Complex64) -> f64 {
    rhs.rows()
        .iter()
        .flatten()
        .map(|c| c.im.abs())
        .fold(b.im.abs(), f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealSolution {
    /// Uniform grid on [0, R].
    pub x: Vec<f64>,
    /// Re u(x) on that grid.
    pub u: Vec<f64>,
    /// max |Im u(x)| on the grid.
    pub max_imag: f64,
    /// Residual of the real equation on `gridN` points of [R/100, R].
    pub residual: f64,
    pub report: SolveReport,
}

impl RealSolution {
    /// Two-column `x,u` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for (x, u) in self.x.iter().zip(&self.u) {
            out.push_str(&format!("{x},{u}\n"));
        }
        out
    }
}

/// `n` uniform points on [lo, hi].
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Solves a `real-rl` or `real-caputo` problem and samples Re u on
/// `grid_n` points of [0, R].
pub fn solve_real(p: &ProblemSpec, grid_n: usize) -> Result<RealSolution, RealError> {
    if !p.kind.is_real() {
        return Err(RealError::NotRealKind(p.kind));
    }
    if grid_n < 2 {
        return Err(RealError::Grid(grid_n));
    }
    if !check_real_compat(&p.rhs, p.initial) {
        return Err(RealError::RealCompatViolated {
            max_imag: max_imag(&p.rhs, p.initial),
        });
    }
    let report = solve_picard(p)?;
    let radius = report.radius;
    let x = uniform_grid(0.0, radius, grid_n);
    let mut u = Vec::with_capacity(grid_n);
    let mut imag: f64 = 0.0;
    for &xi in &x {
        let v = report.solution.eval(Complex64::new(xi, 0.0))?;
        u.push(v.re);
        imag = imag.max(v.im.abs());
    }
    let residual_grid = uniform_grid(radius / 100.0, radius, grid_n);
    let residual = real_residual(
        &report.solution,
        &p.rhs,
        p.order,
        p.initial,
        p.kind,
        &residual_grid,
    )?;
    Ok(RealSolution {
        x,
        u,
        max_imag: imag,
        residual,
        report,
    })
}

/// max over the grid of |D^a[u − b·[caputo]](x) − x^{−a} F(x, u(x))|, using
/// the exact series derivative.
pub fn real_residual(
    u: &AnalyticSeries,
    rhs: &BivariateSeries,
    a: f64,
    b: Complex64,
    kind: ProblemKind,
    grid: &[f64],
) -> Result<f64, RealError> {
    let target = match kind.complex_counterpart() {
        ProblemKind::Regularized => u.add_constant(-b),
        _ => u.clone(),
    };
    let deriv = frac_derivative_series(&target, a)?;
    let mut worst: f64 = 0.0;
    for &x in grid {
        if !(x > 0.0) {
            return Err(RealError::NonPositivePoint(x));
        }
        let z = Complex64::new(x, 0.0);
        let lhs = deriv.eval(z)?;
        let rhs_val = principal_pow(z, -a)? * rhs.eval(z, u.eval(z)?);
        worst = worst.max((lhs - rhs_val).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const G15: f64 = 0.886_226_925_452_758;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rl_forced_example() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let sol = solve_real(&ProblemSpec::new(ProblemKind::RealRl, 0.5, c(0.0, 0.0), f), 101).unwrap();
        for (x, u) in sol.x.iter().zip(&sol.u) {
            assert!((u - G15 * x).abs() < 1e-14);
        }
        assert!(sol.residual < 1e-12);
        assert_eq!(sol.max_imag, 0.0);
    }

    #[test]
    fn caputo_forced_example() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let sol =
            solve_real(&ProblemSpec::new(ProblemKind::RealCaputo, 0.5, c(1.0, 0.0), f), 101).unwrap();
        for (x, u) in sol.x.iter().zip(&sol.u) {
            assert!((u - 1.0 - G15 * x).abs() < 1e-14);
        }
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sol = solve_real(
            &ProblemSpec::new(ProblemKind::RealRl, 0.5, c(0.0, 0.0), BivariateSeries::zero()),
            11,
        )
        .unwrap();
        assert!(sol.u.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn residual_detects_perturbation() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let u = AnalyticSeries::from_real(0.0, &[0.0, G15, 1e-6]);
        let grid = uniform_grid(0.01, 1.0, 101);
        let r = real_residual(&u, &f, 0.5, c(0.0, 0.0), ProblemKind::RealRl, &grid).unwrap();
        assert!(r >= 1e-7, "{r}");
        assert!(real_residual(&u, &f, 0.5, c(0.0, 0.0), ProblemKind::RealRl, &[0.0]).is_err());
    }

    #[test]
    fn compat_examples() {
        assert!(check_real_compat(&BivariateSeries::from_real_terms(&[(1, 0, 1.0), (0, 1, 1.0)]), c(1.0, 0.0)));
        assert!(!check_real_compat(&BivariateSeries::from_terms(&[(0, 1, c(0.0, 1.0))]), c(0.0, 0.0)));
        assert!(check_real_compat(&BivariateSeries::zero(), c(0.0, 0.0)));
        assert!(!check_real_compat(&BivariateSeries::zero(), c(0.0, 0.5)));

        let p = ProblemSpec::new(
            ProblemKind::RealRl,
            0.5,
            c(0.0, 0.0),
            BivariateSeries::from_terms(&[(0, 1, c(0.0, 0.3))]),
        );
        let err = solve_real(&p, 11).unwrap_err();
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn linear_rhs_cases() {
        // z^a f linear in z and t, rates below 1
        for (a, lam, kind, b) in [
            (0.5, 0.6, ProblemKind::RealRl, 0.0),
            (0.3, -0.8, ProblemKind::RealRl, 0.0),
            (0.7, 0.4, ProblemKind::RealCaputo, 0.0),
        ] {
            let f = BivariateSeries::from_real_terms(&[(1, 0, 1.5), (0, 1, lam)]);
            let sol = solve_real(&ProblemSpec::new(kind, a, c(b, 0.0), f), 101).unwrap();
            let g = crate::specfun::gamma(2.0 - a).unwrap();
            assert!((sol.report.contraction.rate - lam.abs() * g).abs() < 1e-12);
            assert!(sol.residual < 1e-10, "{}", sol.residual);
            assert!(sol.max_imag < 1e-12);
        }
    }

    #[test]
    fn rl_with_nonzero_initial_value() {
        // D^a u = b x^{-a}/Γ(1−a) + x^{1−a}: the compatibility condition holds, u = b + Γ(2−a) x
        let a = 0.5;
        let b = 2.0;
        let f = BivariateSeries::from_real_terms(&[(0, 0, b * crate::specfun::recip_gamma(1.0 - a)), (1, 0, 1.0)]);
        let sol = solve_real(&ProblemSpec::new(ProblemKind::RealRl, a, c(b, 0.0), f), 51).unwrap();
        for (x, u) in sol.x.iter().zip(&sol.u) {
            assert!((u - b - G15 * x).abs() < 1e-13);
        }
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn csv_shape() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let sol = solve_real(&ProblemSpec::new(ProblemKind::RealRl, 0.5, c(0.0, 0.0), f), 5).unwrap();
        let csv = sol.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert_eq!(csv.lines().next().unwrap(), "x,u");
    }
}
