//! Executable forms of the solvability hypotheses.
//!
//! Analyticity of z^a f is structural: the right-hand side is a bivariate
//! series in z and t. What remains checkable is the compatibility value at
//! z = 0 and the growth envelope, both sampled or evaluated here.

use num_complex::Complex64;
use serde::Serialize;

use crate::series::{circle_points, disc_grid, BivariateSeries};
use crate::solver::{GrowthEnvelope, SolveError};
use crate::specfun;

/// Tolerance on the compatibility gaps at z = 0.
pub const GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub passed: bool,
    /// |F(0, b) − b/Γ(1−a)|.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatCheck {
    pub passed: bool,
    /// |F(0, b)|.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthMode {
    /// |F(z, t)| ≤ c|t|^{n0} + |g(z)|.
    Abs,
    /// |F(z, t)| ≤ c|t − b|^{n0} + |g(z)|.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub passed: bool,
    /// max (|F| − bound) / max(bound, 1) over the grid; ≤ 0 when the bound holds.
    pub worst_margin: f64,
    #[serde(with = "crate::io::complex")]
    pub worst_z: Complex64,
    #[serde(with = "crate::io::complex")]
    pub worst_t: Complex64,
}

/// F(0, b) = b/Γ(1−a).
pub fn check_condition_ii(rhs: &BivariateSeries, b: Complex64, a: f64) -> ConditionCheck {
    let gap = (rhs.at_origin(b) - b * specfun::recip_gamma(1.0 - a)).norm();
    ConditionCheck {
        passed: gap <= GAP_TOL,
        gap,
    }
}

/// F(0, b) = 0, the premise of the regularized uniqueness result.
pub fn check_regularized_compat(rhs: &BivariateSeries, b: Complex64) -> CompatCheck {
    let value = rhs.at_origin(b).norm();
    CompatCheck {
        passed: value <= GAP_TOL,
        value,
    }
}

/// Samples the growth envelope over |z| ≤ 1 and |t − b·[centered]| ≤ 2.
///
/// z runs over the origin and 4 rings of `nz` angles, t over the origin and
/// 8 rings of `nt` angles.
pub fn check_growth(
    rhs: &BivariateSeries,
    env: &GrowthEnvelope,
    b: Complex64,
    mode: GrowthMode,
    nz: usize,
    nt: usize,
) -> Result<GrowthCheck, SolveError> {
    if nz < 8 || nt < 8 {
        return Err(SolveError::InvalidArgument(format!(
            "growth sampling needs at least 8 points per axis, got ({nz}, {nt})"
        )));
    }
    let center = match mode {
        GrowthMode::Abs => Complex64::new(0.0, 0.0),
        GrowthMode::Centered => b,
    };
    let origin = Complex64::new(0.0, 0.0);
    let zs: Vec<Complex64> = std::iter::once(origin).chain(disc_grid(1.0, 4, nz)).collect();
    let ss: Vec<Complex64> = std::iter::once(origin).chain(disc_grid(2.0, 8, nt)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_z = origin;
    let mut worst_t = origin;
    for &z in &zs {
        let gz = env.g.eval(z)?.norm();
        for &s in &ss {
            let t = center + s;
            let bound = env.c * s.norm().powi(env.n0 as i32) + gz;
            let margin = (rhs.eval(z, t).norm() - bound) / bound.max(1.0);
            if margin > worst {
                worst = margin;
                worst_z = z;
                worst_t = t;
            }
        }
    }
    Ok(GrowthCheck {
        passed: worst <= GAP_TOL,
        worst_margin: worst,
        worst_z,
        worst_t,
    })
}

/// Smoke test: F is finite on a sample of the bidisc |z| ≤ 1, |t| ≤ 2.
pub fn rhs_is_finite(rhs: &BivariateSeries) -> bool {
    circle_points(1.0, 16).all(|z| {
        disc_grid(2.0, 4, 16)
            .into_iter()
            .all(|t| rhs.eval(z, t).is_finite())
    })
}
