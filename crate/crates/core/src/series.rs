//! Truncated fractional power series and bivariate right-hand sides.
//!
//! A [`FracPowerSeries`] stores Σ_{k=0..N} a_k z^{k+μ}. The factor z^μ is
//! always the principal branch, |z|^μ e^{iμ arg z} with arg z ∈ (−π, π]; a
//! point on the negative real axis takes arg = π regardless of the sign of
//! its zero imaginary part.
//!
//! A [`BivariateSeries`] stores the coefficients of F(z, t) = z^a f(z, t),
//! the form in which every right-hand side enters the solver.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::complex_vec;

pub const DEFAULT_TRUNC: usize = 64;
pub const DEFAULT_RADII: usize = 16;
pub const DEFAULT_ANGLES: usize = 64;

const SCHWARZ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("z^{mu} has no finite value at z = 0")]
    Branch { mu: f64 },
    #[error("operation requires an analytic series (mu = 0), got mu = {0}")]
    NotAnalytic(f64),
    #[error("offsets differ: {0} vs {1}")]
    OffsetMismatch(f64, f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schwarz precondition violated: {0}")]
    SchwarzPrecondition(String),
}

/// arg z in (−π, π].
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

/// Principal-branch power z^μ.
pub fn principal_pow(z: Complex64, mu: f64) -> Result<Complex64, SeriesError> {
    if mu == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z == Complex64::new(0.0, 0.0) {
        return if mu > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(SeriesError::Branch { mu })
        };
    }
    Ok(Complex64::from_polar(z.norm().powf(mu), mu * principal_arg(z)))
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Σ_{k=0..N} a_k z^{k+μ}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracPowerSeries {
    pub mu: f64,
    #[serde(with = "complex_vec")]
    pub coeffs: Vec<Complex64>,
}

/// The μ = 0 case. Kept as an alias: analytic-only operations check the
/// offset at runtime and report [`SeriesError::NotAnalytic`].
pub type AnalyticSeries = FracPowerSeries;

impl FracPowerSeries {
    pub fn new(mu: f64, coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        Self { mu, coeffs }
    }

    pub fn analytic(coeffs: Vec<Complex64>) -> Self {
        Self::new(0.0, coeffs)
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(mu: f64, coeffs: &[f64]) -> Self {
        Self::new(mu, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(mu: f64) -> Self {
        Self::new(mu, vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::analytic(vec![c])
    }

    /// c z^{k+μ} as a series with offset μ.
    pub fn monomial(mu: f64, k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(mu, coeffs)
    }

    /// Highest stored power N.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_analytic(&self) -> bool {
        self.mu == 0.0
    }

    pub fn require_analytic(&self) -> Result<(), SeriesError> {
        if self.is_analytic() {
            Ok(())
        } else {
            Err(SeriesError::NotAnalytic(self.mu))
        }
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, SeriesError> {
        let poly = horner(&self.coeffs, z);
        if self.mu == 0.0 {
            return Ok(poly);
        }
        if z == Complex64::new(0.0, 0.0) {
            if self.mu > 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            // z^μ with μ < 0 is unbounded unless the whole series vanishes.
            return Err(SeriesError::Branch { mu: self.mu });
        }
        Ok(poly * principal_pow(z, self.mu)?)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.mu, self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// α·self + β·other; both operands must share the offset.
    pub fn lin_comb(
        &self,
        alpha: Complex64,
        other: &Self,
        beta: Complex64,
    ) -> Result<Self, SeriesError> {
        if self.mu != other.mu {
            return Err(SeriesError::OffsetMismatch(self.mu, other.mu));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| alpha * self.coeff(k) + beta * other.coeff(k))
            .collect();
        Ok(Self::new(self.mu, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let one = Complex64::new(1.0, 0.0);
        self.lin_comb(one, other, one)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Adds a constant to the z^μ coefficient.
    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Keeps powers 0..=n (padding with zeros if shorter).
    pub fn truncated(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        Self::new(self.mu, coeffs)
    }

    /// Cauchy product of two analytic series, truncated to degree n.
    pub fn mul_truncated(&self, other: &Self, n: usize) -> Result<Self, SeriesError> {
        self.require_analytic()?;
        other.require_analytic()?;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Ok(Self::analytic(out))
    }

    /// Term-wise derivative of an analytic series.
    pub fn derivative(&self) -> Result<Self, SeriesError> {
        self.require_analytic()?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Ok(Self::analytic(coeffs))
    }

    /// max_k |a_k| R^k: an upper bound for the sup norm of the analytic part
    /// on |z| ≤ R up to a factor N + 1, and the metric used for iteration.
    pub fn weighted_coeff_norm(&self, radius: f64) -> f64 {
        let mut rk = 1.0;
        let mut best: f64 = 0.0;
        for c in &self.coeffs {
            best = best.max(c.norm() * rk);
            rk *= radius;
        }
        best
    }

    /// Σ_k |a_k| R^{k+μ}, a true upper bound for |s| on |z| ≤ R when μ ≥ 0.
    pub fn abs_coeff_sum(&self, radius: f64) -> f64 {
        let mut rk = radius.powf(self.mu);
        let mut total = 0.0;
        for c in &self.coeffs {
            total += c.norm() * rk;
            rk *= radius;
        }
        total
    }

    /// True when every coefficient is real to within `tol`.
    pub fn has_real_coeffs(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }
}

/// F(z, t) = Σ_{j,k} c_{jk} z^j t^k, stored row-major with row j holding
/// the t-coefficients of z^j.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    coeffs: Vec<Vec<Complex64>>,
}

impl BivariateSeries {
    /// Builds from rows; ragged rows are padded with zeros.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Self {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let mut coeffs: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|mut r| {
                r.resize(width, Complex64::new(0.0, 0.0));
                r
            })
            .collect();
        if coeffs.is_empty() {
            coeffs.push(vec![Complex64::new(0.0, 0.0); width]);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    /// Sparse constructor from (j, k, c) triples; repeated indices add.
    pub fn from_terms(terms: &[(usize, usize, Complex64)]) -> Self {
        let jmax = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let kmax = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); kmax + 1]; jmax + 1];
        for &(j, k, c) in terms {
            rows[j][k] += c;
        }
        Self::new(rows)
    }

    /// Real-coefficient variant of [`Self::from_terms`].
    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Self {
        let t: Vec<_> = terms
            .iter()
            .map(|&(j, k, c)| (j, k, Complex64::new(c, 0.0)))
            .collect();
        Self::from_terms(&t)
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// Degree J in z.
    pub fn degree_z(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree K in t.
    pub fn degree_t(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        self.coeffs
            .get(j)
            .and_then(|r| r.get(k))
            .copied()
            .unwrap_or_default()
    }

    /// Σ_j c_{jk} z^j as an analytic series.
    pub fn column(&self, k: usize) -> AnalyticSeries {
        AnalyticSeries::analytic(self.coeffs.iter().map(|r| r.get(k).copied().unwrap_or_default()).collect())
    }

    pub fn eval(&self, z: Complex64, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, row| acc * z + horner(row, t))
    }

    /// ∂F/∂t at (z, t).
    pub fn eval_dt(&self, z: Complex64, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
            let d: Vec<Complex64> = row
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect();
            acc * z + horner(&d, t)
        })
    }

    /// F(0, t) = Σ_k c_{0k} t^k.
    pub fn at_origin(&self, t: Complex64) -> Complex64 {
        horner(&self.coeffs[0], t)
    }

    /// True when no t^k with k ≥ 2 appears.
    pub fn is_affine_in_t(&self) -> bool {
        self.coeffs
            .iter()
            .all(|r| r.iter().skip(2).all(|c| *c == Complex64::new(0.0, 0.0)))
    }

    pub fn map_coeffs(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|&c| f(c)).collect())
                .collect(),
        )
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0][0] += c;
        out
    }

    /// G(z, s) = F(z, s + b) by binomial re-expansion of each row.
    pub fn recentered(&self, b: Complex64) -> Self {
        if b == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        let width = self.degree_t() + 1;
        let binom = binomial_table(width);
        let rows = self
            .coeffs
            .iter()
            .map(|row| {
                (0..width)
                    .map(|m| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let mut bp = Complex64::new(1.0, 0.0);
                        for k in m..width {
                            acc += row[k] * binom[k][m] * bp;
                            bp *= b;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn has_real_coeffs(&self, tol: f64) -> bool {
        self.coeffs.iter().flatten().all(|c| c.im.abs() <= tol)
    }

    /// Σ |c_{jk}| r^k: a bound for |F| on the bidisc |z| ≤ 1, |t| ≤ r.
    pub fn abs_bound(&self, t_radius: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|row| {
                let mut rk = 1.0;
                row.iter()
                    .map(|c| {
                        let v = c.norm() * rk;
                        rk *= t_radius;
                        v
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n]; n];
    for k in 0..n {
        t[k][0] = 1.0;
        for m in 1..=k {
            t[k][m] = t[k - 1][m - 1] + if m < k { t[k - 1][m] } else { 0.0 };
        }
    }
    t
}

/// φ(z) = F(z, u(z)) truncated to degree `n`.
///
/// Horner in t: every intermediate product is cut back to degree `n`.
pub fn compose_rhs(
    rhs: &BivariateSeries,
    u: &AnalyticSeries,
    n: usize,
) -> Result<AnalyticSeries, SeriesError> {
    u.require_analytic()?;
    let u = u.truncated(n);
    let k_max = rhs.degree_t();
    let mut acc = rhs.column(k_max).truncated(n);
    for k in (0..k_max).rev() {
        acc = acc.mul_truncated(&u, n)?.add(&rhs.column(k).truncated(n))?;
    }
    Ok(acc)
}

/// Points R e^{2πi m/n}, m = 0..n.
pub fn circle_points(radius: f64, n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |m| Complex64::from_polar(radius, 2.0 * PI * m as f64 / n as f64))
}

/// Radial-angular grid of the closed disc |z| ≤ R, excluding the origin.
pub fn disc_grid(radius: f64, radii: usize, angles: usize) -> Vec<Complex64> {
    (1..=radii)
        .flat_map(|i| circle_points(radius * i as f64 / radii as f64, angles))
        .collect()
}

/// max |s(z)| over `n_samples` equally spaced points of |z| = R.
pub fn sup_norm_estimate(
    s: &FracPowerSeries,
    radius: f64,
    n_samples: usize,
) -> Result<f64, SeriesError> {
    if n_samples < 8 {
        return Err(SeriesError::InvalidArgument(format!(
            "sup_norm_estimate needs at least 8 samples, got {n_samples}"
        )));
    }
    if !(radius > 0.0) {
        return Err(SeriesError::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut best: f64 = 0.0;
    for z in circle_points(radius, n_samples) {
        best = best.max(s.eval(z)?.norm());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzReport {
    pub holds: bool,
    /// max |s(z)| / ((r/R)|z|) over the grid.
    pub worst_ratio: f64,
    #[serde(with = "crate::io::complex")]
    pub worst_point: Complex64,
}

/// Samples |s(z)| ≤ (r/R)|z| on a 16-radius grid of the closed disc of
/// radius R, using `n_samples` angles per ring.
pub fn schwarz_check(
    s: &AnalyticSeries,
    r: f64,
    radius: f64,
    n_samples: usize,
) -> Result<SchwarzReport, SeriesError> {
    s.require_analytic()?;
    if s.coeff(0).norm() > SCHWARZ_TOL {
        return Err(SeriesError::SchwarzPrecondition(format!(
            "u(0) = {} is not zero",
            s.coeff(0)
        )));
    }
    let sup = sup_norm_estimate(s, radius, n_samples)?;
    if sup > r * (1.0 + SCHWARZ_TOL) {
        return Err(SeriesError::SchwarzPrecondition(format!(
            "sup |u| on |z| = {radius} is {sup}, exceeding r = {r}"
        )));
    }
    let mut worst = 0.0;
    let mut worst_point = Complex64::new(0.0, 0.0);
    for z in disc_grid(radius, DEFAULT_RADII, n_samples) {
        let ratio = s.eval(z)?.norm() / (r / radius * z.norm());
        if ratio > worst {
            worst = ratio;
            worst_point = z;
        }
    }
    Ok(SchwarzReport {
        holds: worst <= 1.0 + SCHWARZ_TOL,
        worst_ratio: worst,
        worst_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn eval_examples() {
        let s = FracPowerSeries::from_real(0.0, &[0.0, 1.0]);
        assert!(close(s.eval(c(0.3, 0.4)).unwrap(), c(0.3, 0.4), 1e-16));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = FracPowerSeries::from_real(0.5, &[1.0]);
        assert!(close(s.eval(c(0.0, 1.0)).unwrap(), c(h, h), 1e-15));

        let s = FracPowerSeries::from_real(-0.5, &[1.0]);
        assert!(close(s.eval(c(-1.0, 0.0)).unwrap(), c(0.0, -1.0), 1e-15));
        // negative zero imaginary part still sits on the cut with arg = π
        assert!(close(s.eval(c(-1.0, -0.0)).unwrap(), c(0.0, -1.0), 1e-15));
    }

    #[test]
    fn eval_at_origin() {
        let s = FracPowerSeries::from_real(0.5, &[2.0, 1.0]);
        assert_eq!(s.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let s = FracPowerSeries::from_real(0.0, &[2.0, 1.0]);
        assert_eq!(s.eval(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        let s = FracPowerSeries::from_real(-0.5, &[1.0]);
        assert!(matches!(s.eval(c(0.0, 0.0)), Err(SeriesError::Branch { .. })));
    }

    #[test]
    fn compose_examples() {
        let id = BivariateSeries::from_real_terms(&[(0, 1, 1.0)]);
        let u = FracPowerSeries::from_real(0.0, &[0.0, 1.0]);
        let phi = compose_rhs(&id, &u, 8).unwrap();
        assert!(close(phi.coeff(1), c(1.0, 0.0), 0.0));
        assert!(phi.coeffs.iter().enumerate().all(|(k, v)| k == 1 || *v == c(0.0, 0.0)));

        let sq = BivariateSeries::from_real_terms(&[(0, 2, 1.0)]);
        let u = FracPowerSeries::from_real(0.0, &[1.0, 1.0]);
        let phi = compose_rhs(&sq, &u, 8).unwrap();
        assert_eq!(&phi.coeffs[..3], &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);

        let lin = BivariateSeries::from_real_terms(&[(1, 0, 1.0), (0, 1, 1.0)]);
        let u = FracPowerSeries::from_real(0.0, &[0.0, 3.0]);
        let phi = compose_rhs(&lin, &u, 8).unwrap();
        assert_eq!(phi.coeff(0), c(0.0, 0.0));
        assert_eq!(phi.coeff(1), c(4.0, 0.0));
    }

    #[test]
    fn compose_truncates() {
        let sq = BivariateSeries::from_real_terms(&[(0, 3, 1.0)]);
        let u = FracPowerSeries::from_real(0.0, &[0.0, 1.0]);
        let phi = compose_rhs(&sq, &u, 2).unwrap();
        assert!(phi.is_zero());
        assert_eq!(phi.trunc(), 2);
    }

    #[test]
    fn sup_norm_examples() {
        let s = FracPowerSeries::from_real(0.0, &[0.0, 0.0, 1.0]);
        assert!((sup_norm_estimate(&s, 1.0, 16).unwrap() - 1.0).abs() < 1e-15);

        let s = FracPowerSeries::from_real(0.0, &[0.0, 2.0, 1.0]);
        // dense brute force over the circle
        let dense = circle_points(1.0, 100_000)
            .map(|z| s.eval(z).unwrap().norm())
            .fold(0.0, f64::max);
        assert!((dense - 3.0).abs() < 1e-12);
        assert!((sup_norm_estimate(&s, 1.0, 64).unwrap() - 3.0).abs() < 1e-15);

        assert_eq!(sup_norm_estimate(&FracPowerSeries::zero(0.0), 1.0, 8).unwrap(), 0.0);
        assert!(sup_norm_estimate(&s, 1.0, 4).is_err());
    }

    #[test]
    fn schwarz_examples() {
        let z2 = FracPowerSeries::from_real(0.0, &[0.0, 0.0, 1.0]);
        assert!(schwarz_check(&z2, 1.0, 1.0, 64).unwrap().holds);

        let z = FracPowerSeries::from_real(0.0, &[0.0, 1.0]);
        let rep = schwarz_check(&z, 1.0, 1.0, 64).unwrap();
        assert!(rep.holds);
        assert!((rep.worst_ratio - 1.0).abs() < 1e-12);

        let s = FracPowerSeries::from_real(0.0, &[0.0, 0.5, 0.5]);
        let rep = schwarz_check(&s, 1.0, 1.0, 64).unwrap();
        assert!(rep.holds);
        assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
        assert!(close(rep.worst_point, c(1.0, 0.0), 1e-12));
    }

    #[test]
    fn schwarz_precondition_errors() {
        let s = FracPowerSeries::from_real(0.0, &[0.1, 1.0]);
        assert!(matches!(
            schwarz_check(&s, 2.0, 1.0, 64),
            Err(SeriesError::SchwarzPrecondition(_))
        ));
        let s = FracPowerSeries::from_real(0.0, &[0.0, 2.0]);
        assert!(matches!(
            schwarz_check(&s, 1.0, 1.0, 64),
            Err(SeriesError::SchwarzPrecondition(_))
        ));
    }

    #[test]
    fn recentering_matches_direct_evaluation() {
        let f = BivariateSeries::from_terms(&[
            (0, 0, c(0.2, 0.1)),
            (1, 1, c(-0.5, 0.0)),
            (0, 3, c(0.3, -0.2)),
            (2, 2, c(1.0, 1.0)),
        ]);
        let b = c(0.4, -0.7);
        let g = f.recentered(b);
        for (z, s) in [(c(0.3, 0.1), c(0.2, -0.5)), (c(-0.6, 0.2), c(1.0, 0.3))] {
            assert!(close(g.eval(z, s), f.eval(z, s + b), 1e-13));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cplx() -> impl Strategy<Value = Complex64> {
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
        }

        fn disc_point(r_max: f64) -> impl Strategy<Value = Complex64> {
            (0.0f64..r_max, -PI..PI).prop_map(|(r, th)| Complex64::from_polar(r, th))
        }

        proptest! {
            #[test]
            fn eval_is_linear(
                a in prop::collection::vec(cplx(), 1..12),
                b in prop::collection::vec(cplx(), 1..12),
                alpha in cplx(),
                beta in cplx(),
                z in disc_point(1.0),
                mu in prop::sample::select(vec![0.0, 0.25, 0.5, 1.5]),
            ) {
                prop_assume!(z.norm() > 1e-6);
                let s1 = FracPowerSeries::new(mu, a);
                let s2 = FracPowerSeries::new(mu, b);
                let comb = s1.lin_comb(alpha, &s2, beta).unwrap();
                let lhs = comb.eval(z).unwrap();
                let rhs = alpha * s1.eval(z).unwrap() + beta * s2.eval(z).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-12, "{lhs} vs {rhs}");
            }

            #[test]
            fn compose_matches_direct(
                rows in prop::collection::vec(prop::collection::vec(cplx(), 1..5), 1..5),
                u in prop::collection::vec(cplx(), 1..9),
                z in disc_point(0.5),
            ) {
                // degrees ≤ 8 in u, ≤ 4 in z and t: the product stays below N = 64
                let f = BivariateSeries::new(rows);
                let u = FracPowerSeries::analytic(u);
                let phi = compose_rhs(&f, &u, 64).unwrap();
                let direct = f.eval(z, u.eval(z).unwrap());
                prop_assert!((phi.eval(z).unwrap() - direct).norm() <= 1e-10);
            }
        }
    }
}
