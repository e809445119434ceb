//! Picard iteration for D^a u = f(z, u) on the disc.
//!
//! With F = z^a f and φ(z) = F(z, u(z)) = Σ φ_k z^k, the Volterra form
//!
//! ```text
//! Pu(z) = (1/Γ(a)) ∫₀^z ζ^{−a} φ(ζ) (z−ζ)^{a−1} dζ
//! ```
//!
//! acts diagonally on coefficients: (Pu)_k = φ_k Γ(k+1−a)/Γ(k+1). The
//! regularized problem adds the initial value b to the image.
//!
//! Both problem kinds are iterated in the shifted unknown v = u − b with
//! zero data, so one operator shape covers them:
//!
//! * kind RL uses H(z, s) = F(z, s+b) − b/Γ(1−a);
//! * kind Regularized uses G(z, s) = F(z, s+b).

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::conditions::{
    check_condition_ii, check_growth, check_regularized_compat, rhs_is_finite, CompatCheck,
    ConditionCheck, GrowthCheck, GrowthMode,
};
use crate::fracops::{self, FracOpsError, JacobiRule};
use crate::series::{
    circle_points, compose_rhs, disc_grid, sup_norm_estimate, AnalyticSeries, BivariateSeries,
    FracPowerSeries, SeriesError,
};
use crate::specfun::{self, SpecfunError};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Consecutive growing steps after which the iteration is declared divergent.
pub const DIVERGENCE_STREAK: usize = 5;
/// Radius r of the ball B_r the iteration is analysed on.
pub const BALL_RADIUS: f64 = 1.0;
/// Rates within this distance of 1 count as non-contractive.
pub const CONTRACTION_MARGIN: f64 = 1e-12;

const LIPSCHITZ_Z_SAMPLES: usize = 64;
const LIPSCHITZ_T_SAMPLES: usize = 16;
const GROWTH_SAMPLES: usize = 32;
const RESIDUAL_RADII: usize = 4;
const RESIDUAL_ANGLES: usize = 16;
const RADIUS_BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("order must lie in (0, 1), got {0}")]
    InvalidOrder(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("compatibility condition violated: z^a f(z, b) at z = 0 misses b/Γ(1−a) by {gap}")]
    ConditionIIViolated { gap: f64 },
    #[error("regularized compatibility violated: |z^a f(z, b)| at z = 0 is {value}")]
    RegularizedCompatViolated { value: f64 },
    #[error("no convergence after {iterations} iterations (last distance {distance:e})")]
    MaxIterExceeded { iterations: usize, distance: f64 },
    #[error("iteration diverged at step {iteration} (distance {distance:e})")]
    Diverged { iteration: usize, distance: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    FracOps(#[from] FracOpsError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

impl SolveError {
    /// True for failures of the mathematical hypotheses rather than of the
    /// numerics or the input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            SolveError::ConditionIIViolated { .. } | SolveError::RegularizedCompatViolated { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// D^a u = f(z, u), u(0) = b.
    Rl,
    /// D^a (u − u(0)) = f(z, u), u(0) = b.
    Regularized,
    /// Real-line Riemann–Liouville problem.
    RealRl,
    /// Real-line Caputo problem.
    RealCaputo,
}

impl ProblemKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rl" => Some(Self::Rl),
            "regularized" => Some(Self::Regularized),
            "real-rl" => Some(Self::RealRl),
            "real-caputo" => Some(Self::RealCaputo),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rl => "rl",
            Self::Regularized => "regularized",
            Self::RealRl => "real-rl",
            Self::RealCaputo => "real-caputo",
        }
    }

    /// The complex problem a real-line kind is solved through.
    pub fn complex_counterpart(self) -> Self {
        match self {
            Self::Rl | Self::RealRl => Self::Rl,
            Self::Regularized | Self::RealCaputo => Self::Regularized,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Self::RealRl | Self::RealCaputo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub order: f64,
    pub initial: Complex64,
    /// F(z, t) = z^a f(z, t).
    pub rhs: BivariateSeries,
    pub trunc: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Starting iterate; defaults to the constant b.
    pub seed: Option<AnalyticSeries>,
    /// Growth bound used for radius selection when P is not contractive.
    pub envelope: Option<GrowthEnvelope>,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, order: f64, initial: Complex64, rhs: BivariateSeries) -> Self {
        Self {
            kind,
            order,
            initial,
            rhs,
            trunc: crate::series::DEFAULT_TRUNC,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: None,
            envelope: None,
        }
    }

    pub fn with_seed(mut self, seed: AnalyticSeries) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_envelope(mut self, env: GrowthEnvelope) -> Self {
        self.envelope = Some(env);
        self
    }

    pub fn with_trunc(mut self, trunc: usize) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// |F(z, t)| ≤ c|t|^{n0} + |g(z)| with g(0) = 0 and |g| ≤ Mg on the disc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEnvelope {
    pub c: f64,
    pub n0: usize,
    pub g: AnalyticSeries,
    pub mg: f64,
}

impl GrowthEnvelope {
    /// `mg` defaults to Σ|g_k|, an upper bound for sup |g| on the unit disc.
    pub fn new(c: f64, n0: usize, g: AnalyticSeries, mg: Option<f64>) -> Result<Self, SolveError> {
        if !(c >= 0.0) {
            return Err(SolveError::InvalidArgument(format!("envelope c must be >= 0, got {c}")));
        }
        if n0 < 1 {
            return Err(SolveError::InvalidArgument("envelope n0 must be >= 1".into()));
        }
        g.require_analytic()?;
        if g.coeff(0).norm() > 1e-12 {
            return Err(SolveError::InvalidArgument("envelope g must vanish at 0".into()));
        }
        let sup = sup_norm_estimate(&g, 1.0, 256)?;
        let mg = mg.unwrap_or_else(|| g.abs_coeff_sum(1.0));
        if mg < sup * (1.0 - 1e-12) {
            return Err(SolveError::InvalidArgument(format!(
                "envelope mg = {mg} is below sup |g| ≈ {sup}"
            )));
        }
        Ok(Self { c, n0, g, mg })
    }

    /// Envelope of W(z, s) valid on |s| ≤ r: n0 = 1,
    /// c = Σ_{k≥1} Σ_j |w_{jk}| r^{k−1}, g = W(z, 0).
    pub fn from_rhs_on_ball(rhs: &BivariateSeries, r: f64) -> Result<Self, SolveError> {
        let mut c = 0.0;
        for k in 1..=rhs.degree_t() {
            let col: f64 = rhs.column(k).coeffs.iter().map(|x| x.norm()).sum();
            c += col * r.powi(k as i32 - 1);
        }
        let mut g = rhs.column(0);
        // g(0) is F(0, b) minus its compatibility value; zero under the hypotheses
        g.coeffs[0] = Complex64::new(0.0, 0.0);
        Self::new(c, 1, g, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionEstimate {
    pub kappa: f64,
    /// κ Γ(2−a).
    pub rate: f64,
    /// 1/Γ(2−a).
    pub threshold: f64,
}

impl ContractionEstimate {
    pub fn new(kappa: f64, a: f64) -> Result<Self, SolveError> {
        let g = specfun::gamma(2.0 - a)?;
        Ok(Self {
            kappa,
            rate: kappa * g,
            threshold: 1.0 / g,
        })
    }

    pub fn is_contraction(&self) -> bool {
        self.rate < 1.0 - CONTRACTION_MARGIN
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Converged under a verified contraction: the solution is unique.
    Converged,
    /// Rate ≥ 1: the returned iterate carries no uniqueness guarantee.
    NoContraction,
    /// Rate ≥ 1, no convergence, but every iterate stayed inside B_r on U_R.
    IterationInconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusSource {
    Contraction,
    GrowthEnvelope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_ii: Option<ConditionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularized_compat: Option<CompatCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthCheck>,
    pub lipschitz: ContractionEstimate,
    pub finite_rhs: bool,
    pub shifted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<GrowthEnvelope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant_ball_verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub kind: ProblemKind,
    pub order: f64,
    #[serde(with = "crate::io::complex")]
    pub initial: Complex64,
    pub solution: AnalyticSeries,
    pub radius: f64,
    pub radius_source: RadiusSource,
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    pub distances: Vec<f64>,
    pub observed_ratios: Vec<f64>,
    pub residual_series: f64,
    pub residual_quad: f64,
    pub contraction: ContractionEstimate,
    pub conditions: Diagnostics,
}

impl SolveReport {
    /// `n,distance,ratio` rows; the first row has no ratio.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("n,distance,ratio\n");
        for (i, d) in self.distances.iter().enumerate() {
            let ratio = if i == 0 || self.distances[i - 1] == 0.0 {
                String::new()
            } else {
                format!("{}", d / self.distances[i - 1])
            };
            out.push_str(&format!("{},{},{}\n", i + 1, d, ratio));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// The diagonal operator u ↦ Σ φ_k Γ(k+1−a)/Γ(k+1) z^k + constant.
#[derive(Debug, Clone)]
pub struct PicardOperator {
    rhs: BivariateSeries,
    order: f64,
    trunc: usize,
    multipliers: Vec<f64>,
    constant: Complex64,
}

impl PicardOperator {
    pub fn new(
        rhs: BivariateSeries,
        a: f64,
        trunc: usize,
        constant: Complex64,
    ) -> Result<Self, SolveError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(SolveError::InvalidOrder(a));
        }
        let multipliers = (0..=trunc)
            .map(|k| specfun::gamma_ratio(k as f64 + 1.0 - a, k as f64 + 1.0))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            rhs,
            order: a,
            trunc,
            multipliers,
            constant,
        })
    }

    /// Operator of the stated problem kind with initial value b.
    pub fn for_kind(
        rhs: BivariateSeries,
        a: f64,
        kind: ProblemKind,
        b: Complex64,
        trunc: usize,
    ) -> Result<Self, SolveError> {
        let constant = match kind.complex_counterpart() {
            ProblemKind::Regularized => b,
            _ => Complex64::new(0.0, 0.0),
        };
        Self::new(rhs, a, trunc, constant)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn apply(&self, u: &AnalyticSeries) -> Result<AnalyticSeries, SolveError> {
        let phi = compose_rhs(&self.rhs, u, self.trunc)?;
        let coeffs = phi
            .coeffs
            .iter()
            .zip(&self.multipliers)
            .map(|(&p, &m)| p * m)
            .collect();
        Ok(AnalyticSeries::analytic(coeffs).add_constant(self.constant))
    }
}

/// One application of the Picard operator of the given kind.
pub fn picard_step(
    rhs: &BivariateSeries,
    u: &AnalyticSeries,
    a: f64,
    kind: ProblemKind,
    b: Complex64,
    trunc: usize,
) -> Result<AnalyticSeries, SolveError> {
    PicardOperator::for_kind(rhs.clone(), a, kind, b, trunc)?.apply(u)
}

/// H(z, s) = F(z, s + b) − b/Γ(1−a).
pub fn shift_to_homogeneous(
    rhs: &BivariateSeries,
    b: Complex64,
    a: f64,
) -> Result<BivariateSeries, SolveError> {
    if b == Complex64::new(0.0, 0.0) {
        return Ok(rhs.clone());
    }
    Ok(rhs.recentered(b).add_constant(-b * specfun::recip_gamma(1.0 - a)))
}

/// Largest R ∈ (0, 1] with
/// c r^{n0} R^{n0} Γ(n0+1−a)/Γ(n0+1) + Mg R Γ(2−a) ≤ r.
pub fn estimate_radius(env: &GrowthEnvelope, r: f64, a: f64) -> Result<f64, SolveError> {
    if !(r > 0.0) {
        return Err(SolveError::InvalidArgument(format!("ball radius must be positive, got {r}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(SolveError::InvalidOrder(a));
    }
    let n0 = env.n0 as f64;
    let power_term = env.c * r.powf(n0) * specfun::gamma_ratio(n0 + 1.0 - a, n0 + 1.0)?;
    let linear_term = env.mg * specfun::gamma(2.0 - a)?;
    let bound = |radius: f64| power_term * radius.powf(n0) + linear_term * radius;
    if bound(1.0) <= r {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > RADIUS_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Lipschitz constant of F in t, sampled over |z| = 1 and |t| ≤ `t_radius`.
///
/// When F is affine in t the constant is sup_{|z|=1} |Σ_j c_{j1} z^j|.
/// Otherwise all pairs of the t-samples are compared, together with
/// |∂F/∂t| on the sample points.
pub fn estimate_lipschitz(
    rhs: &BivariateSeries,
    a: f64,
    nz: usize,
    nt: usize,
    t_radius: f64,
) -> Result<ContractionEstimate, SolveError> {
    if nz < 8 || nt < 8 {
        return Err(SolveError::InvalidArgument(format!(
            "lipschitz sampling needs at least 8 points per axis, got ({nz}, {nt})"
        )));
    }
    if rhs.is_affine_in_t() {
        let kappa = sup_norm_estimate(&rhs.column(1), 1.0, nz)?;
        return ContractionEstimate::new(kappa, a);
    }
    let outer = nt.div_ceil(2);
    let t_points: Vec<Complex64> = circle_points(t_radius, outer)
        .chain(circle_points(0.5 * t_radius, nt - outer))
        .collect();
    let mut kappa: f64 = 0.0;
    for z in circle_points(1.0, nz) {
        let values: Vec<Complex64> = t_points.iter().map(|&t| rhs.eval(z, t)).collect();
        for (i, &eta) in t_points.iter().enumerate() {
            kappa = kappa.max(rhs.eval_dt(z, eta).norm());
            for (j, &nu) in t_points.iter().enumerate().skip(i + 1) {
                let q = (values[i] - values[j]).norm() / (eta - nu).norm();
                kappa = kappa.max(q);
            }
        }
    }
    ContractionEstimate::new(kappa, a)
}

/// Witness search for non-injectivity on the closed disc of radius R.
///
/// `n` sample points (four rings of n/4 angles) are compared pairwise, and
/// from every pair Newton's method looks for a second preimage of u(p). A
/// pair of points at least 1e-3 apart with images within 1e-10 of each other
/// disproves univalence. Absence of a witness is not a proof.
pub fn univalence_check(u: &AnalyticSeries, radius: f64, n: usize) -> Result<bool, SolveError> {
    u.require_analytic()?;
    if n < 16 {
        return Err(SolveError::InvalidArgument(format!(
            "univalence_check needs n >= 16, got {n}"
        )));
    }
    const IMAGE_TOL: f64 = 1e-10;
    const SEPARATION: f64 = 1e-3;
    let du = u.derivative()?;
    let points = disc_grid(radius, 4, n / 4);
    let values: Vec<Complex64> = points
        .iter()
        .map(|&p| u.eval(p))
        .collect::<Result<_, _>>()?;
    let inside = |q: Complex64| q.norm() <= radius * (1.0 + 1e-12);
    for (i, &p) in points.iter().enumerate() {
        let target = values[i];
        for (j, &q0) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if j > i && (p - q0).norm() >= SEPARATION && (values[j] - target).norm() <= IMAGE_TOL {
                return Ok(false);
            }
            // Newton on u(q) = u(p) starting from q0.
            let mut q = q0;
            for _ in 0..30 {
                let d = du.eval(q)?;
                if d.norm() < 1e-300 {
                    break;
                }
                let step = (u.eval(q)? - target) / d;
                q -= step;
                if !inside(q) || !q.is_finite() {
                    break;
                }
                if step.norm() < 1e-15 {
                    break;
                }
            }
            if inside(q)
                && q.is_finite()
                && (q - p).norm() >= SEPARATION
                && (u.eval(q)? - target).norm() <= IMAGE_TOL
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hypotheses, contraction estimate and radius of a problem, without
/// iterating.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemCheck {
    pub kind: ProblemKind,
    pub order: f64,
    pub radius: f64,
    pub radius_source: RadiusSource,
    pub conditions: Diagnostics,
}

/// Checks the hypotheses of a problem and selects the solve radius.
///
/// Fails with `ConditionIIViolated` or `RegularizedCompatViolated` when the
/// compatibility value at z = 0 is off.
pub fn check_problem(p: &ProblemSpec) -> Result<ProblemCheck, SolveError> {
    Ok(prepare(p)?.0)
}

fn prepare(p: &ProblemSpec) -> Result<(ProblemCheck, BivariateSeries), SolveError> {
    let a = p.order;
    if !(a > 0.0 && a < 1.0) {
        return Err(SolveError::InvalidOrder(a));
    }
    if p.trunc == 0 || !(p.tol > 0.0) {
        return Err(SolveError::InvalidArgument(
            "trunc must be >= 1 and tol positive".into(),
        ));
    }
    let b = p.initial;
    let zero = Complex64::new(0.0, 0.0);
    let kind = p.kind.complex_counterpart();

    let mut condition_ii = None;
    let mut regularized_compat = None;
    // Right-hand side in the shifted unknown v = u − b, and the function the
    // centered growth bound is stated for.
    let (work_rhs, growth_rhs) = match kind {
        ProblemKind::Rl => {
            let check = check_condition_ii(&p.rhs, b, a);
            condition_ii = Some(check);
            if !check.passed {
                return Err(SolveError::ConditionIIViolated { gap: check.gap });
            }
            (
                shift_to_homogeneous(&p.rhs, b, a)?,
                p.rhs.add_constant(-b * specfun::recip_gamma(1.0 - a)),
            )
        }
        _ => {
            let check = check_regularized_compat(&p.rhs, b);
            regularized_compat = Some(check);
            if !check.passed {
                return Err(SolveError::RegularizedCompatViolated { value: check.value });
            }
            (p.rhs.recentered(b), p.rhs.clone())
        }
    };
    let shifted = b != zero;

    let contraction = estimate_lipschitz(
        &work_rhs,
        a,
        LIPSCHITZ_Z_SAMPLES,
        LIPSCHITZ_T_SAMPLES,
        BALL_RADIUS,
    )?;

    let mut growth = None;
    let mut envelope = None;
    let (radius, radius_source) = if contraction.is_contraction() {
        (1.0, RadiusSource::Contraction)
    } else {
        let env = match &p.envelope {
            Some(env) => {
                let mode = if shifted { GrowthMode::Centered } else { GrowthMode::Abs };
                growth = Some(check_growth(
                    &growth_rhs,
                    env,
                    b,
                    mode,
                    GROWTH_SAMPLES,
                    GROWTH_SAMPLES,
                )?);
                env.clone()
            }
            None => GrowthEnvelope::from_rhs_on_ball(&work_rhs, BALL_RADIUS)?,
        };
        let radius = estimate_radius(&env, BALL_RADIUS, a)?;
        envelope = Some(env);
        (radius, RadiusSource::GrowthEnvelope)
    };

    let check = ProblemCheck {
        kind: p.kind,
        order: a,
        radius,
        radius_source,
        conditions: Diagnostics {
            condition_ii,
            regularized_compat,
            growth,
            lipschitz: contraction,
            finite_rhs: rhs_is_finite(&p.rhs),
            shifted,
            envelope,
            invariant_ball_verified: None,
        },
    };
    Ok((check, work_rhs))
}

/// Iterates the Picard operator from u₀ ≡ b (or the seed) and reports the
/// fixed point together with contraction, radius and residual diagnostics.
pub fn solve_picard(p: &ProblemSpec) -> Result<SolveReport, SolveError> {
    let (check, work_rhs) = prepare(p)?;
    let a = p.order;
    let b = p.initial;
    let zero = Complex64::new(0.0, 0.0);
    let kind = p.kind.complex_counterpart();
    let radius = check.radius;
    let contraction = check.conditions.lipschitz;
    let has_envelope = check.conditions.envelope.is_some();

    let op = PicardOperator::new(work_rhs.clone(), a, p.trunc, zero)?;
    let mut v = match &p.seed {
        Some(seed) => {
            seed.require_analytic()?;
            seed.add_constant(-b).truncated(p.trunc)
        }
        None => AnalyticSeries::zero(0.0).truncated(p.trunc),
    };

    let mut distances: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut streak = 0;
    let mut converged = false;
    let mut ball_ok = true;
    let mut iterations = 0;
    for it in 1..=p.max_iter {
        let next = op.apply(&v)?;
        let d = next.sub(&v)?.weighted_coeff_norm(radius);
        if let Some(&prev) = distances.last() {
            if prev > 0.0 {
                ratios.push(d / prev);
            }
            streak = if d > prev { streak + 1 } else { 0 };
        }
        distances.push(d);
        v = next;
        iterations = it;
        if !d.is_finite() || streak >= DIVERGENCE_STREAK {
            return Err(SolveError::Diverged {
                iteration: it,
                distance: d,
            });
        }
        if has_envelope && ball_ok {
            ball_ok = sup_norm_estimate(&v, radius, 64)? <= BALL_RADIUS * (1.0 + 1e-12);
        }
        if d <= p.tol {
            converged = true;
            break;
        }
    }

    let status = match (converged, contraction.is_contraction()) {
        (true, true) => SolveStatus::Converged,
        (false, true) => {
            return Err(SolveError::MaxIterExceeded {
                iterations,
                distance: distances.last().copied().unwrap_or(f64::NAN),
            })
        }
        (true, false) => SolveStatus::NoContraction,
        (false, false) if ball_ok && has_envelope => SolveStatus::IterationInconclusive,
        (false, false) => SolveStatus::NoContraction,
    };

    let solution = v.add_constant(b);
    let residual_series = series_residual(&p.rhs, &solution, a, kind, b, p.trunc, radius)?;
    let residual_quad = quadrature_residual(&p.rhs, &solution, a, kind, b, radius)?;

    Ok(SolveReport {
        kind: p.kind,
        order: a,
        initial: b,
        solution,
        radius,
        radius_source: check.radius_source,
        iterations,
        converged,
        status,
        distances,
        observed_ratios: ratios,
        residual_series,
        residual_quad,
        contraction,
        conditions: Diagnostics {
            invariant_ball_verified: has_envelope.then_some(ball_ok),
            ..check.conditions
        },
    })
}

/// ‖u − Pu‖ in the iteration metric, with P the operator of the original
/// (unshifted) problem.
pub fn series_residual(
    rhs: &BivariateSeries,
    u: &AnalyticSeries,
    a: f64,
    kind: ProblemKind,
    b: Complex64,
    trunc: usize,
    radius: f64,
) -> Result<f64, SolveError> {
    let op = PicardOperator::for_kind(rhs.clone(), a, kind, b, trunc)?;
    Ok(u.sub(&op.apply(u)?)?.weighted_coeff_norm(radius))
}

/// max over a disc grid of |u(z) − b·[regularized] − I^a[ζ^{−a} F(ζ, u(ζ))](z)|
/// with the image computed by Gauss–Jacobi quadrature on the untruncated
/// composition.
pub fn quadrature_residual(
    rhs: &BivariateSeries,
    u: &AnalyticSeries,
    a: f64,
    kind: ProblemKind,
    b: Complex64,
    radius: f64,
) -> Result<f64, SolveError> {
    let rule = JacobiRule::with_origin_exponent(fracops::DEFAULT_NODES, a, -a)?;
    let offset = match kind.complex_counterpart() {
        ProblemKind::Regularized => b,
        _ => Complex64::new(0.0, 0.0),
    };
    let mut worst: f64 = 0.0;
    for z in disc_grid(radius, RESIDUAL_RADII, RESIDUAL_ANGLES) {
        let image = fracops::frac_integral_quad(
            |w| -> Result<Complex64, SolveError> { Ok(rhs.eval(w, u.eval(w)?)) },
            a,
            z,
            &rule,
        )?;
        worst = worst.max((u.eval(z)? - offset - image).norm());
    }
    Ok(worst)
}

/// Difference of two series in the iteration metric max_k |Δa_k| R^k.
pub fn series_distance(
    x: &FracPowerSeries,
    y: &FracPowerSeries,
    radius: f64,
) -> Result<f64, SolveError> {
    Ok(x.sub(y)?.weighted_coeff_norm(radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const G15: f64 = 0.886_226_925_452_758;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(coeffs: &[f64]) -> AnalyticSeries {
        AnalyticSeries::from_real(0.0, coeffs)
    }

    #[test]
    fn picard_step_examples() {
        let f = BivariateSeries::from_real_terms(&[(0, 1, std::f64::consts::FRAC_2_SQRT_PI)]);
        let out = picard_step(&f, &real(&[0.0, 1.0]), 0.5, ProblemKind::Rl, c(0.0, 0.0), 16).unwrap();
        assert!((out.coeff(1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(out.coeffs.iter().enumerate().all(|(k, v)| k == 1 || v.norm() == 0.0));

        let f = BivariateSeries::from_real_terms(&[(0, 1, 1.504_505_556_127_350_1)]);
        let out = picard_step(&f, &real(&[0.0, 0.0, 1.0]), 0.5, ProblemKind::Rl, c(0.0, 0.0), 16).unwrap();
        assert!((out.coeff(2) - c(1.0, 0.0)).norm() < 1e-15);

        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let out = picard_step(&f, &real(&[0.0]), 0.5, ProblemKind::Rl, c(0.0, 0.0), 16).unwrap();
        assert!((out.coeff(1).re - G15).abs() < 1e-15);
    }

    #[test]
    fn regularized_step_adds_initial_value() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let out = picard_step(&f, &real(&[1.0]), 0.5, ProblemKind::Regularized, c(1.0, 0.0), 8).unwrap();
        assert_eq!(out.coeff(0), c(1.0, 0.0));
        assert!((out.coeff(1).re - G15).abs() < 1e-15);
    }

    #[test]
    fn solve_forced() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f)).unwrap();
        assert_eq!(rep.iterations, 2);
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!((rep.solution.coeff(1).re - G15).abs() < 1e-15);
        assert!(rep.residual_series < 1e-12);
        assert!(rep.residual_quad < 1e-12);
    }

    #[test]
    fn solve_rejects_incompatible_constant() {
        let f = BivariateSeries::from_real_terms(&[(0, 0, 1.0), (0, 1, 0.5)]);
        let err = solve_picard(&ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f)).unwrap_err();
        assert_eq!(err, SolveError::ConditionIIViolated { gap: 1.0 });
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn solve_contraction_ratios() {
        let f = BivariateSeries::from_real_terms(&[(0, 1, 0.5)]);
        let p = ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f).with_seed(real(&[0.0, 1.0]));
        let rep = solve_picard(&p).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!(rep.solution.weighted_coeff_norm(1.0) < 1e-11);
        assert!(!rep.observed_ratios.is_empty());
        for r in &rep.observed_ratios {
            assert!((r - 0.443_113_462_726_379).abs() < 1e-10, "{r}");
        }
        assert!((rep.contraction.rate - 0.443_113_462_726_379).abs() < 1e-14);
    }

    #[test]
    fn solve_regularized_forced() {
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0)]);
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Regularized, 0.5, c(1.0, 0.0), f)).unwrap();
        assert!((rep.solution.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((rep.solution.coeff(1).re - G15).abs() < 1e-15);
        assert!(rep.residual_series < 1e-12 && rep.residual_quad < 1e-12);
    }

    #[test]
    fn regularized_incompatible_rejected() {
        let f = BivariateSeries::from_real_terms(&[(0, 1, 0.5)]);
        let err =
            solve_picard(&ProblemSpec::new(ProblemKind::Regularized, 0.5, c(1.0, 0.0), f)).unwrap_err();
        assert!(matches!(err, SolveError::RegularizedCompatViolated { .. }));
    }

    #[test]
    fn rl_with_nonzero_initial_value() {
        // F(z, t) = b/Γ(1−a) + 0.3 (t − b) + z satisfies the compatibility condition.
        let a = 0.4;
        let b = c(0.7, -0.2);
        let k0 = b * specfun::recip_gamma(1.0 - a) - b * 0.3;
        let f = BivariateSeries::from_terms(&[(0, 0, k0), (0, 1, c(0.3, 0.0)), (1, 0, c(1.0, 0.0))]);
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, a, b, f.clone())).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!((rep.solution.coeff(0) - b).norm() < 1e-14);
        assert!(rep.residual_series < 1e-12);
        assert!(rep.residual_quad < 1e-11, "{}", rep.residual_quad);
        // the unshifted operator fixes the solution as well
        let again = picard_step(&f, &rep.solution, a, ProblemKind::Rl, b, 64).unwrap();
        assert!(series_distance(&again, &rep.solution, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn nonlinear_problem_converges() {
        // F(z, t) = z + 0.2 t², contraction on the unit ball.
        let f = BivariateSeries::from_real_terms(&[(1, 0, 1.0), (0, 2, 0.2)]);
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f)).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!(rep.contraction.rate < 1.0);
        assert!(rep.residual_series < 1e-12);
        assert!(rep.residual_quad < 1e-10, "{}", rep.residual_quad);
    }

    #[test]
    fn boundary_case_reports_no_contraction() {
        let k = specfun::recip_gamma(1.5);
        let f = BivariateSeries::from_real_terms(&[(0, 1, k)]);
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f.clone())).unwrap();
        assert_eq!(rep.status, SolveStatus::NoContraction);
        assert!((rep.contraction.rate - 1.0).abs() < 1e-10);
        assert_eq!(rep.radius_source, RadiusSource::GrowthEnvelope);

        // stalls on a family member instead of failing
        let p = ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f)
            .with_seed(real(&[0.0, 0.5, 0.0, 0.25]))
            .with_max_iter(20);
        let rep = solve_picard(&p).unwrap();
        assert_eq!(rep.status, SolveStatus::IterationInconclusive);
        assert_eq!(rep.conditions.invariant_ball_verified, Some(true));
        let rep = solve_picard(&p.with_max_iter(200)).unwrap();
        assert_eq!(rep.status, SolveStatus::NoContraction);
        assert!((rep.solution.coeff(1).re - 0.5).abs() < 1e-15);
        assert!(rep.solution.coeff(3).norm() < 1e-11);
    }

    #[test]
    fn radius_examples() {
        let env = GrowthEnvelope::new(1.0, 2, FracPowerSeries::zero(0.0), Some(0.1)).unwrap();
        assert_eq!(estimate_radius(&env, 1.0, 0.5).unwrap(), 1.0);

        let env = GrowthEnvelope::new(4.0, 1, FracPowerSeries::zero(0.0), Some(0.0)).unwrap();
        for r in [0.5, 1.0, 3.0] {
            let radius = estimate_radius(&env, r, 0.5).unwrap();
            assert!((radius - 0.282_094_791_773_878_1).abs() < 1e-9);
        }

        let env = GrowthEnvelope::new(0.0, 1, FracPowerSeries::zero(0.0), Some(0.0)).unwrap();
        assert_eq!(estimate_radius(&env, 1.0, 0.5).unwrap(), 1.0);
        assert!(estimate_radius(&env, 0.0, 0.5).is_err());
    }

    #[test]
    fn radius_bound_holds_at_result() {
        let g = real(&[0.0, 0.6, 0.3]);
        let env = GrowthEnvelope::new(2.0, 3, g, None).unwrap();
        let (r, a) = (0.8, 0.3);
        let radius = estimate_radius(&env, r, a).unwrap();
        let bound = |rr: f64| {
            env.c * r.powi(3) * rr.powi(3) * specfun::gamma_ratio(4.0 - a, 4.0).unwrap()
                + env.mg * rr * specfun::gamma(2.0 - a).unwrap()
        };
        assert!(radius < 1.0);
        assert!(bound(radius) <= r);
        assert!(bound(radius + 1e-9) > r);
    }

    #[test]
    fn envelope_validation() {
        assert!(GrowthEnvelope::new(-1.0, 1, FracPowerSeries::zero(0.0), None).is_err());
        assert!(GrowthEnvelope::new(1.0, 0, FracPowerSeries::zero(0.0), None).is_err());
        assert!(GrowthEnvelope::new(1.0, 1, real(&[1.0, 1.0]), None).is_err());
        assert!(GrowthEnvelope::new(1.0, 1, real(&[0.0, 1.0]), Some(0.5)).is_err());
        let env = GrowthEnvelope::new(1.0, 1, real(&[0.0, 1.0, -0.5]), None).unwrap();
        assert!((env.mg - 1.5).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_examples() {
        let lam = c(0.3, -0.4);
        let f = BivariateSeries::from_terms(&[(0, 1, lam)]);
        let est = estimate_lipschitz(&f, 0.5, 16, 16, 1.0).unwrap();
        assert!((est.kappa - 0.5).abs() < 1e-15);

        let f = BivariateSeries::from_real_terms(&[(0, 1, 0.5)]);
        let est = estimate_lipschitz(&f, 0.5, 16, 16, 1.0).unwrap();
        assert!((est.rate - 0.443_113_462_726_379).abs() < 1e-14);
        assert!(est.is_contraction());
        assert!(est.kappa < est.threshold);

        let f = BivariateSeries::from_real_terms(&[(0, 1, std::f64::consts::FRAC_2_SQRT_PI)]);
        let est = estimate_lipschitz(&f, 0.5, 16, 16, 1.0).unwrap();
        assert!((est.rate - 1.0).abs() < 1e-10);
        assert!(!est.is_contraction());

        // t² on |t| ≤ 1 has Lipschitz constant 2
        let f = BivariateSeries::from_real_terms(&[(0, 2, 1.0)]);
        let est = estimate_lipschitz(&f, 0.5, 16, 16, 1.0).unwrap();
        assert!((est.kappa - 2.0).abs() < 1e-12);

        assert!(estimate_lipschitz(&f, 0.5, 4, 16, 1.0).is_err());
    }

    #[test]
    fn shift_examples() {
        let f = BivariateSeries::from_real_terms(&[(0, 1, 1.0), (1, 0, 2.0)]);
        assert_eq!(shift_to_homogeneous(&f, c(0.0, 0.0), 0.5).unwrap(), f);

        let f = BivariateSeries::from_real_terms(&[(0, 1, 1.0)]);
        let h = shift_to_homogeneous(&f, c(1.0, 0.0), 0.5).unwrap();
        assert!((h.coeff(0, 0).re - 0.435_810_416_452_243_7).abs() < 1e-15);
        assert_eq!(h.coeff(0, 1), c(1.0, 0.0));
    }

    #[test]
    fn shift_transports_condition_ii() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = rng.gen_range(0.05..0.95);
            let b = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mut terms = vec![];
            for j in 0..3 {
                for k in 0..3 {
                    terms.push((j, k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
                }
            }
            let mut f = BivariateSeries::from_terms(&terms);
            if rng.gen_bool(0.5) {
                // force compatibility at b
                let fix = b * specfun::recip_gamma(1.0 - a) - f.at_origin(b);
                f = f.add_constant(fix);
            }
            let before = check_condition_ii(&f, b, a).passed;
            let h = shift_to_homogeneous(&f, b, a).unwrap();
            let after = check_condition_ii(&h, c(0.0, 0.0), a).passed;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn univalence_examples() {
        assert!(univalence_check(&real(&[0.0, 1.0]), 1.0, 32).unwrap());
        assert!(!univalence_check(&real(&[0.0, 0.0, 1.0]), 1.0, 32).unwrap());
        assert!(!univalence_check(&real(&[0.0, 0.0, 0.0, 1.0]), 1.0, 32).unwrap());
        assert!(univalence_check(&real(&[0.0, 1.0, 0.1]), 1.0, 32).unwrap());
        assert!(univalence_check(&real(&[0.0, 1.0]), 1.0, 8).is_err());
    }

    #[test]
    fn diagonal_operator_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rcoef = |rng: &mut ChaCha8Rng| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        for (kind, b) in [(ProblemKind::Rl, c(0.0, 0.0)), (ProblemKind::Regularized, c(0.4, 0.1))] {
            for a in [0.25, 0.5, 0.75] {
                let u = AnalyticSeries::analytic((0..6).map(|_| rcoef(&mut rng)).collect());
                let f = BivariateSeries::new(
                    (0..3).map(|_| (0..3).map(|_| rcoef(&mut rng)).collect()).collect(),
                );
                let step = picard_step(&f, &u, a, kind, b, 64).unwrap();
                let rule = JacobiRule::with_origin_exponent(64, a, -a).unwrap();
                let offset = if kind == ProblemKind::Regularized { b } else { c(0.0, 0.0) };
                for _ in 0..10 {
                    let z = Complex64::from_polar(
                        rng.gen_range(0.1..0.9),
                        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                    );
                    let quad = fracops::frac_integral_quad(
                        |w| -> Result<Complex64, SolveError> { Ok(f.eval(w, u.eval(w)?)) },
                        a,
                        z,
                        &rule,
                    )
                    .unwrap();
                    let lhs = step.eval(z).unwrap() - offset;
                    assert!((lhs - quad).norm() < 1e-9, "{lhs} vs {quad}");
                }
            }
        }
    }

    #[test]
    fn csv_table_shape() {
        let f = BivariateSeries::from_real_terms(&[(0, 1, 0.5)]);
        let p = ProblemSpec::new(ProblemKind::Rl, 0.5, c(0.0, 0.0), f).with_seed(real(&[0.0, 1.0]));
        let rep = solve_picard(&p).unwrap();
        let csv = rep.convergence_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,distance,ratio");
        assert_eq!(lines.len(), rep.distances.len() + 1);
        assert!(lines[1].ends_with(','));
        let ratio: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
        assert!((ratio - 0.443_113_462_726_379).abs() < 1e-10);
    }
}
