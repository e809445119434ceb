//! Built-in catalogue of closed-form examples and counterexamples.
//!
//! Each entry pairs a problem with the outcome the theory predicts. Families
//! of solutions are checked at ten pseudo-random complex parameters drawn
//! from a fixed seed, so runs are reproducible.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fracops::frac_derivative_series;
use crate::series::{AnalyticSeries, BivariateSeries, FracPowerSeries};
use crate::solver::{
    picard_step, solve_picard, univalence_check, ProblemKind, ProblemSpec, SolveError, SolveStatus,
};
use crate::specfun;

pub const FAMILY_SAMPLES: usize = 10;
const FAMILY_SEED: u64 = 0x5eed_f00d;
const UNIVALENCE_SAMPLES: usize = 64;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry {0:?}")]
    UnknownEntry(String),
    #[error("corpus order must lie in (0, 1), got {0}")]
    Order(f64),
    #[error("corpus degree n must be at least 2, got {0}")]
    Degree(usize),
    #[error(transparent)]
    Specfun(#[from] specfun::SpecfunError),
}

/// Parameters shared by every entry: the order a and the degree n of the
/// non-univalent family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub order: f64,
    pub n: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { order: 0.5, n: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// The solver converges under contraction to this series.
    UniqueSolution { solution: AnalyticSeries, rate: f64 },
    /// Every c·z^{offset+degree} solves the problem. When `rate` is set the
    /// solver must also refuse uniqueness at exactly that rate.
    SolutionFamily {
        offset: f64,
        degree: usize,
        rate: Option<f64>,
        univalent: Option<bool>,
    },
    ConditionIIViolated { gap: f64 },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub problem: ProblemSpec,
    pub expected: Expected,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

pub const ENTRY_NAMES: [&str; 7] = [
    "kernel",
    "nonunique-linear",
    "nonunivalent-n",
    "prop310",
    "contract-linear",
    "forced",
    "caputo-linear-rhs",
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_config(cfg: &CorpusConfig) -> Result<(), CorpusError> {
    if !(cfg.order > 0.0 && cfg.order < 1.0) {
        return Err(CorpusError::Order(cfg.order));
    }
    if cfg.n < 2 {
        return Err(CorpusError::Degree(cfg.n));
    }
    Ok(())
}

/// The catalogue at the given order and degree.
pub fn corpus_list(cfg: &CorpusConfig) -> Result<Vec<CorpusEntry>, CorpusError> {
    ENTRY_NAMES.iter().map(|n| corpus_entry(n, cfg)).collect()
}

pub fn corpus_entry(name: &str, cfg: &CorpusConfig) -> Result<CorpusEntry, CorpusError> {
    check_config(cfg)?;
    let a = cfg.order;
    let zero = c(0.0, 0.0);
    let g2a = specfun::gamma(2.0 - a)?;
    let entry = match name {
        "kernel" => CorpusEntry {
            name: "kernel",
            description: "D^a(c z^(a-1)) = 0; the continuous solution of D^a u = 0 is 0",
            problem: ProblemSpec::new(ProblemKind::Rl, a, zero, BivariateSeries::zero()),
            expected: Expected::SolutionFamily {
                offset: a - 1.0,
                degree: 0,
                rate: None,
                univalent: None,
            },
            tolerance: 0.0,
        },
        "nonunique-linear" => CorpusEntry {
            name: "nonunique-linear",
            description: "F = t/Gamma(2-a): every c z is a fixed point, rate exactly 1",
            problem: ProblemSpec::new(
                ProblemKind::Rl,
                a,
                zero,
                BivariateSeries::from_real_terms(&[(0, 1, 1.0 / g2a)]),
            ),
            expected: Expected::SolutionFamily {
                offset: 0.0,
                degree: 1,
                rate: Some(1.0),
                univalent: Some(true),
            },
            tolerance: 1e-10,
        },
        "nonunivalent-n" => {
            let n = cfg.n as f64;
            let lam = specfun::gamma_ratio(n + 1.0, n + 1.0 - a)?;
            CorpusEntry {
                name: "nonunivalent-n",
                description: "F = Gamma(n+1)/Gamma(n+1-a) t: every c z^n is a fixed point and not univalent",
                problem: ProblemSpec::new(
                    ProblemKind::Rl,
                    a,
                    zero,
                    BivariateSeries::from_real_terms(&[(0, 1, lam)]),
                ),
                expected: Expected::SolutionFamily {
                    offset: 0.0,
                    degree: cfg.n,
                    rate: Some(lam * g2a),
                    univalent: Some(false),
                },
                tolerance: 1e-10,
            }
        }
        "prop310" => CorpusEntry {
            name: "prop310",
            description: "F = 0.5 t + 1 with b = 0 admits no analytic solution",
            problem: ProblemSpec::new(
                ProblemKind::Rl,
                a,
                zero,
                BivariateSeries::from_real_terms(&[(0, 1, 0.5), (0, 0, 1.0)]),
            ),
            expected: Expected::ConditionIIViolated { gap: 1.0 },
            tolerance: 1e-12,
        },
        "contract-linear" => CorpusEntry {
            name: "contract-linear",
            description: "F = 0.5 t: unique solution 0, contraction rate 0.5 Gamma(2-a)",
            problem: ProblemSpec::new(
                ProblemKind::Rl,
                a,
                zero,
                BivariateSeries::from_real_terms(&[(0, 1, 0.5)]),
            )
            .with_seed(AnalyticSeries::from_real(0.0, &[0.0, 1.0])),
            expected: Expected::UniqueSolution {
                solution: AnalyticSeries::zero(0.0),
                rate: 0.5 * g2a,
            },
            tolerance: 1e-10,
        },
        "forced" => CorpusEntry {
            name: "forced",
            description: "F = z: unique solution Gamma(2-a) z",
            problem: ProblemSpec::new(
                ProblemKind::Rl,
                a,
                zero,
                BivariateSeries::from_real_terms(&[(1, 0, 1.0)]),
            ),
            expected: Expected::UniqueSolution {
                solution: AnalyticSeries::from_real(0.0, &[0.0, g2a]),
                rate: 0.0,
            },
            tolerance: 1e-12,
        },
        "caputo-linear-rhs" => CorpusEntry {
            name: "caputo-linear-rhs",
            description: "regularized, b = 1, F = z: unique solution 1 + Gamma(2-a) z",
            problem: ProblemSpec::new(
                ProblemKind::Regularized,
                a,
                c(1.0, 0.0),
                BivariateSeries::from_real_terms(&[(1, 0, 1.0)]),
            ),
            expected: Expected::UniqueSolution {
                solution: AnalyticSeries::from_real(0.0, &[1.0, g2a]),
                rate: 0.0,
            },
            tolerance: 1e-12,
        },
        other => return Err(CorpusError::UnknownEntry(other.to_string())),
    };
    Ok(entry)
}

struct Outcome {
    failures: Vec<String>,
    metrics: BTreeMap<String, f64>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }
}

fn family_parameters() -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    (0..FAMILY_SAMPLES)
        .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect()
}

fn max_coeff_gap(x: &FracPowerSeries, y: &FracPowerSeries) -> f64 {
    let len = x.coeffs.len().max(y.coeffs.len());
    (0..len)
        .map(|k| (x.coeff(k) - y.coeff(k)).norm())
        .fold(0.0, f64::max)
}

fn check_family(
    entry: &CorpusEntry,
    offset: f64,
    degree: usize,
    rate: Option<f64>,
    univalent: Option<bool>,
    out: &mut Outcome,
) -> Result<(), SolveError> {
    let p = &entry.problem;
    let a = p.order;
    let params = family_parameters();
    let mut worst: f64 = 0.0;
    for &cc in &params {
        let member = FracPowerSeries::monomial(offset, degree, cc);
        if offset == 0.0 {
            // Fixed point of the Picard operator, up to rounding in the two
            // gamma ratios whose product is 1.
            let image = picard_step(&p.rhs, &member, a, p.kind, p.initial, p.trunc)?;
            let gap = max_coeff_gap(&image, &member) / cc.norm();
            worst = worst.max(gap);
        } else {
            // Kernel of D^a: the image must vanish identically.
            let image = frac_derivative_series(&member, a)?;
            out.require(image.is_zero(), || {
                format!("D^a of {cc} z^{offset} is not identically zero")
            });
        }
    }
    out.metric("family_max_rel_gap", worst);
    out.require(worst <= 8.0 * f64::EPSILON, || {
        format!("family member moved by {worst:e} under the Picard operator")
    });

    if let Some(expect_univalent) = univalent {
        let member = FracPowerSeries::monomial(offset, degree, params[0]);
        let got = univalence_check(&member, 1.0, UNIVALENCE_SAMPLES)?;
        out.metric("univalent", if got { 1.0 } else { 0.0 });
        out.require(got == expect_univalent, || {
            format!("univalence_check returned {got}, expected {expect_univalent}")
        });
    }

    let report = solve_picard(p)?;
    out.metric("rate", report.contraction.rate);
    match rate {
        Some(r) => {
            out.require((report.contraction.rate - r).abs() <= entry.tolerance, || {
                format!("measured rate {} differs from {r}", report.contraction.rate)
            });
            out.require(report.status != SolveStatus::Converged, || {
                "solver claimed a unique solution".into()
            });
        }
        None => {
            out.require(report.solution.is_zero(), || {
                "the continuous solution is not identically zero".into()
            });
        }
    }
    Ok(())
}

fn check_unique(
    entry: &CorpusEntry,
    solution: &AnalyticSeries,
    rate: f64,
    out: &mut Outcome,
) -> Result<(), SolveError> {
    let report = solve_picard(&entry.problem)?;
    let gap = max_coeff_gap(&report.solution, solution);
    out.metric("solution_gap", gap);
    out.metric("rate", report.contraction.rate);
    out.metric("iterations", report.iterations as f64);
    out.metric("residual_quad", report.residual_quad);
    out.require(report.status == SolveStatus::Converged, || {
        format!("status {:?}", report.status)
    });
    out.require(gap <= entry.tolerance, || format!("solution off by {gap:e}"));
    out.require((report.contraction.rate - rate).abs() <= 1e-10, || {
        format!("rate {} differs from {rate}", report.contraction.rate)
    });
    if let Some(&ratio) = report.observed_ratios.iter().max_by(|x, y| x.total_cmp(y)) {
        out.metric("max_observed_ratio", ratio);
    }
    Ok(())
}

/// Runs one entry and compares against its expectation.
pub fn corpus_run(name: &str, cfg: &CorpusConfig) -> Result<CorpusResult, CorpusError> {
    let entry = corpus_entry(name, cfg)?;
    Ok(run_entry(&entry))
}

pub fn run_entry(entry: &CorpusEntry) -> CorpusResult {
    let mut out = Outcome::new();
    let result = match &entry.expected {
        Expected::UniqueSolution { solution, rate } => check_unique(entry, solution, *rate, &mut out),
        Expected::SolutionFamily {
            offset,
            degree,
            rate,
            univalent,
        } => check_family(entry, *offset, *degree, *rate, *univalent, &mut out),
        Expected::ConditionIIViolated { gap } => {
            match solve_picard(&entry.problem) {
                Err(SolveError::ConditionIIViolated { gap: got }) => {
                    out.metric("gap", got);
                    out.require((got - gap).abs() <= entry.tolerance, || {
                        format!("gap {got} differs from {gap}")
                    });
                }
                Err(e) => out.failures.push(format!("unexpected error: {e}")),
                Ok(_) => out.failures.push("solver accepted the problem".into()),
            }
            Ok(())
        }
    };
    if let Err(e) = result {
        out.failures.push(format!("error: {e}"));
    }
    let passed = out.failures.is_empty();
    CorpusResult {
        name: entry.name.to_string(),
        passed,
        detail: if passed {
            entry.description.to_string()
        } else {
            out.failures.join("; ")
        },
        metrics: out.metrics,
    }
}

pub fn corpus_run_all(cfg: &CorpusConfig) -> Result<Vec<CorpusResult>, CorpusError> {
    Ok(corpus_list(cfg)?.iter().map(run_entry).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_has_every_entry() {
        let list = corpus_list(&CorpusConfig::default()).unwrap();
        assert_eq!(list.len(), 7);
        for (e, n) in list.iter().zip(ENTRY_NAMES) {
            assert_eq!(e.name, n);
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(
            corpus_run("nope", &CorpusConfig::default()),
            Err(CorpusError::UnknownEntry(_))
        ));
        assert!(corpus_list(&CorpusConfig { order: 1.0, n: 2 }).is_err());
        assert!(corpus_list(&CorpusConfig { order: 0.5, n: 1 }).is_err());
    }

    #[test]
    fn named_examples() {
        let cfg = CorpusConfig::default();
        let r = corpus_run("prop310", &cfg).unwrap();
        assert!(r.passed, "{}", r.detail);
        assert_eq!(r.metrics["gap"], 1.0);

        let r = corpus_run("forced", &cfg).unwrap();
        assert!(r.passed, "{}", r.detail);
        let entry = corpus_entry("forced", &cfg).unwrap();
        let rep = solve_picard(&entry.problem).unwrap();
        assert!((rep.solution.coeff(1).re - 0.886_226_925).abs() < 1e-9);

        let r = corpus_run("kernel", &cfg).unwrap();
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn full_corpus_across_orders_and_degrees() {
        for order in [0.25, 0.5, 0.75] {
            for n in [2, 3] {
                for r in corpus_run_all(&CorpusConfig { order, n }).unwrap() {
                    assert!(r.passed, "a={order} n={n} {}: {}", r.name, r.detail);
                }
            }
        }
    }

    #[test]
    fn wrong_expectation_fails() {
        let mut entry = corpus_entry("forced", &CorpusConfig::default()).unwrap();
        entry.expected = Expected::UniqueSolution {
            solution: AnalyticSeries::from_real(0.0, &[0.0, 0.9]),
            rate: 0.0,
        };
        assert!(!run_entry(&entry).passed);
    }
}
