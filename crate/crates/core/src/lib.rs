//! Complex fractional differential equations D^a u = f(z, u) on the unit
//! disc, solved by Picard iteration on the equivalent Volterra integral
//! equation, with real-line Riemann–Liouville and Caputo projections.
//!
//! Series live in [`series`], the fractional operators and their quadrature
//! oracle in [`fracops`], the iteration in [`solver`], hypothesis checks in
//! [`conditions`], the real-line bridge in [`realline`] and the catalogue of
//! closed-form examples in [`corpus`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
pub mod corpus;
pub mod fracops;
pub mod io;
pub mod realline;
pub mod series;
pub mod solver;
pub mod specfun;

pub use num_complex::Complex64;

pub use fracops::{frac_derivative_series, frac_integral_quad, frac_integral_series, gauss_jacobi_rule, JacobiRule};
pub use series::{AnalyticSeries, BivariateSeries, FracPowerSeries};
pub use solver::{
    check_problem, solve_picard, ProblemKind, ProblemSpec, SolveError, SolveReport, SolveStatus,
};
