//! Compatibility at z = 0 decides whether an analytic solution can exist.

use fracpicard::conditions::{check_condition_ii, check_regularized_compat};
use fracpicard::specfun::recip_gamma;
use fracpicard::{check_problem, solve_picard, BivariateSeries, Complex64, ProblemKind, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zero = Complex64::new(0.0, 0.0);
    let a = 0.5;

    let bad = BivariateSeries::from_real_terms(&[(0, 1, 0.5), (0, 0, 1.0)]);
    println!("F = 0.5 t + 1, b = 0: {:?}", check_condition_ii(&bad, zero, a));
    match solve_picard(&ProblemSpec::new(ProblemKind::Rl, a, zero, bad)) {
        Err(e) => println!("  solver refuses: {e}"),
        Ok(_) => println!("  solver accepted the problem"),
    }

    let b = Complex64::new(2.0, 0.0);
    let good = BivariateSeries::from_real_terms(&[(0, 0, 2.0 * recip_gamma(1.0 - a)), (1, 0, 1.0)]);
    println!("F = 2/Gamma(0.5) + z, b = 2: {:?}", check_condition_ii(&good, b, a));
    let chk = check_problem(&ProblemSpec::new(ProblemKind::Rl, a, b, good))?;
    println!("  radius {} from {:?}, rate {:.3}", chk.radius, chk.radius_source, chk.conditions.lipschitz.rate);

    let f = BivariateSeries::from_real_terms(&[(0, 1, 1.0)]);
    println!("regularized, F = t, b = 1: {:?}", check_regularized_compat(&f, Complex64::new(1.0, 0.0)));
    Ok(())
}
