//! At the threshold rate 1 every c z is a fixed point; above it, c z^n
//! families appear and their members are not univalent.

use fracpicard::solver::{picard_step, univalence_check};
use fracpicard::specfun::{gamma, gamma_ratio};
use fracpicard::{solve_picard, AnalyticSeries, BivariateSeries, Complex64, ProblemKind, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 0.5;
    let zero = Complex64::new(0.0, 0.0);
    let c = Complex64::new(0.7, -1.2);

    let f = BivariateSeries::from_real_terms(&[(0, 1, 1.0 / gamma(2.0 - a)?)]);
    let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, a, zero, f.clone()))?;
    let member = AnalyticSeries::monomial(0.0, 1, c);
    let image = picard_step(&f, &member, a, ProblemKind::Rl, zero, 64)?;
    println!("F = t/Gamma(2-a): rate {:.12}, status {:?}", rep.contraction.rate, rep.status);
    println!("  P(c z) - c z = {:.1e}", (image.coeff(1) - c).norm());

    for n in [2usize, 3] {
        let lam = gamma_ratio(n as f64 + 1.0, n as f64 + 1.0 - a)?;
        let f = BivariateSeries::from_real_terms(&[(0, 1, lam)]);
        let member = AnalyticSeries::monomial(0.0, n, c);
        let image = picard_step(&f, &member, a, ProblemKind::Rl, zero, 64)?;
        let rep = solve_picard(&ProblemSpec::new(ProblemKind::Rl, a, zero, f))?;
        println!(
            "n = {n}: rate {:.6}, P(c z^n) - c z^n = {:.1e}, univalent: {}",
            rep.contraction.rate,
            (image.coeff(n) - c).norm(),
            univalence_check(&member, 1.0, 64)?
        );
    }
    Ok(())
}
