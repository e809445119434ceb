//! Riemann–Liouville and Caputo problems on [0, 1] through the complex
//! solver. Prints the residuals and an x,u table.

use fracpicard::realline::solve_real;
use fracpicard::{BivariateSeries, Complex64, ProblemKind, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // f(x, y) = x^0.5 - 0.4 x^-0.5 y, written as F = x^0.5 f = x - 0.4 y
    let rhs = BivariateSeries::from_real_terms(&[(1, 0, 1.0), (0, 1, -0.4)]);
    let rl = solve_real(&ProblemSpec::new(ProblemKind::RealRl, 0.5, Complex64::new(0.0, 0.0), rhs.clone()), 11)?;
    println!("RL: residual {:.1e}, max |Im u| {:.1e}", rl.residual, rl.max_imag);

    // Caputo with u(0) = 1: F(0, 1) must vanish, so use F = x - 0.4 (y - 1)
    let rhs = rhs.add_constant(Complex64::new(0.4, 0.0));
    let cap = solve_real(&ProblemSpec::new(ProblemKind::RealCaputo, 0.5, Complex64::new(1.0, 0.0), rhs), 11)?;
    println!("Caputo: residual {:.1e}", cap.residual);
    print!("{}", cap.to_csv());
    Ok(())
}
