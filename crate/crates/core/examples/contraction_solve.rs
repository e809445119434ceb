//! Unique solution under contraction: F(z, t) = 0.5 t + z at a = 0.5.
//! Prints the iteration table and the diagnostics.

use fracpicard::{solve_picard, BivariateSeries, Complex64, ProblemKind, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rhs = BivariateSeries::from_real_terms(&[(0, 1, 0.5), (1, 0, 1.0)]);
    let p = ProblemSpec::new(ProblemKind::Rl, 0.5, Complex64::new(0.0, 0.0), rhs);
    let rep = solve_picard(&p)?;

    println!("status {:?} after {} iterations", rep.status, rep.iterations);
    println!(
        "Lipschitz constant {:.6}, rate {:.9} (threshold {:.6})",
        rep.contraction.kappa, rep.contraction.rate, rep.contraction.threshold
    );
    println!("residuals: series {:.1e}, quadrature {:.1e}", rep.residual_series, rep.residual_quad);
    for k in 0..4 {
        println!("u_{k} = {:.12}", rep.solution.coeff(k));
    }
    print!("{}", rep.convergence_csv());
    Ok(())
}
