//! Gauss–Jacobi quadrature for the weakly singular kernel, checked against
//! the series-exact fractional integral.

use fracpicard::fracops::FracOpsError;
use fracpicard::{frac_integral_quad, frac_integral_series, gauss_jacobi_rule, Complex64, FracPowerSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = FracPowerSeries::new(
        0.0,
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.25)],
    );
    for a in [0.25, 0.5, 0.75] {
        let rule = gauss_jacobi_rule(64, a)?;
        println!("a = {a}: 64 nodes, moment residual {:.1e}", rule.moment_residual()?);
        let exact = frac_integral_series(&u, a)?;
        for z in [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.6), Complex64::new(-0.7, -0.7)] {
            let q = frac_integral_quad(|w| u.eval(w).map_err(FracOpsError::from), a, z, &rule)?;
            let e = exact.eval(z)?;
            println!("  z = {z:>14.3}  series {e:.12}  quadrature {q:.12}  diff {:.1e}", (q - e).norm());
        }
    }
    Ok(())
}
