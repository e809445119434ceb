//! Without contraction the solve radius comes from the growth envelope
//! |F(z, t)| <= c|t|^n0 + |g(z)|, and the iteration checks that its
//! iterates stay in the unit ball on that disc.

use fracpicard::series::FracPowerSeries;
use fracpicard::solver::{estimate_radius, GrowthEnvelope};
use fracpicard::{solve_picard, BivariateSeries, Complex64, ProblemKind, ProblemSpec};

fn report(label: &str, p: &ProblemSpec) {
    match solve_picard(p) {
        Ok(rep) => {
            println!(
                "{label}: rate {:.4}, radius {:.6} from {:?}, status {:?} after {} iterations",
                rep.contraction.rate, rep.radius, rep.radius_source, rep.status, rep.iterations
            );
            if let Some(g) = rep.conditions.growth {
                println!("  envelope holds on the sample grid: {} (margin {:.2e})", g.passed, g.worst_margin);
            }
            println!(
                "  iterates stayed in the unit ball: {:?}, quadrature residual {:.1e}",
                rep.conditions.invariant_ball_verified, rep.residual_quad
            );
        }
        Err(e) => println!("{label}: {e}"),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let env = GrowthEnvelope::new(4.0, 1, FracPowerSeries::zero(0.0), Some(0.0))?;
    println!("c = 4, n0 = 1, Mg = 0: R = {:.12}", estimate_radius(&env, 1.0, 0.5)?);

    // F = t^2 + 0.2 z: Lipschitz rate above 1 on the unit ball
    let zero = Complex64::new(0.0, 0.0);
    let rhs = BivariateSeries::from_real_terms(&[(0, 2, 1.0), (1, 0, 0.2)]);
    report("F = t^2 + 0.2 z, automatic envelope", &ProblemSpec::new(ProblemKind::Rl, 0.5, zero, rhs.clone()));

    let g = FracPowerSeries::from_real(0.0, &[0.0, 0.2]);
    let env = GrowthEnvelope::new(1.0, 2, g, None)?;
    report(
        "F = t^2 + 0.2 z, envelope |t|^2 + |0.2 z|",
        &ProblemSpec::new(ProblemKind::Rl, 0.5, zero, rhs).with_envelope(env),
    );

    // A radius from the envelope guarantees existence, not convergence of
    // the iteration: here the iterates leave the ball and grow.
    let rhs = BivariateSeries::from_real_terms(&[(0, 2, 2.0), (0, 1, 0.8), (1, 0, 0.3)]);
    report("F = 2 t^2 + 0.8 t + 0.3 z", &ProblemSpec::new(ProblemKind::Rl, 0.5, zero, rhs));
    Ok(())
}
