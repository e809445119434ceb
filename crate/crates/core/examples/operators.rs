//! Series-exact fractional integral and derivative, their inverse relations
//! and the kernel of D^a.

use fracpicard::{frac_derivative_series, frac_integral_series, Complex64, FracPowerSeries};

fn show(label: &str, s: &FracPowerSeries) {
    let terms: Vec<String> = s
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| format!("({:.6}{:+.6}i) z^{}", c.re, c.im, k as f64 + s.mu))
        .collect();
    println!("{label:<24} {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") });
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 0.5;
    let u = FracPowerSeries::from_real(0.0, &[1.0, 0.0, 2.0]);
    show("u", &u);

    let iu = frac_integral_series(&u, a)?;
    show("I^0.5 u", &iu);
    show("D^0.5 I^0.5 u", &frac_derivative_series(&iu, a)?);

    let du = frac_derivative_series(&u, a)?;
    show("D^0.5 u", &du);
    show("I^0.5 D^0.5 u", &frac_integral_series(&du, a)?);

    let semi = frac_integral_series(&frac_integral_series(&u, 0.3)?, 0.2)?;
    show("I^0.2 I^0.3 u", &semi);
    show("I^0.5 u", &iu);

    let kernel = FracPowerSeries::monomial(a - 1.0, 0, Complex64::new(1.5, -0.5));
    show("c z^(a-1)", &kernel);
    show("D^0.5 c z^(a-1)", &frac_derivative_series(&kernel, a)?);
    Ok(())
}
