//! Complex log-gamma and digamma.
//!
//! Both use upward recurrence until `Re w >= SHIFT_TARGET`, then the Stirling
//! (resp. asymptotic digamma) series. The recurrence
//! `ln Γ(z) = ln Γ(z+1) − ln z` with principal logarithms keeps the result on
//! the principal branch of `ln Γ` (continuous off the negative real axis), so no
//! reflection formula is needed for `Re z < 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SHIFT_TARGET: f64 = 12.0;

// B_{2n} for n = 1..=10
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        Err(Error::Pole(z))
    } else {
        Ok(())
    }
}

/// Principal branch of `ln Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let m = 2.0 * (n as f64 + 1.0);
        series += pow * (b / (m * (m - 1.0)));
        pow *= inv2;
    }
    let stirling = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Ok(stirling - shift)
}

/// `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let m = 2.0 * (n as f64 + 1.0);
        series += pow * (b / m);
        pow *= inv2;
    }
    Ok(w.ln() - 0.5 * inv - series - shift)
}

/// Real `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma_real requires x > 0, got {x}")));
    }
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

/// Real `ψ(x)`.
pub fn digamma_real(x: f64) -> Result<f64> {
    Ok(digamma(Complex64::new(x, 0.0))?.re)
}
