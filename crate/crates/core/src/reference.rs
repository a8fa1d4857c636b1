//! Closed-form comparison profiles.
//!
//! * the N-wave `N(x; M) = x/2` on `[0, 2√M]`, the long-time attractor of
//!   unit-speed Burgers dynamics;
//! * the self-similar profiles of the additive kernel in exponential variables,
//!   `G_1` in closed form and `G_ρ` (0 < ρ < 1) as a power series in `e^{βX}`,
//!   `β = ρ/(1+ρ)`.
//!
//! The `G_ρ` series is entire, but its terms first grow like `exp(β e^{X})`
//! before decaying, so in double precision it is only usable up to a moderate
//! X. Beyond that [`AdditiveProfile`] switches to the large-X expansion
//!
//! ```text
//! G_ρ(X) ~ (1+ρ)/π Σ_{n≥0} (−1)^n/n! Γ((n+1)(1+ρ)) sin((n+1)πρ) e^{−(n+1)ρX},
//! ```
//!
//! obtained from `G_ρ(X) = −(1/π) Im ∫₀^∞ exp(−s − e^{βX} e^{iπβ} s^{1−β}) ds`
//! by expanding `e^{−s}`. It is asymptotic, not convergent, and is truncated at
//! its smallest term.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadParams};
use crate::spectral::special::ln_gamma_real;

/// `N(x; M) = x/2` for `0 ≤ x ≤ 2√M`, zero elsewhere.
pub fn nwave(x: f64, mass: f64) -> f64 {
    if mass > 0.0 && (0.0..=2.0 * mass.sqrt()).contains(&x) {
        0.5 * x
    } else {
        0.0
    }
}

/// `G_1(X) = e^{X/2} e^{−e^X/2} / √(2π)`.
pub fn additive_g1(x: f64) -> f64 {
    (0.5 * x - 0.5 * x.exp()).exp() / (2.0 * PI).sqrt()
}

/// Wave speed `b = k0 (1+ρ)/ρ` of a unit-mass class-II profile with tail `e^{−ρX}`.
pub fn rho_to_b(rho: f64, k0: f64) -> Result<f64> {
    if !(rho > 0.0 && k0 > 0.0) {
        return Err(Error::Domain(format!("rho_to_b needs rho > 0 and k0 > 0, got ({rho}, {k0})")));
    }
    Ok(k0 * (1.0 + rho) / rho)
}

/// Maps samples `(x, Φ(x))` of a self-similar profile to `(X, G(X)) = (ln x, x²Φ(x))`.
pub fn selfsim_to_wave(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    samples
        .iter()
        .map(|&(x, phi)| {
            if x > 0.0 {
                Ok((x.ln(), x * x * phi))
            } else {
                Err(Error::Domain(format!("self-similar samples need x > 0, got {x}")))
            }
        })
        .collect()
}

/// Inverse of [`selfsim_to_wave`]: `(X, G) ↦ (e^X, e^{−2X} G)`.
pub fn wave_to_selfsim(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    samples.iter().map(|&(x, g)| (x.exp(), g * (-2.0 * x).exp())).collect()
}

/// Number of sign changes of `u − baseline`, ignoring values within `floor` of
/// the baseline.
pub fn oscillation_count(u: &[f64], baseline: f64, floor: f64) -> usize {
    let mut sign = 0i8;
    let mut changes = 0;
    for &v in u {
        let d = v - baseline;
        let s = if d > floor {
            1
        } else if d < -floor {
            -1
        } else {
            continue;
        };
        if sign != 0 && s != sign {
            changes += 1;
        }
        sign = s;
    }
    changes
}

/// Truncated series value with error estimates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude bound for the omitted terms.
    pub remainder: f64,
    /// Rounding error from cancellation between large terms.
    pub rounding: f64,
    pub terms: usize,
}

impl SeriesValue {
    pub fn error(&self) -> f64 {
        self.remainder + self.rounding
    }
}

/// Accepted relative error of a series evaluation.
const SERIES_REL_TOL: f64 = 1e-8;

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("G_rho series needs 0 < rho < 1, got {rho}")))
    }
}

/// `ln |k-th term|` without the sine factor.
fn ln_envelope(k: usize, beta: f64, x: f64) -> Result<f64> {
    let kf = k as f64;
    Ok(kf * beta * x + ln_gamma_real(1.0 + kf * (1.0 - beta))? - ln_gamma_real(kf + 1.0)?)
}

/// `G_ρ(X)` from the first `n_terms` terms of its power series in `e^{βX}`.
///
/// Fails with `SeriesDiverged` when the term envelope is still growing at the
/// last term or when cancellation or truncation push the error estimate above
/// `1e−8` relative.
pub fn additive_g_rho(x: f64, rho: f64, n_terms: usize) -> Result<SeriesValue> {
    check_rho(rho)?;
    if n_terms < 2 {
        return Err(Error::Domain("G_rho series needs at least two terms".into()));
    }
    let beta = rho / (1.0 + rho);
    let mut sum = 0.0f64;
    let mut max_term = 0.0f64;
    let mut prev_env = f64::INFINITY;
    let mut last_env = 0.0;
    let mut decreasing = false;
    let mut used = 0;
    for k in 1..=n_terms {
        let env = ln_envelope(k, beta, x)?.exp();
        decreasing = env < prev_env;
        if decreasing && env <= 1e-18 * sum.abs() {
            break;
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * env * (k as f64 * PI * beta).sin();
        max_term = max_term.max(env);
        prev_env = env;
        last_env = env;
        used = k;
    }
    let value = sum / PI;
    // beyond the envelope peak successive ratios keep shrinking, so a geometric
    // bound with the last ratio dominates the tail
    let next = ln_envelope(used + 1, beta, x)?.exp();
    let ratio = next / last_env;
    let remainder = if ratio < 1.0 { next / (1.0 - ratio) / PI } else { f64::INFINITY };
    let rounding = 4.0 * f64::EPSILON * max_term * used as f64 / PI;
    let out = SeriesValue {
        value,
        remainder,
        rounding,
        terms: used,
    };
    if !decreasing || !(out.error() <= SERIES_REL_TOL * value.abs()) {
        return Err(Error::SeriesDiverged {
            x,
            x_max: f64::NAN,
        });
    }
    Ok(out)
}

/// Leading behaviour `sin(πβ) Γ(1−β)/(π(1+ρ)) e^{βX}` as `X → −∞`.
pub fn g_rho_left_asymptote(x: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let beta = rho / (1.0 + rho);
    Ok((PI * beta).sin() * ln_gamma_real(1.0 - beta)?.exp() / (PI * (1.0 + rho)) * (beta * x).exp())
}

/// Leading behaviour `Γ(2+ρ) sin(πρ)/π e^{−ρX}` as `X → +∞`.
pub fn g_rho_right_asymptote(x: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(ln_gamma_real(2.0 + rho)?.exp() * (PI * rho).sin() / PI * (-rho * x).exp())
}

/// Optimally truncated large-X expansion of `G_ρ`; with `integrate` set, returns
/// the termwise integral over `[x, ∞)` instead.
fn g_rho_large_x(x: f64, rho: f64, integrate: bool) -> Result<SeriesValue> {
    check_rho(rho)?;
    let mut sum = 0.0;
    let mut prev_env = f64::INFINITY;
    let mut n = 0usize;
    loop {
        let m = (n + 1) as f64;
        let mut ln_env = (1.0 + rho).ln() - PI.ln() + ln_gamma_real(m * (1.0 + rho))? - ln_gamma_real(m)? - m * rho * x;
        if integrate {
            ln_env -= (m * rho).ln();
        }
        let env = ln_env.exp();
        if env >= prev_env || n > 400 {
            return Ok(SeriesValue {
                value: sum,
                remainder: env.min(prev_env),
                rounding: 4.0 * f64::EPSILON * sum.abs() * n as f64,
                terms: n,
            });
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * env * (m * PI * rho).sin();
        prev_env = env;
        n += 1;
    }
}

/// `G_ρ` on the whole line: power series up to `x_switch`, large-X expansion beyond.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdditiveProfile {
    pub rho: f64,
    pub n_terms: usize,
    /// Largest X (on a 1/64 grid) at which the series meets its error tolerance.
    pub x_switch: f64,
}

/// Mass of `G_ρ` split by evaluation regime.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MassBudget {
    /// Termwise-exact mass on `(−∞, x_left]`.
    pub left_tail: f64,
    /// Quadrature of the series over `[x_left, x_switch]`.
    pub window: f64,
    /// Termwise integral of the large-X expansion over `[x_switch, ∞)`.
    pub right_tail: f64,
    pub right_tail_error: f64,
    pub total: f64,
}

impl AdditiveProfile {
    pub fn new(rho: f64, n_terms: usize) -> Result<Self> {
        check_rho(rho)?;
        let ok = |x: f64| additive_g_rho(x, rho, n_terms).is_ok();
        if !ok(0.0) {
            return Err(Error::SeriesDiverged { x: 0.0, x_max: f64::NAN });
        }
        let step = 1.0 / 64.0;
        let mut x = 0.0;
        while x < 50.0 && ok(x + step) {
            x += step;
        }
        Ok(Self {
            rho,
            n_terms,
            x_switch: x,
        })
    }

    pub fn series(&self, x: f64) -> Result<SeriesValue> {
        if x > self.x_switch {
            return Err(Error::SeriesDiverged {
                x,
                x_max: self.x_switch,
            });
        }
        additive_g_rho(x, self.rho, self.n_terms).map_err(|_| Error::SeriesDiverged {
            x,
            x_max: self.x_switch,
        })
    }

    pub fn asymptotic(&self, x: f64) -> Result<SeriesValue> {
        g_rho_large_x(x, self.rho, false)
    }

    /// `G_ρ(X)` with its error estimate.
    pub fn eval(&self, x: f64) -> Result<SeriesValue> {
        if x <= self.x_switch {
            self.series(x)
        } else {
            self.asymptotic(x)
        }
    }

    /// Mass `∫ G_ρ dX`, which should equal one.
    pub fn mass(&self, quad: &QuadParams) -> Result<MassBudget> {
        let beta = self.rho / (1.0 + self.rho);
        let x_left = -20.0;
        let mut left_tail = 0.0;
        for k in 1..=self.n_terms {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            left_tail += sign * ln_envelope(k, beta, x_left)?.exp() * (kf * PI * beta).sin() / (kf * beta);
        }
        left_tail /= PI;
        let mut failure = None;
        let pts: Vec<f64> = (0..=8).map(|i| x_left + (self.x_switch - x_left) * i as f64 / 8.0).collect();
        let window = integrate_with_breaks(
            |x: f64| match self.series(x) {
                Ok(v) => v.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            &pts,
            quad,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let tail = g_rho_large_x(self.x_switch, self.rho, true)?;
        Ok(MassBudget {
            left_tail,
            window: window.value,
            right_tail: tail.value,
            right_tail_error: tail.error(),
            total: left_tail + window.value + tail.value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nwave_values_and_mass() {
        assert_eq!(nwave(1.0, 1.0), 0.5);
        assert_eq!(nwave(3.0, 1.0), 0.0);
        assert_eq!(nwave(-0.1, 1.0), 0.0);
        assert_eq!(nwave(0.5, 0.0), 0.0);
        let p = QuadParams::new(1e-13, 1e-13);
        for &m in &[0.25, 1.0, 2.25, 4.0] {
            let edge = 2.0 * f64::sqrt(m);
            let est = integrate_with_breaks(|x| nwave(x, m), &[-1.0, 0.0, edge, edge + 1.0], &p).unwrap();
            assert!((est.value - m).abs() < 1e-10);
        }
    }

    #[test]
    fn g1_values() {
        assert!((additive_g1(0.0) - 0.241_970_724_519_143).abs() < 1e-12);
        let p = QuadParams::new(1e-12, 1e-12);
        let est = integrate_with_breaks(additive_g1, &[-80.0, -10.0, 0.0, 5.0], &p).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8);
        let x = -40.0;
        assert!((additive_g1(x) * (-0.5 * x).exp() * (2.0 * PI).sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn b_of_rho() {
        assert_eq!(rho_to_b(1.0, 1.0).unwrap(), 2.0);
        assert_eq!(rho_to_b(0.5, 1.0).unwrap(), 3.0);
        assert_eq!(rho_to_b(1.0, 2.0).unwrap(), 4.0);
        assert!(rho_to_b(0.0, 1.0).is_err());
    }

    #[test]
    fn variable_maps() {
        let samples: Vec<(f64, f64)> = (1..50).map(|i| (0.37 * i as f64, 1.0 / (1.0 + i as f64))).collect();
        let back = wave_to_selfsim(&selfsim_to_wave(&samples).unwrap());
        for (a, b) in samples.iter().zip(&back) {
            assert!((a.0 - b.0).abs() <= 1e-14 * a.0 && (a.1 - b.1).abs() <= 1e-14 * a.1.abs());
        }
        // x^{−3/2} e^{−x/2}/√(2π) ↦ G_1
        for &x in &[0.01f64, 0.5, 3.0] {
            let phi = x.powf(-1.5) * (-0.5 * x).exp() / (2.0 * PI).sqrt();
            let (xx, g) = selfsim_to_wave(&[(x, phi)]).unwrap()[0];
            assert!((g - additive_g1(xx)).abs() < 1e-14);
        }
        let (x, phi) = wave_to_selfsim(&[(1.3, 1.0)])[0];
        assert!((phi - x.powi(-2)).abs() < 1e-14);
        assert!(selfsim_to_wave(&[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn oscillation_examples() {
        let ramp: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(oscillation_count(&ramp, 50.0, 1e-3), 1);
        let cos: Vec<f64> = (0..=600).map(|i| (6.0 * PI * i as f64 / 600.0).cos()).collect();
        assert_eq!(oscillation_count(&cos, 0.0, 0.1), 6);
        let g: Vec<f64> = (0..=400).map(|i| additive_g1(-10.0 + 0.05 * i as f64)).collect();
        assert_eq!(oscillation_count(&g, 0.1, 1e-6), 2);
        // small wiggles around the baseline are ignored
        let noisy: Vec<f64> = (0..100).map(|i| 1e-5 * (i as f64).sin()).collect();
        assert_eq!(oscillation_count(&noisy, 0.0, 1e-4), 0);
    }

    #[test]
    fn g_rho_first_term() {
        let (x, rho) = (-3.0, 0.5);
        let beta = rho / (1.0 + rho);
        let one = additive_g_rho(-200.0, rho, 2).unwrap().value;
        let expect = (-200.0 * beta).exp() * ln_gamma_real(2.0 - beta).unwrap().exp() * (PI * beta).sin() / PI;
        assert!((one / expect - 1.0).abs() < 1e-12);
        // left asymptote is the first term
        let lead = g_rho_left_asymptote(x, rho).unwrap();
        let first = (beta * x).exp() * ln_gamma_real(2.0 - beta).unwrap().exp() * (PI * beta).sin() / PI;
        assert!((lead / first - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g_rho_left_slope_and_prefactor() {
        for &rho in &[0.3, 0.5, 0.8] {
            let beta: f64 = rho / (1.0 + rho);
            let h = 1e-3;
            let x = -40.0;
            let g = |x| additive_g_rho(x, rho, 60).unwrap().value;
            let slope = (g(x + h).ln() - g(x - h).ln()) / (2.0 * h);
            assert!((slope / beta - 1.0).abs() < 0.02, "rho {rho}: slope {slope}");
            let ratio = g(x) / g_rho_left_asymptote(x, rho).unwrap();
            assert!((ratio - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn series_and_expansion_agree_in_overlap() {
        for &rho in &[0.3, 0.5, 0.8] {
            let prof = AdditiveProfile::new(rho, 200).unwrap();
            assert!(prof.x_switch > 3.0, "rho {rho}: switch at {}", prof.x_switch);
            let x = prof.x_switch;
            let s = prof.series(x).unwrap();
            let a = prof.asymptotic(x).unwrap();
            assert!((s.value - a.value).abs() <= 2.0 * (s.error() + a.error()) + 1e-6 * s.value.abs());
        }
    }

    #[test]
    fn g_rho_is_nonnegative() {
        for &rho in &[0.3, 0.5, 0.8] {
            let prof = AdditiveProfile::new(rho, 200).unwrap();
            for i in 0..400 {
                let x = -20.0 + 0.1 * i as f64;
                assert!(prof.eval(x).unwrap().value > 0.0);
            }
        }
    }

    #[test]
    fn g_rho_unit_mass() {
        for &rho in &[0.3, 0.5, 0.8] {
            let prof = AdditiveProfile::new(rho, 200).unwrap();
            let m = prof.mass(&QuadParams::new(1e-11, 1e-11)).unwrap();
            assert!((m.total - 1.0).abs() < 1e-5, "rho {rho}: {m:?}");
        }
    }

    #[test]
    fn g_rho_right_tail_leading_term() {
        for &rho in &[0.3, 0.5, 0.8] {
            let prof = AdditiveProfile::new(rho, 200).unwrap();
            let x = 60.0;
            let ratio = prof.eval(x).unwrap().value / g_rho_right_asymptote(x, rho).unwrap();
            assert!((ratio - 1.0).abs() < 1e-3, "rho {rho}: {ratio}");
        }
    }

    #[test]
    fn g_rho_diverged_outside_window() {
        assert!(matches!(additive_g_rho(8.0, 0.5, 60), Err(Error::SeriesDiverged { .. })));
        let prof = AdditiveProfile::new(0.5, 60).unwrap();
        assert!(matches!(prof.series(prof.x_switch + 1.0), Err(Error::SeriesDiverged { .. })));
    }
}
