//! Linear stability of the constant state and dispersion relations.
//!
//! A Fourier mode `e^{ikX}` (natural-log variable X) around the constant solution
//! grows like `e^{M(k)t}` with
//!
//! ```text
//! M(k) = −ik ∫_{−∞}^0 ∫_{ln(1−e^Y)}^∞ K(e^{Y−Z},1) (e^{ikY} + e^{ikZ}) dZ dY.
//! ```
//!
//! For the α-family under [`Normalization::AUnit`](crate::kernels::Normalization)
//! the integral has a closed form in gamma functions ([`m_alpha_closed`]); it is
//! analytic in the lower half plane apart from poles at `k = −i(α+n)` and is
//! what the stability scan and the root finder use.
//!
//! The simulator works in base-2 variables; use [`k_log2`] and
//! [`growth_rate_log2`] to convert.

pub mod special;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{lower_z, outer_breaks, EtaDensity, KernelClass, KernelSpec, TailPlan};
use crate::quadrature::{integrate_with_breaks, QuadParams};
use special::{digamma, log_gamma};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectrumSample {
    pub k: f64,
    pub m: Complex64,
    pub method: Method,
    /// Quadrature error estimate plus truncation bound (zero for the closed form).
    pub error: f64,
}

/// Wave number in base-2 variables for a natural-log wave number.
pub fn k_log2(k_nat: f64) -> f64 {
    k_nat * LN_2
}

/// Growth rate per unit of the base-2 time `T = t ln 2`.
pub fn growth_rate_log2(re_m: f64) -> f64 {
    re_m / LN_2
}

/// `e^z − 1` without cancellation for small `z`.
fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("spectral functions need alpha > 1, got {alpha}")))
    }
}

struct ClosedTerms {
    alpha: f64,
    lg_a: f64,
    lg_2a1: f64,
    lg_a1: f64,
    dpsi: f64,
}

impl ClosedTerms {
    fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let re = |x: f64| log_gamma(Complex64::new(x, 0.0)).map(|z| z.re);
        Ok(Self {
            alpha,
            lg_a: re(alpha)?,
            lg_2a1: re(2.0 * alpha - 1.0)?,
            lg_a1: re(alpha - 1.0)?,
            dpsi: digamma(Complex64::new(2.0 * alpha - 1.0, 0.0))?.re - digamma(Complex64::new(alpha, 0.0))?.re,
        })
    }

    fn eval(&self, k: Complex64, with_derivative: bool) -> Result<(Complex64, Complex64)> {
        let a = self.alpha;
        let ik = I * k;
        let g_a_ik = log_gamma(a + ik)?;
        let g_2a_ik = log_gamma(2.0 * a - 1.0 + ik)?;
        let g_a1_ik = log_gamma(a - 1.0 + ik)?;
        let g_a_mik = log_gamma(a - ik)?;

        let d1 = g_a_ik - self.lg_a + self.lg_2a1 - g_2a_ik;
        let lq = g_a1_ik + self.lg_2a1 - self.lg_a1 - g_2a_ik;
        let lp_minus_lq = g_a_mik - self.lg_a - self.lg_2a1 + g_2a_ik;
        // M = −(1 − r1)/D − (p − q)/D with r1 = e^{d1}, p = e^{lp}, q = e^{lq}
        let q = lq.exp();
        let m = (expm1(d1) - q * expm1(lp_minus_lq)) / self.dpsi;
        if !with_derivative {
            return Ok((m, Complex64::new(0.0, 0.0)));
        }
        let r1 = d1.exp();
        let p = (lq + lp_minus_lq).exp();
        let psi_a_ik = digamma(a + ik)?;
        let psi_2a_ik = digamma(2.0 * a - 1.0 + ik)?;
        let psi_a1_ik = digamma(a - 1.0 + ik)?;
        let psi_a_mik = digamma(a - ik)?;
        let dr1 = r1 * I * (psi_a_ik - psi_2a_ik);
        let dp = p * I * (psi_a1_ik - psi_a_mik);
        let dq = q * I * (psi_a1_ik - psi_2a_ik);
        Ok((m, (dr1 - dp + dq) / self.dpsi))
    }
}

/// Closed form of `M(k)` for the α-family normalized so that `A = 1`.
pub fn m_alpha_closed(alpha: f64, k: Complex64) -> Result<Complex64> {
    if k == Complex64::new(0.0, 0.0) {
        check_alpha(alpha)?;
        return Ok(k);
    }
    Ok(ClosedTerms::new(alpha)?.eval(k, false)?.0)
}

/// `M(k)` and `dM/dk` from the closed form.
pub fn m_alpha_closed_with_derivative(alpha: f64, k: Complex64) -> Result<(Complex64, Complex64)> {
    ClosedTerms::new(alpha)?.eval(k, true)
}

/// `M(k)` by nested adaptive quadrature of the defining double integral.
///
/// Works for smooth class-I α-kernels with α ≥ ½ in either normalization.
pub fn m_quadrature(kernel: &KernelSpec, k: f64, quad: &QuadParams) -> Result<SpectrumSample> {
    if !kernel.is_smooth() || kernel.classify() != KernelClass::ClassI {
        return Err(Error::Domain(format!(
            "m_quadrature needs a smooth class-I kernel, got `{}`",
            kernel.name()
        )));
    }
    let plan = TailPlan::new(kernel, quad.abs_tol * 1e-2)?;
    if k == 0.0 {
        return Ok(SpectrumSample {
            k,
            m: Complex64::new(0.0, 0.0),
            method: Method::Quadrature,
            error: 0.0,
        });
    }
    let inner_quad = QuadParams {
        abs_tol: quad.abs_tol * 1e-2,
        rel_tol: quad.rel_tol * 1e-1,
        max_evals: quad.max_evals,
    };
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let outer = integrate_with_breaks(
        |y: f64| {
            let z_lo = lower_z(y);
            let mut pts = vec![z_lo];
            if y > z_lo {
                pts.push(y);
            }
            if 0.0 > y {
                pts.push(0.0);
            }
            pts.push(plan.z_hi(y));
            let eky = Complex64::new(0.0, k * y).exp();
            let inner = integrate_with_breaks(
                |z: f64| kernel.eval_exp(y - z) * (eky + Complex64::new(0.0, k * z).exp()),
                &pts,
                &inner_quad,
            );
            match inner {
                Ok(est) => {
                    inner_err = inner_err.max(est.error);
                    est.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &outer_breaks(plan.y_lo()),
        quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = k.abs();
    let truncation = 2.0 * (plan.y_tail() + plan.z_tail(0.0) * plan.y_lo().abs());
    Ok(SpectrumSample {
        k,
        m: -I * k * outer.value,
        method: Method::Quadrature,
        error: scale * (outer.error + inner_err * plan.y_lo().abs() + truncation),
    })
}

/// Closed-form samples on a uniform grid `k = 0, dk, …, ≤ k_max`.
pub fn spectrum(alpha: f64, k_max: f64, dk: f64) -> Result<Vec<SpectrumSample>> {
    let terms = ClosedTerms::new(alpha)?;
    if !(dk > 0.0 && k_max >= 0.0) {
        return Err(Error::Domain(format!("spectrum grid needs dk > 0 and k_max >= 0, got dk={dk}, k_max={k_max}")));
    }
    let n = (k_max / dk + 1e-9).floor() as usize;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let k = i as f64 * dk;
            let m = if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                terms.eval(Complex64::new(k, 0.0), false)?.0
            };
            Ok(SpectrumSample {
                k,
                m,
                method: Method::ClosedForm,
                error: 0.0,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StabilityScan {
    pub max_re: f64,
    pub argmax_k: f64,
    /// `max |M(k)|` over the grid, a natural scale for `max_re`.
    pub scale: f64,
    pub verdict: Verdict,
}

/// Maximum of `Re M_α(k)` over `k ∈ [0, k_max]`.
///
/// The grid maximum is polished by golden-section search around each interior
/// local maximum. `M(0) = 0`, so a stable spectrum reports `max_re = 0`.
pub fn stability_scan(alpha: f64, k_max: f64, dk: f64) -> Result<StabilityScan> {
    let samples = spectrum(alpha, k_max, dk)?;
    let terms = ClosedTerms::new(alpha)?;
    let re: Vec<f64> = samples.iter().map(|s| s.m.re).collect();
    let scale = samples.iter().map(|s| s.m.norm()).fold(0.0, f64::max);

    let peaks: Vec<usize> = (1..re.len().saturating_sub(1))
        .filter(|&i| re[i] >= re[i - 1] && re[i] >= re[i + 1])
        .collect();
    let polished: Vec<(f64, f64)> = peaks
        .par_iter()
        .map(|&i| {
            let f = |k: f64| terms.eval(Complex64::new(k, 0.0), false).map(|m| m.0.re).unwrap_or(f64::NEG_INFINITY);
            golden_max(f, samples[i - 1].k, samples[i + 1].k)
        })
        .collect();

    let (mut argmax_k, mut max_re) = (0.0, 0.0);
    for (s, &r) in samples.iter().zip(&re) {
        if r > max_re {
            max_re = r;
            argmax_k = s.k;
        }
    }
    for (k, v) in polished {
        if v > max_re {
            max_re = v;
            argmax_k = k;
        }
    }
    Ok(StabilityScan {
        max_re,
        argmax_k,
        scale,
        verdict: if max_re <= 0.0 { Verdict::Stable } else { Verdict::Unstable },
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-10 * (1.0 + a.abs()) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection on the scan verdict for the stability threshold in `[lo, hi]`.
///
/// Requires `Stable` at `lo` and `Unstable` at `hi`.
pub fn stability_threshold(lo: f64, hi: f64, k_max: f64, dk: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if stability_scan(lo, k_max, dk)?.verdict != Verdict::Stable
        || stability_scan(hi, k_max, dk)?.verdict != Verdict::Unstable
    {
        return Err(Error::Domain(format!("no stability change bracketed in [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match stability_scan(mid, k_max, dk)?.verdict {
            Verdict::Stable => lo = mid,
            Verdict::Unstable => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Seed rectangle and Newton controls for [`dispersion_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RootSearch {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub dedup_radius: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        Self {
            re_min: -40.0,
            re_max: 40.0,
            im_min: -30.0,
            im_max: -1e-3,
            step: 0.5,
            max_iter: 60,
            residual_tol: 1e-9,
            dedup_radius: 1e-6,
        }
    }
}

impl RootSearch {
    fn seeds(&self) -> Vec<Complex64> {
        let nr = ((self.re_max - self.re_min) / self.step + 1e-9).floor() as usize;
        let ni = ((self.im_max - self.im_min) / self.step + 1e-9).floor() as usize;
        let mut out = Vec::with_capacity((nr + 1) * (ni + 1));
        for i in 0..=nr {
            for j in 0..=ni {
                out.push(Complex64::new(
                    self.re_min + i as f64 * self.step,
                    self.im_max - j as f64 * self.step,
                ));
            }
        }
        out
    }

    fn contains(&self, k: Complex64) -> bool {
        let slack = self.step;
        k.re >= self.re_min - slack && k.re <= self.re_max + slack && k.im >= self.im_min - slack && k.im < 0.0
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DispersionRoot {
    pub k: Complex64,
    /// `|M(k) + ik|` at the returned root.
    pub residual: f64,
    pub dominant: bool,
}

fn newton(terms: &ClosedTerms, mut k: Complex64, search: &RootSearch) -> Option<(Complex64, f64)> {
    for _ in 0..search.max_iter {
        let (m, dm) = terms.eval(k, true).ok()?;
        let f = m + I * k;
        let step = f / (dm + I);
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        k -= step;
        if !search.contains(k) {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + k.norm()) {
            break;
        }
    }
    let residual = (terms.eval(k, false).ok()?.0 + I * k).norm();
    // k = 0 solves M(k) + ik = 0 trivially; it is not a decaying mode
    (residual <= search.residual_tol && k.im < -1e-8).then_some((k, residual))
}

/// Roots of `M_α(k) + ik = 0` with `Im k < 0`, found by Newton iteration from a
/// grid of seeds and sorted by decreasing imaginary part.
///
/// Roots come in mirror pairs `k, −k̄`; the dominant root is the one with the
/// largest imaginary part, taking `Re k ≥ 0` within a pair.
pub fn dispersion_roots(alpha: f64, search: &RootSearch) -> Result<Vec<DispersionRoot>> {
    let terms = ClosedTerms::new(alpha)?;
    let seeds = search.seeds();
    let found: Vec<(Complex64, f64)> = seeds.par_iter().filter_map(|&s| newton(&terms, s, search)).collect();

    let mut roots: Vec<DispersionRoot> = Vec::new();
    for (k, residual) in found {
        if !roots.iter().any(|r| (r.k - k).norm() <= search.dedup_radius) {
            roots.push(DispersionRoot {
                k,
                residual,
                dominant: false,
            });
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRootFound { seeds: seeds.len() });
    }
    let tie = 1e-9;
    roots.sort_by(|a, b| {
        if (a.k.im - b.k.im).abs() <= tie {
            b.k.re.total_cmp(&a.k.re)
        } else {
            b.k.im.total_cmp(&a.k.im)
        }
    });
    roots[0].dominant = true;
    Ok(roots)
}

/// Dominant dispersion root.
pub fn dominant_root(alpha: f64, search: &RootSearch) -> Result<DispersionRoot> {
    Ok(dispersion_roots(alpha, search)?[0])
}

/// Whether the dominant root is off the imaginary axis (oscillatory wave tail).
pub fn is_oscillatory(root: &DispersionRoot) -> bool {
    root.k.re.abs() >= 1e-6
}

/// Bisection on the dominant-root type for the oscillation threshold in `[lo, hi]`.
///
/// Requires an oscillatory dominant root at `lo` and a monotone one at `hi`.
pub fn oscillation_threshold(lo: f64, hi: f64, search: &RootSearch, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if !is_oscillatory(&dominant_root(lo, search)?) || is_oscillatory(&dominant_root(hi, search)?) {
        return Err(Error::Domain(format!("no oscillation change bracketed in [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_oscillatory(&dominant_root(mid, search)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Contribution of the near-diagonal slice at `s` to the growth rate:
///
/// `W(k,s) = 8/((1−2s)²(1+2s)) · (1 + ((1−2s)/(1+2s))^{ik} − ((1+2s)/2)^{ik} − ((1−2s)/2)^{ik})`.
pub fn near_diagonal_w(k: f64, s: f64) -> Result<Complex64> {
    if !(s.abs() < 0.5) {
        return Err(Error::Domain(format!("near_diagonal_w needs |s| < 1/2, got {s}")));
    }
    let (a, b) = (1.0 - 2.0 * s, 1.0 + 2.0 * s);
    let pow = |base: f64| Complex64::new(0.0, k * base.ln()).exp();
    let bracket = 1.0 + pow(a / b) - pow(b / 2.0) - pow(a / 2.0);
    Ok(bracket * (8.0 / (a * a * b)))
}

/// `M(k) = −∫ η(s) W(k,s) ds` for the near-diagonal family.
pub fn near_diagonal_m(k: f64, eps: f64, eta: &EtaDensity, quad: &QuadParams) -> Result<Complex64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("near-diagonal width must lie in (0, 1/2), got {eps}")));
    }
    let w = |s: f64| near_diagonal_w(k, s).unwrap_or_default();
    let re = eta.average(eps, |s| w(s).re, quad)?;
    let im = eta.average(eps, |s| w(s).im, quad)?;
    Ok(-Complex64::new(re, im))
}

/// `k₁ = 2π/ln 2`, the first wave number that is invisible on the diagonal lattice.
pub const K1: f64 = 2.0 * PI / LN_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Normalization;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent one-dimensional form
    /// `M(k) = −∫ K(e^ξ,1)(1 + e^{−ikξ})(1 − (1+e^{−ξ})^{−ik}) dξ`.
    fn m_one_dimensional(kernel: &KernelSpec, k: f64) -> Complex64 {
        let p = QuadParams::new(1e-13, 1e-12);
        let f = |xi: f64| {
            let a = 1.0 + Complex64::new(0.0, -k * xi).exp();
            let b = 1.0 - Complex64::new(0.0, -k * crate::kernels::softplus(-xi)).exp();
            kernel.eval_exp(xi) * a * b
        };
        let pts: Vec<f64> = (-60..=60).map(|i| i as f64).collect();
        -integrate_with_breaks(f, &pts, &p).unwrap().value
    }

    #[test]
    fn closed_form_matches_one_dimensional_oracle() {
        for &alpha in &[2.0, 8.0, 35.0] {
            let kern = KernelSpec::alpha(alpha, Normalization::AUnit).unwrap();
            for &k in &[0.3, 0.7, 5.0, -11.0, 19.5] {
                let closed = m_alpha_closed(alpha, c(k, 0.0)).unwrap();
                let oracle = m_one_dimensional(&kern, k);
                assert!((closed - oracle).norm() <= 1e-8 * oracle.norm(), "α={alpha} k={k}: {closed} vs {oracle}");
            }
        }
    }

    #[test]
    fn zero_and_hermitian() {
        assert_eq!(m_alpha_closed(8.0, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        for &alpha in &[2.0, 8.0, 35.0] {
            for i in 1..20 {
                let k = 0.37 * i as f64;
                let a = m_alpha_closed(alpha, c(-k, 0.0)).unwrap();
                let b = m_alpha_closed(alpha, c(k, 0.0)).unwrap().conj();
                assert!((a - b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(alpha, k) in &[(3.0, c(1.4, -1.2)), (20.0, c(0.2, -3.7)), (8.0, c(5.0, 0.0))] {
            let (_, d) = m_alpha_closed_with_derivative(alpha, k).unwrap();
            let h = 1e-6;
            let fd = (m_alpha_closed(alpha, k + h).unwrap() - m_alpha_closed(alpha, k - h).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() <= 1e-6 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn small_k_is_quadratic_decay() {
        // Re M ≈ −a k² near the origin with no roundoff sign flips
        for &alpha in &[3.0, 20.0] {
            for &k in &[1e-4, 1e-3, 1e-2] {
                assert!(m_alpha_closed(alpha, c(k, 0.0)).unwrap().re < 0.0);
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let kern = KernelSpec::alpha(8.0, Normalization::AUnit).unwrap();
        let p = QuadParams::new(1e-10, 1e-10);
        let q = m_quadrature(&kern, 5.0, &p).unwrap();
        let closed = m_alpha_closed(8.0, c(5.0, 0.0)).unwrap();
        assert!((q.m - closed).norm() <= 1e-6 * closed.norm());
        let qm = m_quadrature(&kern, -5.0, &p).unwrap();
        assert!((qm.m - q.m.conj()).norm() <= 1e-9 * q.m.norm());
        assert_eq!(m_quadrature(&kern, 0.0, &p).unwrap().m, c(0.0, 0.0));
    }

    #[test]
    fn quadrature_rejects_class_two() {
        let p = QuadParams::default();
        assert!(m_quadrature(&KernelSpec::additive(), 1.0, &p).is_err());
        assert!(m_quadrature(&KernelSpec::diagonal(), 1.0, &p).is_err());
    }

    #[test]
    fn scan_verdicts() {
        assert_eq!(stability_scan(3.0, 40.0, 0.01).unwrap().verdict, Verdict::Stable);
        let s60 = stability_scan(60.0, 40.0, 0.01).unwrap();
        assert_eq!(s60.verdict, Verdict::Unstable);
        assert!(s60.argmax_k > 1.0);
        let s35 = stability_scan(35.0, 40.0, 0.01).unwrap();
        assert!(s35.max_re.abs() < 0.02 * s35.scale);
    }

    #[test]
    fn roots_satisfy_dispersion_relation() {
        let roots = dispersion_roots(3.0, &RootSearch::default()).unwrap();
        assert!(roots[0].dominant && roots.iter().filter(|r| r.dominant).count() == 1);
        for r in &roots {
            let res = (m_alpha_closed(3.0, r.k).unwrap() + I * r.k).norm();
            assert!(res <= 1e-9 && r.k.im < 0.0);
        }
        // mirror pairs k, −k̄
        for r in &roots {
            let mirror = c(-r.k.re, r.k.im);
            assert!(roots.iter().any(|s| (s.k - mirror).norm() < 1e-6));
        }
        assert!(roots[0].k.re >= 0.0);
    }

    #[test]
    fn w_vanishes_at_k1_on_the_diagonal() {
        assert!(near_diagonal_w(K1, 0.0).unwrap().norm() < 1e-12);
        assert!(near_diagonal_w(1.0, 0.5).is_err());
    }

    #[test]
    fn w_taylor_coefficient() {
        let s = 0.005;
        let w = near_diagonal_w(K1, s).unwrap();
        let expect = -32.0 * (K1 * s).powi(2);
        assert!((w.re / expect - 1.0).abs() < 0.05);
    }

    #[test]
    fn near_diagonal_growth() {
        let m = near_diagonal_m(K1, 0.05, &EtaDensity::Uniform, &QuadParams::default()).unwrap();
        assert!(m.re > 0.0);
    }

    #[test]
    fn unit_conversions() {
        assert!((k_log2(K1) - 2.0 * PI).abs() < 1e-14);
        assert!((growth_rate_log2(LN_2) - 1.0).abs() < 1e-15);
    }
}
