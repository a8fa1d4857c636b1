//! Homogeneity-one coagulation kernels.
//!
//! The α-family `K_α(x,y) = c_α x^α y^α (x+y)^{1−2α}` interpolates between the
//! additive kernel (α = 0) and the diagonal kernel `x² δ(x−y)` (α → ∞). Two
//! normalizations of `c_α` are supported:
//!
//! * [`Normalization::SimplexUnit`]: `∫₀¹ K(x, 1−x) dx = 1`, i.e. `c_α = Γ(2+2α)/Γ(1+α)²`;
//! * [`Normalization::AUnit`]: the Burgers constant `A` equals one,
//!   `c_α = 1 / (B(α, α−1) (ψ(2α−1) − ψ(α)))`, defined for α > 1.
//!
//! The near-diagonal family `K(x,y) = (x+y) η(x/(x+y) − ½)` carries a symmetric
//! probability density η on `[−ε, ε]`.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadParams};
use crate::spectral::special::{digamma_real, ln_gamma_real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[serde(alias = "simplex")]
    SimplexUnit,
    #[serde(alias = "aunit", alias = "a")]
    AUnit,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::SimplexUnit => write!(f, "simplex"),
            Normalization::AUnit => write!(f, "a-unit"),
        }
    }
}

/// Symmetric probability density η on `[−ε, ε]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EtaDensity {
    /// Uniform density `1/(2ε)` on `[−ε, ε]`.
    Uniform,
    /// Point masses at `±s` given as `(s, weight)` for `s ≥ 0`; mirrored automatically.
    /// Weights are normalized to total mass one.
    Atoms(Vec<(f64, f64)>),
}

impl EtaDensity {
    /// `∫ η(s) f(s) ds` for the density on `[−eps, eps]`.
    pub fn average<F: FnMut(f64) -> f64>(&self, eps: f64, mut f: F, quad: &QuadParams) -> Result<f64> {
        match self {
            EtaDensity::Uniform => {
                let est = integrate(&mut f, -eps, eps, quad)?;
                Ok(est.value / (2.0 * eps))
            }
            EtaDensity::Atoms(atoms) => {
                let total: f64 = atoms.iter().map(|&(s, w)| if s == 0.0 { w } else { 2.0 * w }).sum();
                Ok(atoms
                    .iter()
                    .map(|&(s, w)| if s == 0.0 { w * f(0.0) } else { w * (f(s) + f(-s)) })
                    .sum::<f64>()
                    / total)
            }
        }
    }

    fn validate(&self, eps: f64) -> Result<()> {
        if let EtaDensity::Atoms(atoms) = self {
            if atoms.is_empty() {
                return Err(Error::Domain("near-diagonal η needs at least one atom".into()));
            }
            for &(s, w) in atoms {
                if !(0.0..=eps).contains(&s) || !(w >= 0.0) {
                    return Err(Error::Domain(format!("atom ({s}, {w}) outside [0, ε] or negative")));
                }
            }
            if atoms.iter().all(|&(_, w)| w == 0.0) {
                return Err(Error::Domain("near-diagonal η has zero mass".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelVariant {
    AlphaFamily { alpha: f64, norm: Normalization },
    Additive,
    Diagonal,
    NearDiagonal { eps: f64, eta: EtaDensity },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelClass {
    ClassI,
    ClassII,
}

/// A validated homogeneity-one kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelVariant", into = "KernelVariant")]
pub struct KernelSpec {
    variant: KernelVariant,
    ln_c: f64,
}

impl TryFrom<KernelVariant> for KernelSpec {
    type Error = Error;
    fn try_from(v: KernelVariant) -> Result<Self> {
        match v {
            KernelVariant::AlphaFamily { alpha, norm } => KernelSpec::alpha(alpha, norm),
            KernelVariant::Additive => Ok(KernelSpec::additive()),
            KernelVariant::Diagonal => Ok(KernelSpec::diagonal()),
            KernelVariant::NearDiagonal { eps, eta } => KernelSpec::near_diagonal(eps, eta),
        }
    }
}

impl From<KernelSpec> for KernelVariant {
    fn from(k: KernelSpec) -> Self {
        k.variant
    }
}

impl KernelSpec {
    /// α-family kernel. `alpha = 0` is accepted for the simplex normalization and
    /// coincides with the additive kernel.
    pub fn alpha(alpha: f64, norm: Normalization) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let c = normalization_constant(alpha, norm)?;
        Ok(Self {
            variant: KernelVariant::AlphaFamily { alpha, norm },
            ln_c: c.ln(),
        })
    }

    pub fn additive() -> Self {
        Self {
            variant: KernelVariant::Additive,
            ln_c: 0.0,
        }
    }

    pub fn diagonal() -> Self {
        Self {
            variant: KernelVariant::Diagonal,
            ln_c: 0.0,
        }
    }

    pub fn near_diagonal(eps: f64, eta: EtaDensity) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("near-diagonal width must lie in (0, 1/2), got {eps}")));
        }
        eta.validate(eps)?;
        Ok(Self {
            variant: KernelVariant::NearDiagonal { eps, eta },
            ln_c: 0.0,
        })
    }

    pub fn variant(&self) -> &KernelVariant {
        &self.variant
    }

    /// Normalization constant `c_α` (one for the additive kernel).
    pub fn c(&self) -> f64 {
        self.ln_c.exp()
    }

    pub fn alpha_value(&self) -> Option<f64> {
        match self.variant {
            KernelVariant::AlphaFamily { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn normalization(&self) -> Option<Normalization> {
        match self.variant {
            KernelVariant::AlphaFamily { norm, .. } => Some(norm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            KernelVariant::AlphaFamily { .. } => "alpha",
            KernelVariant::Additive => "additive",
            KernelVariant::Diagonal => "diagonal",
            KernelVariant::NearDiagonal { .. } => "near-diagonal",
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.variant, KernelVariant::AlphaFamily { .. } | KernelVariant::Additive)
    }

    /// Pointwise value `K(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("kernel arguments must be positive, got ({x}, {y})")));
        }
        match self.variant {
            KernelVariant::AlphaFamily { alpha, .. } => {
                let ln = self.ln_c + alpha * (x.ln() + y.ln()) + (1.0 - 2.0 * alpha) * (x + y).ln();
                Ok(ln.exp())
            }
            KernelVariant::Additive => Ok(x + y),
            KernelVariant::Diagonal => Err(Error::DistributionalKernel("diagonal")),
            KernelVariant::NearDiagonal { .. } => Err(Error::DistributionalKernel("near-diagonal")),
        }
    }

    /// `K(e^ξ, 1)` for smooth variants, evaluated without overflow.
    ///
    /// Panics on distributional variants; callers check [`KernelSpec::is_smooth`].
    pub fn eval_exp(&self, xi: f64) -> f64 {
        match self.variant {
            KernelVariant::AlphaFamily { alpha, .. } => {
                (self.ln_c + alpha * xi + (1.0 - 2.0 * alpha) * softplus(xi)).exp()
            }
            KernelVariant::Additive => xi.exp() + 1.0,
            _ => panic!("eval_exp on a distributional kernel"),
        }
    }

    pub fn classify(&self) -> KernelClass {
        match self.variant {
            KernelVariant::Additive => KernelClass::ClassII,
            KernelVariant::AlphaFamily { alpha: 0.0, .. } => KernelClass::ClassII,
            _ => KernelClass::ClassI,
        }
    }
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `c_α` for the requested normalization.
pub fn normalization_constant(alpha: f64, mode: Normalization) -> Result<f64> {
    match mode {
        Normalization::SimplexUnit => {
            if !(alpha >= 0.0) {
                return Err(Error::Domain(format!("simplex normalization needs alpha >= 0, got {alpha}")));
            }
            Ok((ln_gamma_real(2.0 + 2.0 * alpha)? - 2.0 * ln_gamma_real(1.0 + alpha)?).exp())
        }
        Normalization::AUnit => {
            if !(alpha > 1.0) {
                return Err(Error::Domain(format!(
                    "A-unit normalization needs alpha > 1 (B(alpha, alpha-1) diverges), got {alpha}"
                )));
            }
            let ln_beta = ln_gamma_real(alpha)? + ln_gamma_real(alpha - 1.0)? - ln_gamma_real(2.0 * alpha - 1.0)?;
            let dpsi = digamma_real(2.0 * alpha - 1.0)? - digamma_real(alpha)?;
            Ok((-ln_beta).exp() / dpsi)
        }
    }
}

/// Value of the Burgers-limit constant
/// `A = ∫_{−∞}^0 ∫_{ln(1−e^Y)}^∞ K(e^{Y−Z}, 1) dZ dY`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BurgersConstant {
    Finite {
        value: f64,
        /// Reported quadrature error (sum over the nested integrations).
        quad_error: f64,
        /// Analytic bound on the truncated tails.
        truncation: f64,
    },
    /// Class-II kernels: the integral is infinite.
    Divergent,
}

impl BurgersConstant {
    pub fn value(&self) -> Option<f64> {
        match *self {
            BurgersConstant::Finite { value, .. } => Some(value),
            BurgersConstant::Divergent => None,
        }
    }
}

/// Truncation points for the (Y, Z) double integrals over smooth α-kernels.
///
/// With `κ(ξ) = K(e^ξ, 1) ≤ c e^{αξ}` (α ≥ ½) for ξ < 0, the inner Z-tail beyond
/// `Z_hi` contributes at most `c e^{α(Y − Z_hi)} / α`, and the outer Y-tail below
/// `Y_lo` at most `c e^{α Y_lo} / α²`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TailPlan {
    pub alpha: f64,
    pub ln_c: f64,
    pub tail_tol: f64,
}

impl TailPlan {
    pub fn new(kernel: &KernelSpec, tail_tol: f64) -> Result<Self> {
        match kernel.variant {
            KernelVariant::AlphaFamily { alpha, .. } if alpha >= 0.5 => Ok(Self {
                alpha,
                ln_c: kernel.ln_c,
                tail_tol,
            }),
            KernelVariant::AlphaFamily { alpha, .. } => Err(Error::Domain(format!(
                "double quadrature tail control needs alpha >= 1/2, got {alpha}"
            ))),
            _ => Err(Error::Domain(format!("kernel `{}` is not a smooth class-I kernel", kernel.name()))),
        }
    }

    /// Distance `d` such that `c e^{−α d}/α ≤ tail_tol`.
    fn decay_length(&self, extra: f64) -> f64 {
        ((self.ln_c - (self.alpha * extra * self.tail_tol).ln()) / self.alpha).max(1.0)
    }

    pub fn z_hi(&self, y: f64) -> f64 {
        (y + self.decay_length(1.0)).max(1.0)
    }

    pub fn z_tail(&self, y: f64) -> f64 {
        (self.ln_c + self.alpha * (y - self.z_hi(y))).exp() / self.alpha
    }

    pub fn y_lo(&self) -> f64 {
        -self.decay_length(self.alpha)
    }

    pub fn y_tail(&self) -> f64 {
        (self.ln_c + self.alpha * self.y_lo()).exp() / (self.alpha * self.alpha)
    }
}

/// Lower inner limit `ln(1 − e^Y)` for `Y < 0`.
pub(crate) fn lower_z(y: f64) -> f64 {
    (-y.exp_m1()).ln()
}

/// Outer breakpoints for Y ∈ [Y_lo, 0], refined geometrically toward the weak
/// singularity of the inner integral at Y = 0.
pub(crate) fn outer_breaks(y_lo: f64) -> Vec<f64> {
    let mut pts = vec![y_lo];
    if y_lo < -4.0 {
        pts.push(-4.0);
    }
    for e in 0..=12 {
        let p = -(10f64).powi(-e);
        if p > y_lo {
            pts.push(p);
        }
    }
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Burgers-limit constant `A` of a kernel.
pub fn burgers_constant(kernel: &KernelSpec, quad: &QuadParams) -> Result<BurgersConstant> {
    match &kernel.variant {
        KernelVariant::Additive => Ok(BurgersConstant::Divergent),
        KernelVariant::AlphaFamily { alpha, .. } if *alpha == 0.0 => Ok(BurgersConstant::Divergent),
        KernelVariant::Diagonal => Ok(BurgersConstant::Finite {
            value: LN_2,
            quad_error: 0.0,
            truncation: 0.0,
        }),
        KernelVariant::NearDiagonal { eps, eta } => {
            // the η-measure collapses the double integral to a one-dimensional average
            let value = eta.average(*eps, near_diagonal_a_density, quad)?;
            Ok(BurgersConstant::Finite {
                value,
                quad_error: quad.abs_tol.max(quad.rel_tol * value),
                truncation: 0.0,
            })
        }
        KernelVariant::AlphaFamily { alpha, .. } if *alpha < 0.5 => {
            // (1+x)^{1−2α} grows for α < ½, so the exponential tail bound does not apply;
            // fall back to the one-dimensional representation on a mapped interval.
            let value = alpha_a_one_dimensional(kernel, quad)?;
            Ok(BurgersConstant::Finite {
                value,
                quad_error: quad.abs_tol.max(quad.rel_tol * value),
                truncation: 0.0,
            })
        }
        KernelVariant::AlphaFamily { .. } => {
            let plan = TailPlan::new(kernel, quad.abs_tol * 1e-2)?;
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
                    let z_hi = plan.z_hi(y);
                    let mut pts = vec![z_lo];
                    if y > z_lo {
                        pts.push(y);
                    }
                    if 0.0 > y {
                        pts.push(0.0);
                    }
                    pts.push(z_hi);
                    match integrate_with_breaks(|z: f64| kernel.eval_exp(y - z), &pts, &inner_quad) {
                        Ok(est) => {
                            inner_err = inner_err.max(est.error);
                            est.value
                        }
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                &outer_breaks(plan.y_lo()),
                quad,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            let value = outer.value;
            Ok(BurgersConstant::Finite {
                value,
                quad_error: outer.error + inner_err * plan.y_lo().abs(),
                truncation: plan.y_tail() + plan.z_tail(0.0) * plan.y_lo().abs(),
            })
        }
    }
}

/// `(1+x)³ ln(1+1/x)/x` at `x = (1+2s)/(1−2s)`: the Burgers-constant density in the
/// near-diagonal parameter s.
fn near_diagonal_a_density(s: f64) -> f64 {
    let x = (1.0 + 2.0 * s) / (1.0 - 2.0 * s);
    (1.0 + x).powi(3) * (1.0 / x).ln_1p() / x
}

/// `A = ∫₀^∞ K(x,1) ln(1+1/x)/x dx` with `x = t/(1−t)`.
fn alpha_a_one_dimensional(kernel: &KernelSpec, quad: &QuadParams) -> Result<f64> {
    let est = integrate(
        |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let x = t / (1.0 - t);
            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
            kernel.eval(x, 1.0).unwrap_or(0.0) * (1.0 / x).ln_1p() / x * jac
        },
        0.0,
        1.0,
        quad,
    )?;
    Ok(est.value)
}

/// Tabulated weights of the base-2 simulation scheme on `Y ∈ εZ ∩ [0, R]`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightTables {
    pub eps: f64,
    pub r: f64,
    pub y: Vec<f64>,
    /// `W_gain(Y) = K(2^{Y+1}−1, 1) / (1 − 2^{−1−Y})²`
    pub w_gain: Vec<f64>,
    /// `W_loss(Y) = K(2^{−Y}, 1) 2^Y`
    pub w_loss: Vec<f64>,
    /// `W_loss(Y + 1)`
    pub w_loss_plus_one: Vec<f64>,
    /// `W_loss(1 − Y)`
    pub w_loss_reflected: Vec<f64>,
    /// `Ŷ(Y) = log₂(2 − 2^{−Y})`
    pub y_hat: Vec<f64>,
}

impl WeightTables {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

pub fn w_gain(kernel: &KernelSpec, y: f64) -> Result<f64> {
    let x = (2f64).powf(y + 1.0) - 1.0;
    Ok(kernel.eval(x, 1.0)? / (1.0 - (2f64).powf(-1.0 - y)).powi(2))
}

pub fn w_loss(kernel: &KernelSpec, y: f64) -> Result<f64> {
    Ok(kernel.eval((2f64).powf(-y), 1.0)? * (2f64).powf(y))
}

pub fn y_hat(y: f64) -> f64 {
    (2.0 - (2f64).powf(-y)).log2()
}

/// Samples the scheme weights for a smooth kernel.
pub fn build_weight_tables(kernel: &KernelSpec, eps: f64, r: f64) -> Result<WeightTables> {
    if !(eps > 0.0) || !(r > 1.0) {
        return Err(Error::Domain(format!("weight tables need eps > 0 and R > 1, got eps={eps}, R={r}")));
    }
    if !kernel.is_smooth() {
        return Err(Error::DistributionalKernel(kernel.name()));
    }
    let n = (r / eps).round() as usize;
    let mut t = WeightTables {
        eps,
        r,
        y: Vec::with_capacity(n + 1),
        w_gain: Vec::with_capacity(n + 1),
        w_loss: Vec::with_capacity(n + 1),
        w_loss_plus_one: Vec::with_capacity(n + 1),
        w_loss_reflected: Vec::with_capacity(n + 1),
        y_hat: Vec::with_capacity(n + 1),
    };
    for m in 0..=n {
        let y = m as f64 * eps;
        t.y.push(y);
        t.w_gain.push(w_gain(kernel, y)?);
        t.w_loss.push(w_loss(kernel, y)?);
        t.w_loss_plus_one.push(w_loss(kernel, y + 1.0)?);
        t.w_loss_reflected.push(w_loss(kernel, 1.0 - y)?);
        t.y_hat.push(y_hat(y));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(a: f64) -> KernelSpec {
        KernelSpec::alpha(a, Normalization::SimplexUnit).unwrap()
    }

    #[test]
    fn alpha_zero_is_additive() {
        let k = simplex(0.0);
        assert!((k.eval(2.0, 3.0).unwrap() - 5.0).abs() < 1e-13);
        assert_eq!(k.classify(), KernelClass::ClassII);
    }

    #[test]
    fn symmetry_and_homogeneity_examples() {
        let k2 = simplex(2.0);
        assert!((k2.eval(1.0, 3.0).unwrap() - k2.eval(3.0, 1.0).unwrap()).abs() < 1e-13);
        let k8 = simplex(8.0);
        let ratio = k8.eval(2.0, 2.0).unwrap() / k8.eval(1.0, 1.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-13);
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization_constant(0.0, Normalization::SimplexUnit).unwrap() - 1.0).abs() < 1e-13);
        assert!((normalization_constant(1.0, Normalization::SimplexUnit).unwrap() - 6.0).abs() < 1e-12);
        assert!((normalization_constant(2.0, Normalization::AUnit).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(
            normalization_constant(1.0, Normalization::AUnit),
            Err(Error::Domain(_))
        ));
        assert!(KernelSpec::alpha(0.8, Normalization::AUnit).is_err());
        assert!(KernelSpec::alpha(-1.0, Normalization::SimplexUnit).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(KernelSpec::additive().classify(), KernelClass::ClassII);
        assert_eq!(simplex(2.0).classify(), KernelClass::ClassI);
        assert_eq!(KernelSpec::diagonal().classify(), KernelClass::ClassI);
        let nd = KernelSpec::near_diagonal(0.05, EtaDensity::Uniform).unwrap();
        assert_eq!(nd.classify(), KernelClass::ClassI);
    }

    #[test]
    fn distributional_kernels_refuse_pointwise_evaluation() {
        assert!(matches!(
            KernelSpec::diagonal().eval(1.0, 1.0),
            Err(Error::DistributionalKernel(_))
        ));
        let nd = KernelSpec::near_diagonal(0.1, EtaDensity::Atoms(vec![(0.05, 1.0)])).unwrap();
        assert!(matches!(nd.eval(1.0, 1.0), Err(Error::DistributionalKernel(_))));
    }

    #[test]
    fn eval_exp_matches_eval() {
        for &a in &[0.6, 2.0, 8.0, 35.0] {
            let k = simplex(a);
            for &xi in &[-30.0f64, -3.0, 0.0, 0.7, 12.0, 40.0] {
                let direct = k.eval(xi.exp(), 1.0).unwrap();
                let fast = k.eval_exp(xi);
                assert!((direct - fast).abs() <= 1e-12 * direct.max(1e-300), "a={a} xi={xi}");
            }
        }
    }

    #[test]
    fn burgers_constant_examples() {
        let q = QuadParams::new(1e-11, 1e-11);
        assert_eq!(burgers_constant(&KernelSpec::additive(), &q).unwrap(), BurgersConstant::Divergent);
        let d = burgers_constant(&KernelSpec::diagonal(), &q).unwrap().value().unwrap();
        assert!((d - LN_2).abs() < 1e-15);
        let k = KernelSpec::alpha(2.0, Normalization::AUnit).unwrap();
        let a = burgers_constant(&k, &q).unwrap().value().unwrap();
        assert!((a - 1.0).abs() < 1e-6, "A = {a}");
    }

    #[test]
    fn diagonal_constant_from_mollified_kernels() {
        // uniform η of shrinking width: A → 8 ln 2 (the δ-limit of η is 8× the diagonal kernel)
        let q = QuadParams::new(1e-13, 1e-13);
        let mut last = f64::INFINITY;
        for &e in &[0.1, 0.01, 0.001] {
            let k = KernelSpec::near_diagonal(e, EtaDensity::Uniform).unwrap();
            let a = burgers_constant(&k, &q).unwrap().value().unwrap() / 8.0;
            let gap = (a - LN_2).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn weight_table_examples() {
        let k = simplex(8.0);
        let t = build_weight_tables(&k, 0.05, 10.0).unwrap();
        assert_eq!(t.y_hat[0], 0.0);
        assert!((t.y_hat[20] - 1.5f64.ln() / LN_2).abs() < 1e-14);
        assert!((t.y_hat[20] - 0.584_963).abs() < 1e-6);
        let k11 = k.eval(1.0, 1.0).unwrap();
        assert!((t.w_gain[0] - 4.0 * k11).abs() < 1e-12 * k11);
        assert!(t.y_hat.windows(2).all(|w| w[1] > w[0]));
        assert!(t.y_hat.iter().all(|&v| v < 1.0));
        for v in t.w_gain.iter().chain(&t.w_loss).chain(&t.w_loss_plus_one).chain(&t.w_loss_reflected) {
            assert!(v.is_finite() && *v >= 0.0);
        }
        assert!(build_weight_tables(&k, 0.05, 1.0).is_err());
        assert!(build_weight_tables(&KernelSpec::diagonal(), 0.05, 5.0).is_err());
    }
}
