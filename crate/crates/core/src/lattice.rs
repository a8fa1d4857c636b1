//! The diagonal-kernel lattice `du_j/dt = u_{j−1}² − u_j²`.
//!
//! With the diagonal kernel only equal sizes merge, and in base-2 exponential
//! variables the coagulation equation reduces to this upwind Burgers lattice on
//! each fiber `θ + Z`. Sites left of the window hold the constant `c`.
//!
//! The integrator is Dormand–Prince 5(4) on the whole window. The window grows
//! to the right as mass moves out.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reference::nwave;

/// Values `u_j` on `j_min ..= j_max`, left boundary constant and time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub j_min: i64,
    pub u: Vec<f64>,
    /// Value of `u_j` for `j < j_min`.
    pub c: f64,
    pub t: f64,
}

const PARALLEL_MIN: usize = 1 << 14;
const WINDOW_THRESHOLD: f64 = 1e-14;

impl LatticeState {
    pub fn new(j_min: i64, u: Vec<f64>, c: f64) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Domain("lattice window must contain at least one site".into()));
        }
        if !(c >= 0.0) || u.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Domain("lattice data must be nonnegative".into()));
        }
        Ok(Self { j_min, u, c, t: 0.0 })
    }

    /// `u_j = mass/width` for `0 ≤ j < width`, zero elsewhere, `c = 0`.
    pub fn box_data(mass: f64, width: usize) -> Result<Self> {
        if width == 0 || !(mass >= 0.0) {
            return Err(Error::Domain(format!("box data needs width > 0 and mass >= 0, got ({mass}, {width})")));
        }
        let mut u = vec![0.0; width + 16];
        for v in &mut u[2..2 + width] {
            *v = mass / width as f64;
        }
        Self::new(-2, u, 0.0)
    }

    /// `u_j = c_left` for `j < 0`, zero for `j ≥ 0`.
    pub fn riemann(c_left: f64) -> Result<Self> {
        let left = 16usize;
        let mut u = vec![0.0; left + 32];
        for v in &mut u[..left] {
            *v = c_left;
        }
        Self::new(-(left as i64), u, c_left)
    }

    pub fn j_max(&self) -> i64 {
        self.j_min + self.u.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> f64 {
        if j < self.j_min {
            self.c
        } else {
            self.u.get((j - self.j_min) as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.u.iter().enumerate().map(move |(i, &v)| (self.j_min + i as i64, v))
    }

    /// `Σ_j u_j` over the window.
    pub fn mass(&self) -> f64 {
        self.u.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(self.c, f64::max)
    }

    /// `sup_j (u_{j+1} − u_j)`, including the step from the boundary constant.
    pub fn max_upward_jump(&self) -> f64 {
        let mut prev = self.c;
        let mut best = f64::NEG_INFINITY;
        for &v in &self.u {
            best = best.max(v - prev);
            prev = v;
        }
        best
    }

    fn last_occupied(&self) -> Option<usize> {
        self.u.iter().rposition(|&v| v > WINDOW_THRESHOLD)
    }
}

fn rhs(u: &[f64], c: f64, out: &mut [f64]) {
    let f = |i: usize, v: f64| {
        let prev = if i == 0 { c } else { u[i - 1] };
        prev * prev - v * v
    };
    if u.len() >= PARALLEL_MIN {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i, u[i]));
    } else {
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i, u[i]);
        }
    }
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step statistics of one integration.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Smallest value seen at an accepted step.
    pub min_value: f64,
}

/// Adaptive integrator carrying its step size and window margin between calls.
#[derive(Clone, Debug)]
pub struct LatticeIntegrator {
    pub state: LatticeState,
    pub tol: f64,
    /// Upper bound on the number of sites before `WindowTooSmall` is raised.
    pub max_sites: usize,
    pub stats: StepStats,
    h: f64,
    margin: usize,
    k: Vec<Vec<f64>>,
    scratch: Vec<f64>,
}

impl LatticeIntegrator {
    pub fn new(state: LatticeState, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("integrator tolerance must be positive, got {tol}")));
        }
        let margin = match state.last_occupied() {
            Some(i) => (state.u.len() - 1 - i).max(16),
            None => 16,
        };
        let h = 0.05 / (1.0 + state.max());
        Ok(Self {
            stats: StepStats {
                min_value: state.u.iter().copied().fold(f64::INFINITY, f64::min),
                ..StepStats::default()
            },
            state,
            tol,
            max_sites: 50_000_000,
            h,
            margin,
            k: Vec::new(),
            scratch: Vec::new(),
        })
    }

    fn ensure_window(&mut self) -> Result<()> {
        let n = self.state.u.len();
        let probe = n.saturating_sub(5);
        if self.state.u[probe..].iter().any(|&v| v > WINDOW_THRESHOLD) {
            self.margin *= 2;
            let last = self.state.last_occupied().unwrap_or(n - 1);
            let target = last + 1 + self.margin;
            if target > self.max_sites {
                return Err(Error::WindowTooSmall {
                    site: self.state.j_min + last as i64,
                    limit: self.state.j_min + self.max_sites as i64 - 1,
                });
            }
            if target > n {
                self.state.u.resize(target, 0.0);
            }
        }
        Ok(())
    }

    /// One attempted step of size `h`; returns the error norm (max over sites).
    fn try_step(&mut self, h: f64, out: &mut Vec<f64>) -> f64 {
        let n = self.state.u.len();
        let c = self.state.c;
        if self.k.len() != 7 || self.k[0].len() != n {
            self.k = vec![vec![0.0; n]; 7];
            self.scratch = vec![0.0; n];
        }
        let u = &self.state.u;
        rhs(u, c, &mut self.k[0]);
        for s in 0..6 {
            let (done, rest) = self.k.split_at_mut(s + 1);
            for i in 0..n {
                let mut acc = u[i];
                for (r, kr) in done.iter().enumerate() {
                    acc += h * A[s][r] * kr[i];
                }
                self.scratch[i] = acc;
            }
            rhs(&self.scratch, c, &mut rest[0]);
        }
        // the sixth stage input is the fifth-order solution (FSAL)
        out.clear();
        out.extend_from_slice(&self.scratch);
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = 0.0;
            for (s, ks) in self.k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            err = err.max((h * e).abs());
        }
        err
    }

    /// Integrates to `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if t_end < self.state.t {
            return Err(Error::Domain(format!("t_end = {t_end} lies before t = {}", self.state.t)));
        }
        let mut next = Vec::new();
        while self.state.t < t_end {
            self.ensure_window()?;
            let remaining = t_end - self.state.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let err = self.try_step(h, &mut next);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * (self.tol / err).powf(0.2)).clamp(0.2, 5.0)
            };
            if err <= self.tol {
                let min = next.iter().copied().fold(f64::INFINITY, f64::min);
                if min < -10.0 * self.tol {
                    let i = next.iter().position(|&v| v == min).unwrap_or(0);
                    return Err(Error::NegativeValue {
                        site: self.state.j_min + i as i64,
                        value: min,
                        time: self.state.t + h,
                    });
                }
                std::mem::swap(&mut self.state.u, &mut next);
                self.state.t = if last { t_end } else { self.state.t + h };
                self.stats.accepted += 1;
                self.stats.min_value = self.stats.min_value.min(min);
                if !last {
                    self.h = h * factor;
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * factor;
            }
        }
        Ok(())
    }
}

/// Advances `s` to `t_end` with local error per step at most `tol`.
pub fn lattice_integrate(s: LatticeState, t_end: f64, tol: f64) -> Result<LatticeState> {
    let mut integ = LatticeIntegrator::new(s, tol)?;
    integ.advance_to(t_end)?;
    Ok(integ.state)
}

/// `max_j (u_{j+1} − u_j)_+ − 1/(1/w0 + t)`; nonpositive along exact trajectories.
pub fn entropy_gap(s: &LatticeState, w0: f64) -> f64 {
    s.max_upward_jump().max(0.0) - 1.0 / (1.0 / w0 + s.t)
}

/// `√t · max_j u_j`.
pub fn decay_ratio(s: &LatticeState) -> f64 {
    s.t.sqrt() * s.u.iter().copied().fold(0.0, f64::max)
}

/// `Σ_j |u_j − N(j/√t; M)/√t|`.
pub fn nwave_error(s: &LatticeState, mass: f64) -> f64 {
    let rt = s.t.sqrt();
    let mut err: f64 = s.sites().map(|(j, v)| (v - nwave(j as f64 / rt, mass) / rt).abs()).sum();
    // N-wave support past the window edge
    let edge = (2.0 * mass.sqrt() * rt).floor() as i64;
    for j in s.j_max() + 1..=edge {
        err += nwave(j as f64 / rt, mass) / rt;
    }
    err
}

/// Rightmost position where `u` crosses `level` from above, linearly interpolated.
pub fn front_crossing(s: &LatticeState, level: f64) -> Result<f64> {
    let mut prev = (s.j_min - 1, s.c);
    let mut found = None;
    for (j, v) in s.sites() {
        if prev.1 >= level && v < level {
            let frac = (prev.1 - level) / (prev.1 - v);
            found = Some(prev.0 as f64 + frac);
        }
        prev = (j, v);
    }
    found.ok_or(Error::FrontNotFound { level })
}

/// Speed of the Riemann front between `t1` and `t2`.
pub fn riemann_front_speed(c_left: f64, t1: f64, t2: f64, tol: f64) -> Result<f64> {
    if !(c_left > 0.0) {
        return Err(Error::FrontNotFound { level: 0.5 * c_left });
    }
    if !(0.0 < t1 && t1 < t2) {
        return Err(Error::Domain(format!("need 0 < t1 < t2, got ({t1}, {t2})")));
    }
    let mut integ = LatticeIntegrator::new(LatticeState::riemann(c_left)?, tol)?;
    integ.advance_to(t1)?;
    let x1 = front_crossing(&integ.state, 0.5 * c_left)?;
    integ.advance_to(t2)?;
    let x2 = front_crossing(&integ.state, 0.5 * c_left)?;
    Ok((x2 - x1) / (t2 - t1))
}

/// Mass per fiber, `θ ↦ M(θ)`, periodic with period one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FiberMassProfile {
    Constant { mass: f64 },
    /// `mean + amplitude · sin(2πθ)`.
    Sinusoid { mean: f64, amplitude: f64 },
    /// Values at `θ = i/n`, linearly interpolated.
    Sampled { values: Vec<f64> },
}

impl FiberMassProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            FiberMassProfile::Constant { mass } => *mass >= 0.0,
            FiberMassProfile::Sinusoid { mean, amplitude } => amplitude.abs() <= *mean,
            FiberMassProfile::Sampled { values } => !values.is_empty() && values.iter().all(|v| *v >= 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("fiber mass profile must be nonnegative: {self:?}")))
        }
    }

    /// `M(θ)` for any real θ.
    pub fn mass(&self, theta: f64) -> f64 {
        let th = theta - theta.floor();
        match self {
            FiberMassProfile::Constant { mass } => *mass,
            FiberMassProfile::Sinusoid { mean, amplitude } => mean + amplitude * (2.0 * std::f64::consts::PI * th).sin(),
            FiberMassProfile::Sampled { values } => {
                let n = values.len();
                let pos = th * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                let w = pos - i as f64;
                (1.0 - w) * values[i] + w * values[(i + 1) % n]
            }
        }
    }
}

/// Superposition of per-fiber N-waves, `N(X/√t; M(frac X))/√t`.
///
/// `frac` uses floor semantics, so negative X map to `θ ∈ [0, 1)` as well.
pub fn fiber_compose(p: &FiberMassProfile, t: f64, x: f64) -> f64 {
    let rt = t.sqrt();
    nwave(x / rt, p.mass(x)) / rt
}
