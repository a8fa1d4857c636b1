//! Riemann data in the continuum scheme: monotone fronts for α = 25,
//! oscillatory ones for α = 3.
//!
//! Takes a few seconds per run in release mode.

use coag::kernels::{KernelSpec, Normalization};
use coag::reference::oscillation_count;
use coag::wavesim::{back_region, front_position, simulate, InitialCondition, SamplingRule, SimConfig};

fn main() -> coag::Result<()> {
    for alpha in [25.0, 3.0] {
        let cfg = SimConfig {
            kernel: KernelSpec::alpha(alpha, Normalization::SimplexUnit)?,
            eps: 0.05,
            l: 40.0,
            r: 25.0,
            tau: None,
            t_end: 2.5,
            snapshot: 0.5,
            init: InitialCondition::Riemann { c_minus: 1.0, x0: 1.0, smooth: true },
            rule: SamplingRule::Gregory,
        };
        let out = simulate(&cfg)?;
        let speed = out.plan.a_simplex / std::f64::consts::LN_2.powi(2);
        println!("alpha {alpha}: tau = {:.3e}, Burgers front speed {speed:.3}", out.plan.tau);
        for s in &out.snapshots[1..] {
            let front = front_position(s, 0.5)?;
            let back = back_region(s, front, 15.0, 2.0);
            let (lo, hi) = back.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            println!(
                "  T {:.1}: front {front:6.2}, back region [{lo:.4}, {hi:.4}], sign changes {}",
                s.t,
                oscillation_count(&back, 1.0, 1e-4)
            );
        }
    }
    Ok(())
}
