//! Integrable data for α = 8 spread into an N-wave: a linear ramp ending in a
//! front of fixed width.

use coag::kernels::{KernelSpec, Normalization};
use coag::wavesim::{front_position, simulate, InitialCondition, SamplingRule, SimConfig};

fn main() -> coag::Result<()> {
    let cfg = SimConfig {
        kernel: KernelSpec::alpha(8.0, Normalization::SimplexUnit)?,
        eps: 0.05,
        l: 40.0,
        r: 25.0,
        tau: None,
        t_end: 12.0,
        snapshot: 2.0,
        init: InitialCondition::Bump { center: 4.0, width: 0.8, height: 0.5 },
        rule: SamplingRule::Gregory,
    };
    let out = simulate(&cfg)?;
    println!("tau {:.3e}, {} steps", out.plan.tau, out.plan.steps);
    for s in &out.snapshots {
        let top = s.max();
        let w = front_position(s, 0.1 * top)? - front_position(s, 0.9 * top)?;
        println!("T {:>4.1}: mass {:.6}, max u {:.4}, front width {w:.3}", s.t, s.mass(), top);
    }
    println!("mass drift per unit time: {:.2e}", out.c_consistency);
    Ok(())
}
