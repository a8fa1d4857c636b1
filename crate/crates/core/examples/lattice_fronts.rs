//! Riemann fronts on the lattice and the fiber picture of the diagonal kernel.

use coag::lattice::{fiber_compose, front_crossing, riemann_front_speed, FiberMassProfile, LatticeIntegrator, LatticeState};

fn main() -> coag::Result<()> {
    let mut integ = LatticeIntegrator::new(LatticeState::riemann(1.0)?, 1e-10)?;
    for t in [10.0, 20.0, 30.0, 40.0] {
        integ.advance_to(t)?;
        println!("t {t:>4}: front at j = {:.4}", front_crossing(&integ.state, 0.5)?);
    }
    println!("speed between t=20 and t=40: {:.5}", riemann_front_speed(1.0, 20.0, 40.0, 1e-10)?);

    // each fiber θ + Z carries its own mass, so the limit is a family of N-waves
    let p = FiberMassProfile::Sinusoid { mean: 1.0, amplitude: 0.5 };
    p.validate()?;
    let t = 100.0;
    println!("\nfiber-composed profile at t = {t}:");
    for i in 0..=12 {
        let x = 1.85 * i as f64 + 0.1;
        println!("x {x:>5.1}  u {:.5}  M(frac x) {:.4}", fiber_compose(&p, t, x), p.mass(x));
    }
    Ok(())
}
