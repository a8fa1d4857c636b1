//! The diagonal-kernel lattice relaxes unit-mass data to the N-wave.

use coag::lattice::{decay_ratio, entropy_gap, nwave_error, LatticeIntegrator, LatticeState};

fn main() -> coag::Result<()> {
    let s0 = LatticeState::box_data(1.0, 1)?;
    let w0 = s0.max_upward_jump();
    let mut integ = LatticeIntegrator::new(s0, 1e-10)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "t", "N-wave err", "entropy gap", "mass", "√t max u");
    for t in [1.0, 5.0, 25.0, 100.0, 400.0, 1600.0] {
        integ.advance_to(t)?;
        let s = &integ.state;
        println!(
            "{t:>6} {:>12.6} {:>12.3e} {:>12.10} {:>10.6}",
            nwave_error(s, 1.0),
            entropy_gap(s, w0),
            s.mass(),
            decay_ratio(s)
        );
    }
    println!("steps: {:?}", integ.stats);
    Ok(())
}
