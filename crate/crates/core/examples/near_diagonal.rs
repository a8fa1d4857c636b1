//! Kernels concentrated near the diagonal destabilize constant states at the
//! wavenumber 2π/ln 2.

use coag::kernels::EtaDensity;
use coag::quadrature::QuadParams;
use coag::spectral::{near_diagonal_m, near_diagonal_w, K1};

fn main() -> coag::Result<()> {
    let quad = QuadParams::new(1e-12, 1e-10);
    for eps in [0.01, 0.05, 0.1] {
        let m = near_diagonal_m(K1, eps, &EtaDensity::Uniform, &quad)?;
        println!("eps {eps:<5} M(k1) = {:+.6e} {:+.6e}i", m.re, m.im);
    }
    println!("\nsmall-s behaviour of Re W(k1, s) against -32 (k1 s)^2:");
    for s in [0.02, 0.01, 0.005, 0.0025] {
        let w = near_diagonal_w(K1, s)?;
        let lead = -32.0 * (K1 * s).powi(2);
        println!("s {s:<7} Re W = {:+.6e}   ratio {:.5}", w.re, w.re / lead);
    }
    Ok(())
}
