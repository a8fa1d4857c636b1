//! Exact profiles for the additive kernel and the traveling-wave residual.

use coag::kernels::KernelSpec;
use coag::quadrature::QuadParams;
use coag::reference::{additive_g1, g_rho_left_asymptote, rho_to_b, AdditiveProfile};
use coag::wavesim::traveling_wave_residual;

fn main() -> coag::Result<()> {
    let quad = QuadParams::new(1e-10, 1e-10);
    let xs = [-3.0, -1.0, 0.0, 1.0, 2.0];
    let additive = KernelSpec::additive();
    for b in [2.0, 2.5] {
        let r = traveling_wave_residual(additive_g1, &additive, b, &xs, 60.0, &quad)?;
        println!("G1 with speed {b}: residual {r:.2e}");
    }

    for rho in [0.3, 0.5, 0.8] {
        let p = AdditiveProfile::new(rho, 200)?;
        let mass = p.mass(&QuadParams::new(1e-12, 1e-10))?;
        println!(
            "\nrho {rho}: b = {:.4}, series valid up to X = {:.3}, mass {:.8}",
            rho_to_b(rho, 1.0)?,
            p.x_switch,
            mass.total
        );
        for x in [-20.0, -5.0, 0.0, 5.0, 20.0] {
            let g = p.eval(x)?;
            let left = g_rho_left_asymptote(x, rho)?;
            println!("  X {x:>5}: G {:.6e} (± {:.1e}), left asymptote {left:.6e}", g.value, g.error());
        }
    }
    Ok(())
}
