//! Roots of M(k) + ik = 0 and the monotone/oscillatory transition of
//! traveling-wave tails.

use coag::spectral::{dispersion_roots, is_oscillatory, oscillation_threshold, RootSearch};

fn main() -> coag::Result<()> {
    let search = RootSearch::default();
    for alpha in [3.0, 15.0, 20.0, 25.0] {
        let roots = dispersion_roots(alpha, &search)?;
        let dom = roots.iter().find(|r| r.dominant).expect("a dominant root");
        println!(
            "alpha {alpha:>4}: {} roots, dominant k = {:+.4} {:+.4}i ({}), residual {:.1e}",
            roots.len(),
            dom.k.re,
            dom.k.im,
            if is_oscillatory(dom) { "oscillatory" } else { "monotone" },
            dom.residual
        );
        for r in roots.iter().take(4) {
            println!("    {:+.6} {:+.6}i", r.k.re, r.k.im);
        }
    }
    let alpha_star = oscillation_threshold(15.0, 25.0, &search, 1e-3)?;
    println!("\ntransition to monotone tails at alpha = {alpha_star:.3}");
    Ok(())
}
