//! Linear stability of constant states for the alpha family.
//!
//! Scans Re M(k) on a grid and localizes the threshold where the constant
//! solution loses stability.

use coag::spectral::{growth_rate_log2, spectrum, stability_scan, stability_threshold};

fn main() -> coag::Result<()> {
    for alpha in [3.0, 30.0, 40.0, 60.0] {
        let scan = stability_scan(alpha, 40.0, 0.01)?;
        println!(
            "alpha {alpha:>4}: max Re M = {:+.3e} at k = {:.3} ({:?}), growth per base-2 time {:+.3e}",
            scan.max_re,
            scan.argmax_k,
            scan.verdict,
            growth_rate_log2(scan.max_re)
        );
    }

    let alpha_crit = stability_threshold(30.0, 40.0, 40.0, 0.01, 1e-3)?;
    println!("\nstability threshold: alpha = {alpha_crit:.3}");

    println!("\nk, Re M, Im M at alpha = 40:");
    for s in spectrum(40.0, 12.0, 1.0)? {
        println!("{:5.1} {:+.6e} {:+.6e}", s.k, s.m.re, s.m.im);
    }
    Ok(())
}
