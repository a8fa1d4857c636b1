//! Kernel families, their classification and Burgers constants.
//!
//! Run with `cargo run --release --example kernels`.

use coag::kernels::{burgers_constant, BurgersConstant, KernelSpec, Normalization};
use coag::quadrature::{integrate, QuadParams};

fn main() -> coag::Result<()> {
    let quad = QuadParams::new(1e-10, 1e-10);
    println!("{:>6} {:>12} {:>12} {:>14}", "alpha", "A (simplex)", "A (A-unit)", "∫K(x,1-x)dx");
    for alpha in [2.0, 3.0, 8.0, 25.0, 35.0] {
        let ks = KernelSpec::alpha(alpha, Normalization::SimplexUnit)?;
        let ka = KernelSpec::alpha(alpha, Normalization::AUnit)?;
        let a_s = burgers_constant(&ks, &quad)?.value().unwrap_or(f64::NAN);
        let a_a = burgers_constant(&ka, &quad)?.value().unwrap_or(f64::NAN);
        let simplex = integrate(|x| ks.eval(x, 1.0 - x).unwrap(), 0.0, 1.0, &quad)?.value;
        println!("{alpha:>6} {a_s:>12.6} {a_a:>12.8} {simplex:>14.10}");
    }

    let additive = KernelSpec::additive();
    println!("\nadditive kernel: class {:?}", additive.classify());
    match burgers_constant(&additive, &quad)? {
        BurgersConstant::Divergent => println!("Burgers constant diverges (class II)"),
        BurgersConstant::Finite { value, .. } => println!("Burgers constant {value}"),
    }

    let diag = KernelSpec::diagonal();
    match diag.eval(1.0, 1.0) {
        Err(e) => println!("diagonal kernel: {e}"),
        Ok(v) => println!("diagonal kernel: {v}"),
    }
    Ok(())
}
