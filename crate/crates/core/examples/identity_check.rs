//! Integration-by-parts identity for the deviation: the corrected weights
//! reproduce D(x), the swapped weights give -D(x).
//!
//! ```text
//! cargo run --example identity_check
//! ```

use mconvex::{identity_sides, Fn1D, IdentitySigns};

fn main() -> mconvex::Result<()> {
    let functions = [
        Fn1D::power(2.0, 2.0)?,
        Fn1D::power(3.0, 2.0)?,
        Fn1D::polynomial([0.0, 0.0, 1.0, 1.0], 2.0)?,
        Fn1D::exponential(2.0)?,
    ];
    println!("{:<20} {:>6} {:>14} {:>14} {:>12} {:>14}", "f", "x", "D(x)", "rhs", "residual", "swapped rhs");
    for f in &functions {
        for x in [0.25, 1.0, 1.75] {
            let ok = identity_sides(f, 0.0, 2.0, x, 1e-10, IdentitySigns::Corrected)?;
            let swapped = identity_sides(f, 0.0, 2.0, x, 1e-10, IdentitySigns::Swapped)?;
            println!(
                "{:<20} {x:>6} {:>14.9} {:>14.9} {:>12.2e} {:>14.9}",
                f.label(),
                ok.lhs,
                ok.rhs,
                ok.residual,
                swapped.rhs
            );
        }
    }
    Ok(())
}
