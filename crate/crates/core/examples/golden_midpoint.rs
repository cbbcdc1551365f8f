//! Midpoint deviation of u^2 on [0, 1] against the three midpoint bounds.
//!
//! ```text
//! cargo run --example golden_midpoint
//! ```

use mconvex::{bound_cor1, bound_cor2, bound_cor3, lhs_general, Fn1D};

fn main() -> mconvex::Result<()> {
    let f = Fn1D::power(2.0, 1.0)?;
    let (a, b, m, q) = (0.0, 1.0, 1.0, 2.0);

    let dev = lhs_general(&f, a, b, 0.5 * (a + b), 1e-10)?.abs();
    println!("f = {f}, [a, b] = [{a}, {b}], m = {m}, q = {q}");
    println!("|D(mid)|          = {dev:.9}");
    for (name, bound) in [
        ("direct", bound_cor1(&f, a, b, m)?),
        ("Holder", bound_cor2(&f, a, b, m, q)?),
        ("power mean", bound_cor3(&f, a, b, m, q)?),
    ] {
        println!("{name:<17} = {bound:.9}  (ratio {:.4})", dev / bound);
    }
    Ok(())
}
