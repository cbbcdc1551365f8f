//! Arithmetic, logarithmic and generalized log means, and the two
//! trapezoid-error inequalities for u^n.
//!
//! ```text
//! cargo run --example special_means
//! ```

use mconvex::{arithmetic_mean, gen_log_mean, log_mean, prop1_check, prop2_check, MeansCase};

fn main() -> mconvex::Result<()> {
    let (a, b) = (1.0, 2.0);
    println!("A({a}, {b})   = {:.9}", arithmetic_mean(a, b)?);
    println!("L({a}, {b})   = {:.9}", log_mean(a, b)?);
    for n in [-2, 2, 3, 5] {
        println!("L_{n}({a}, {b}) = {:.9}", gen_log_mean(a, b, n)?);
    }
    println!();
    println!("{:>3} {:>5} {:>4} {:>12} {:>12} {:>12}", "n", "m", "q", "|A - L_n^n|", "direct", "power mean");
    for n in [2, 3, 4] {
        for m in [0.5, 1.0] {
            let case = MeansCase::new(a, b, n, m, 2.0)?;
            let p1 = prop1_check(&case)?;
            let p2 = prop2_check(&case)?;
            println!("{n:>3} {m:>5} {:>4} {:>12.6} {:>12.6} {:>12.6}", case.q, p1.lhs, p1.rhs, p2.rhs);
        }
    }
    Ok(())
}
