//! Full report at an off-center node, including the oracle certificates that
//! decide which bounds apply.
//!
//! ```text
//! cargo run --example general_node
//! ```

use mconvex::{full_report, BoundName, BoundParams, Fn1D, ReportOptions};

fn main() -> mconvex::Result<()> {
    let opts = ReportOptions::default();
    for (f, params) in [
        (Fn1D::power(2.0, 1.0)?, BoundParams::new(0.0, 1.0, 0.25, 1.0, 2.0)?),
        (Fn1D::power(3.0, 4.0)?, BoundParams::new(0.5, 2.0, 1.6, 0.5, 3.0)?),
        (Fn1D::exponential(2.0)?, BoundParams::new(0.0, 1.0, 0.5, 0.5, 1.0)?),
    ] {
        let r = full_report(&f, &params, &opts)?;
        println!("{f}  a = {}  b = {}  x = {}  m = {}  q = {}", params.a, params.b, params.x, params.m, params.q);
        println!("  |D(x)| = {:.9}", r.lhs_abs);
        for name in BoundName::ALL {
            match r.bound(name) {
                Some(v) if r.applicable(name) => println!("  {name} = {v:.9}  certified"),
                Some(v) => println!("  {name} = {v:.9}  precondition fails"),
                None => println!("  {name} not defined for q = {}", params.q),
            }
        }
        if let Some(w) = r.precondition_t3.witness {
            println!("  |f'| not m-convex: x = {}, y = {}, t = {}, gap {:.3e}", w.x, w.y, w.t, w.gap);
        }
        println!("  classical gaps: left {:.6}, right {:.6}", r.classical_left_gap, r.classical_right_gap);
    }
    Ok(())
}
