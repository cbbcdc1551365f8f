//! Sampled m-convexity checks: certificates for powers, witnesses for
//! functions that fail.
//!
//! ```text
//! cargo run --example convexity_oracle
//! ```

use mconvex::{check_abs_deriv_m_convex, check_m_convex, ConvexityReport, Fn1D, OracleBudget};

fn show(what: &str, r: &ConvexityReport) {
    match &r.witness {
        None => println!("{what:<28} m = {:<5} holds  ({} samples)", r.m, r.samples_checked),
        Some(w) => println!(
            "{what:<28} m = {:<5} fails  at x = {:.4}, y = {:.4}, t = {:.4}: {:.6} > {:.6}",
            r.m, w.x, w.y, w.t, w.lhs, w.rhs
        ),
    }
}

fn main() -> mconvex::Result<()> {
    let budget = OracleBudget::default().with_seed(7);
    for m in [0.25, 0.5, 1.0] {
        show("u^3", &check_m_convex(&Fn1D::power(3.0, 2.0)?, m, 2.0, budget)?);
    }
    let shifted = Fn1D::polynomial([1.0, 0.0, 1.0], 1.0)?;
    show("u^2 + 1", &check_m_convex(&shifted, 1.0, 1.0, budget)?);
    show("u^2 + 1", &check_m_convex(&shifted, 0.5, 1.0, budget)?);
    let concave = Fn1D::polynomial([0.0, 0.0, -1.0], 1.0)?;
    show("-u^2", &check_m_convex(&concave, 1.0, 1.0, budget)?);
    let e = Fn1D::exponential(2.0)?;
    show("|f'| of e^u", &check_abs_deriv_m_convex(&e, 1.0, 1.0, 2.0, budget)?);
    show("|f'| of e^u", &check_abs_deriv_m_convex(&e, 1.0, 0.5, 2.0, budget)?);
    show("|f'|^2 of u^2", &check_abs_deriv_m_convex(&Fn1D::power(2.0, 2.0)?, 2.0, 0.5, 2.0, budget)?);
    Ok(())
}
