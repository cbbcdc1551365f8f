//! How the Holder and power-mean bounds compare across nodes and q.
//!
//! ```text
//! cargo run --example bound_ordering
//! ```

use mconvex::{compare_bounds, full_report, BoundParams, Fn1D, HHReport, OracleBudget, ReportOptions};

fn main() -> mconvex::Result<()> {
    let opts = ReportOptions {
        oracle: OracleBudget { grid_n: 24, random_n: 2000, seed: 3 },
        ..ReportOptions::default()
    };
    let mut reports: Vec<HHReport> = Vec::new();
    println!("{:<6} {:>5} {:>5} {:>12} {:>12} {:>12} {:>12}", "f", "x", "q", "|D|", "t3", "t4", "t5");
    for n in [2.0, 3.0] {
        let f = Fn1D::power(n, 4.0)?;
        for x in [0.0, 0.3, 0.5, 0.8, 1.0] {
            for q in [1.5, 2.0, 4.0] {
                let r = full_report(&f, &BoundParams::new(0.0, 1.0, x, 0.5, q)?, &opts)?;
                println!(
                    "{:<6} {x:>5} {q:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                    f.label(),
                    r.lhs_abs,
                    r.bound_t3.unwrap_or(f64::NAN),
                    r.bound_t4.unwrap_or(f64::NAN),
                    r.bound_t5.unwrap_or(f64::NAN)
                );
                reports.push(r);
            }
        }
    }
    let s = compare_bounds(&reports);
    println!();
    println!("t5 <= t4 in {}/{} cases", s.t5_le_t4, s.cases_compared);
    println!("t5 <= t3 in {}/{} cases", s.t5_le_t3, s.cases_compared);
    if let Some(r) = s.worst_t5_over_t4 {
        println!("largest t5 / t4 = {r:.6}");
    }
    Ok(())
}
