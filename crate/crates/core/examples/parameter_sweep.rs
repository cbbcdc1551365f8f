//! Seeded sweep over powers, intervals, m and q. Writes the JSON summary to
//! stdout and per-case rows to `sweep_rows.csv` (or the path given as the
//! first argument).
//!
//! ```text
//! cargo run --release --example parameter_sweep -- /tmp/rows.csv
//! ```

use mconvex::{run_sweep, SweepConfig};

const CONFIG: &str = r#"{
    "functions": [
        {"kind": "power", "n": 2, "domain_hi": 8.0},
        {"kind": "power", "n": 3, "domain_hi": 8.0},
        {"kind": "power", "n": 4, "domain_hi": 8.0}
    ],
    "a_range": [0.0, 2.0],
    "b_range": [0.0, 2.0],
    "x_policy": "midpoint",
    "m_values": [0.25, 0.5, 1.0],
    "q_values": [1.0, 2.0, 3.0],
    "samples": 500,
    "seed": 42
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let csv_path = std::env::args().nth(1).unwrap_or_else(|| "sweep_rows.csv".into());
    let cfg = SweepConfig::from_json(CONFIG)?;
    let report = run_sweep(&cfg)?;
    print!("{}", report.to_json());
    report.write_csv(std::fs::File::create(&csv_path)?)?;
    eprintln!("{} rows written to {csv_path}", report.rows.len());
    Ok(())
}
