//! Seeded parameter sweeps over `(function, a, b, x, m, q)`.
//!
//! Cases are generated serially from one RNG stream, evaluated
//! independently (optionally on the rayon pool), and folded back in case
//! order, so serial and parallel runs produce identical reports.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fncatalog::{ConvexityReport, Fn1D, FnSpec, OracleBudget};
use crate::hh_bounds::{full_report, BoundName, BoundParams, HHReport, ReportOptions};
use crate::quadrature::DEFAULT_TOL;

/// Intervals narrower than this are redrawn.
pub const MIN_WIDTH: f64 = 1e-3;
const MAX_REDRAWS: usize = 1000;

/// How node points `x` are chosen inside each drawn `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XPolicy {
    #[default]
    Midpoint,
    /// `k` evenly spaced nodes including both endpoints.
    Grid(usize),
    /// `k` uniform random nodes.
    Random(usize),
}

impl XPolicy {
    fn per_draw(self) -> usize {
        match self {
            XPolicy::Midpoint => 1,
            XPolicy::Grid(k) | XPolicy::Random(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub functions: Vec<FnSpec>,
    pub a_range: [f64; 2],
    pub b_range: [f64; 2],
    #[serde(default)]
    pub x_policy: XPolicy,
    pub m_values: Vec<f64>,
    pub q_values: Vec<f64>,
    /// Number of `(a, b)` draws; each yields `x_policy` many cases.
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Lattice and random sample counts per oracle call. The seed is derived per case.
    #[serde(default)]
    pub oracle_budget: OracleBudget,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_parallel() -> bool {
    true
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    fn validate(&self) -> Result<Vec<Fn1D>> {
        if self.functions.is_empty() {
            return Err(config_err("no functions given"));
        }
        if self.m_values.is_empty() || self.q_values.is_empty() {
            return Err(config_err("m_values and q_values must be nonempty"));
        }
        for (name, r) in [("a_range", self.a_range), ("b_range", self.b_range)] {
            if !(r[0].is_finite() && r[1].is_finite()) || r[0] < 0.0 || r[0] > r[1] {
                return Err(config_err(format!("{name} must be a finite range within [0, inf), got {r:?}")));
            }
        }
        if let Some(m) = self.m_values.iter().find(|m| !(**m > 0.0 && **m <= 1.0)) {
            return Err(config_err(format!("m values must lie in (0, 1], got {m}")));
        }
        if let Some(q) = self.q_values.iter().find(|q| !(q.is_finite() && **q >= 1.0)) {
            return Err(config_err(format!("q values must be >= 1, got {q}")));
        }
        if !(self.tol > 0.0) {
            return Err(config_err(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.oracle_budget.grid_n < 2 {
            return Err(config_err("oracle grid_n must be >= 2"));
        }
        if self.x_policy.per_draw() == 0 {
            return Err(config_err("x_policy needs at least one node"));
        }
        self.functions
            .iter()
            .map(|s| s.build().map_err(|e| config_err(format!("function {:?}: {e}", s.kind))))
            .collect()
    }
}

/// One generated parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub index: usize,
    pub function: String,
    #[serde(skip)]
    pub function_index: usize,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub m: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub case: Case,
    pub bound: String,
    pub lhs: f64,
    pub bound_value: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredCase {
    pub case: Case,
    /// The failing oracle report; always carries a witness.
    pub precondition: ConvexityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseError {
    pub case: Case,
    pub message: String,
    pub non_convergence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TightnessStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Pairwise orderings among the three bounds, over cases where all three exist.
/// Ties count toward both directions.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OrderingStats {
    pub cases_compared: usize,
    pub t5_le_t4: usize,
    pub t4_le_t5: usize,
    pub t3_le_t4: usize,
    pub t4_le_t3: usize,
    pub t3_le_t5: usize,
    pub t5_le_t3: usize,
    /// Largest `bound_t5 / bound_t4` over cases with `bound_t4 > 0`.
    pub worst_t5_over_t4: Option<f64>,
    /// Stream positions where `bound_t5 > bound_t4`.
    pub t5_above_t4: Vec<usize>,
}

/// Tallies bound orderings over a stream of reports. Reports without
/// `bound_t4` (the `q = 1` cases) are skipped.
pub fn compare_bounds<'a, I>(reports: I) -> OrderingStats
where
    I: IntoIterator<Item = &'a HHReport>,
{
    let mut s = OrderingStats::default();
    for (pos, r) in reports.into_iter().enumerate() {
        let (Some(t3), Some(t4), Some(t5)) = (r.bound_t3, r.bound_t4, r.bound_t5) else {
            continue;
        };
        s.cases_compared += 1;
        s.t5_le_t4 += usize::from(t5 <= t4);
        s.t4_le_t5 += usize::from(t4 <= t5);
        s.t3_le_t4 += usize::from(t3 <= t4);
        s.t4_le_t3 += usize::from(t4 <= t3);
        s.t3_le_t5 += usize::from(t3 <= t5);
        s.t5_le_t3 += usize::from(t5 <= t3);
        if t5 > t4 {
            s.t5_above_t4.push(pos);
        }
        if t4 > 0.0 {
            let ratio = t5 / t4;
            s.worst_t5_over_t4 = Some(s.worst_t5_over_t4.map_or(ratio, |w: f64| w.max(ratio)));
        }
    }
    s
}

/// Per-case CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub m: f64,
    pub q: f64,
    pub lhs_abs: f64,
    pub bound_t3: Option<f64>,
    pub bound_t4: Option<f64>,
    pub bound_t5: Option<f64>,
    pub residual: f64,
    pub certified_t3: bool,
    pub certified_t45: bool,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "function",
    "a",
    "b",
    "x",
    "m",
    "q",
    "lhs_abs",
    "bound_t3",
    "bound_t4",
    "bound_t5",
    "residual",
    "certified_t3",
    "certified_t45",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// `"pass"` exactly when `violations` is empty.
    pub status: String,
    pub cases_total: usize,
    pub cases_run: usize,
    pub cases_filtered_precondition: usize,
    pub cases_filtered_domain: usize,
    pub cases_errored: usize,
    pub violations: Vec<Violation>,
    pub tightness: BTreeMap<String, TightnessStats>,
    pub ordering: OrderingStats,
    /// Ordering counterexamples by case index (recorded, not failures).
    pub t5_above_t4_cases: Vec<usize>,
    pub max_lemma1_residual: f64,
    pub filtered: Vec<FilteredCase>,
    pub errors: Vec<CaseError>,
    #[serde(skip)]
    pub rows: Vec<CaseRow>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_non_convergence(&self) -> bool {
        self.errors.iter().any(|e| e.non_convergence)
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("sweep reports serialize");
        crate::report::to_json_string(&crate::report::round_floats(v))
    }

    /// Writes the per-case rows with the columns in [`CSV_COLUMNS`].
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        let n = |v: f64| crate::report::cell(&crate::report::num(v));
        let on = |v: Option<f64>| v.map(n).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.function.clone(),
                n(r.a),
                n(r.b),
                n(r.x),
                n(r.m),
                n(r.q),
                n(r.lhs_abs),
                on(r.bound_t3),
                on(r.bound_t4),
                on(r.bound_t5),
                n(r.residual),
                r.certified_t3.to_string(),
                r.certified_t45.to_string(),
            ])?;
        }
        w.flush()
    }
}

enum Outcome {
    Run(Box<HHReport>),
    FilteredPrecondition(Box<HHReport>),
    FilteredDomain,
    Errored(String, bool),
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    r[0] + rng.gen::<f64>() * (r[1] - r[0])
}

/// Draws `(a, b)`, ordered, redrawing intervals narrower than [`MIN_WIDTH`].
fn draw_interval(rng: &mut ChaCha8Rng, cfg: &SweepConfig) -> Option<(f64, f64)> {
    for _ in 0..MAX_REDRAWS {
        let (u, v) = (uniform(rng, cfg.a_range), uniform(rng, cfg.b_range));
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        if b - a >= MIN_WIDTH {
            return Some((a, b));
        }
    }
    None
}

/// Generates every case of the sweep. `None` marks a draw that never
/// produced a wide enough interval; such cases are counted as domain-filtered.
fn generate_cases(cfg: &SweepConfig, fns: &[Fn1D]) -> Vec<(Case, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (nf, nm, nq) = (fns.len(), cfg.m_values.len(), cfg.q_values.len());
    let mut cases = Vec::with_capacity(cfg.samples * cfg.x_policy.per_draw());
    for i in 0..cfg.samples {
        let fi = i % nf;
        let m = cfg.m_values[(i / nf) % nm];
        let q = cfg.q_values[(i / (nf * nm)) % nq];
        let interval = draw_interval(&mut rng, cfg);
        let (a, b) = interval.unwrap_or((cfg.a_range[0], cfg.a_range[0]));
        let xs: Vec<f64> = match cfg.x_policy {
            XPolicy::Midpoint => vec![0.5 * (a + b)],
            XPolicy::Grid(1) => vec![0.5 * (a + b)],
            XPolicy::Grid(k) => (0..k).map(|j| a + (b - a) * j as f64 / (k - 1) as f64).collect(),
            XPolicy::Random(k) => (0..k).map(|_| uniform(&mut rng, [a, b])).collect(),
        };
        for x in xs {
            let case = Case {
                index: cases.len(),
                function: fns[fi].label().to_string(),
                function_index: fi,
                a,
                b,
                x,
                m,
                q,
            };
            cases.push((case, interval.is_some()));
        }
    }
    cases
}

fn case_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn evaluate(case: &Case, valid_interval: bool, f: &Fn1D, cfg: &SweepConfig) -> Outcome {
    if !valid_interval || !f.covers(case.b / case.m) {
        return Outcome::FilteredDomain;
    }
    let opts = ReportOptions {
        tol: cfg.tol,
        oracle: cfg.oracle_budget.with_seed(case_seed(cfg.seed, case.index)),
    };
    let params = match BoundParams::new(case.a, case.b, case.x, case.m, case.q) {
        Ok(p) => p,
        Err(e) => return Outcome::Errored(e.to_string(), false),
    };
    match full_report(f, &params, &opts) {
        Err(e) => {
            let nc = matches!(e, Error::NoConvergence { .. });
            Outcome::Errored(e.to_string(), nc)
        }
        Ok(r) if !r.errors.is_empty() => {
            let nc = r.errors.iter().any(|e| e.contains("did not converge"));
            Outcome::Errored(r.errors.join("; "), nc)
        }
        Ok(r) if !r.precondition_t3.holds && !r.precondition_t45.holds => Outcome::FilteredPrecondition(Box::new(r)),
        Ok(r) => Outcome::Run(Box::new(r)),
    }
}

fn row(case: &Case, r: &HHReport) -> CaseRow {
    CaseRow {
        function: case.function.clone(),
        a: case.a,
        b: case.b,
        x: case.x,
        m: case.m,
        q: case.q,
        lhs_abs: r.lhs_abs,
        bound_t3: r.bound_t3,
        bound_t4: r.bound_t4,
        bound_t5: r.bound_t5,
        residual: r.lemma1_residual,
        certified_t3: r.precondition_t3.holds,
        certified_t45: r.precondition_t45.holds,
    }
}

/// Runs the sweep. Individual case failures are recorded, never fatal;
/// only a malformed config is an error.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let fns = cfg.validate()?;
    let cases = generate_cases(cfg, &fns);
    let eval = |(case, ok): &(Case, bool)| evaluate(case, *ok, &fns[case.function_index], cfg);
    let outcomes: Vec<Outcome> = if cfg.parallel {
        cases.par_iter().map(eval).collect()
    } else {
        cases.iter().map(eval).collect()
    };

    let mut report = SweepReport {
        status: String::new(),
        cases_total: cases.len(),
        cases_run: 0,
        cases_filtered_precondition: 0,
        cases_filtered_domain: 0,
        cases_errored: 0,
        violations: Vec::new(),
        tightness: BTreeMap::new(),
        ordering: OrderingStats::default(),
        t5_above_t4_cases: Vec::new(),
        max_lemma1_residual: 0.0,
        filtered: Vec::new(),
        errors: Vec::new(),
        rows: Vec::new(),
    };
    let mut ratios: BTreeMap<BoundName, Vec<f64>> = BTreeMap::new();
    let mut run_reports: Vec<(usize, &HHReport)> = Vec::new();

    for ((case, _), outcome) in cases.iter().zip(&outcomes) {
        match outcome {
            Outcome::FilteredDomain => report.cases_filtered_domain += 1,
            Outcome::Errored(message, nc) => {
                report.cases_errored += 1;
                report.errors.push(CaseError {
                    case: case.clone(),
                    message: message.clone(),
                    non_convergence: *nc,
                });
            }
            Outcome::FilteredPrecondition(r) => {
                report.cases_filtered_precondition += 1;
                report.max_lemma1_residual = report.max_lemma1_residual.max(r.lemma1_residual);
                report.rows.push(row(case, r));
                report.filtered.push(FilteredCase {
                    case: case.clone(),
                    precondition: r.precondition_t3.clone(),
                });
            }
            Outcome::Run(r) => {
                report.cases_run += 1;
                report.max_lemma1_residual = report.max_lemma1_residual.max(r.lemma1_residual);
                report.rows.push(row(case, r));
                for (name, bound, gap) in r.violations() {
                    report.violations.push(Violation {
                        case: case.clone(),
                        bound: name.to_string(),
                        lhs: r.lhs_abs,
                        bound_value: bound,
                        gap,
                    });
                }
                for (name, ratio) in &r.tightness {
                    if r.applicable(*name) {
                        ratios.entry(*name).or_default().push(*ratio);
                    }
                }
                run_reports.push((case.index, r));
            }
        }
    }

    for (name, values) in ratios {
        let count = values.len();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / count as f64;
        report.tightness.insert(name.to_string(), TightnessStats { count, min, max, mean });
    }
    report.ordering = compare_bounds(run_reports.iter().map(|(_, r)| *r));
    report.t5_above_t4_cases = report.ordering.t5_above_t4.iter().map(|&p| run_reports[p].0).collect();
    report.status = if report.passed() { "pass" } else { "fail" }.to_string();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fncatalog::FnKind;

    fn spec(kind: FnKind, hi: f64) -> FnSpec {
        FnSpec { kind, domain_hi: hi, label: None }
    }

    fn quick(functions: Vec<FnSpec>, m_values: Vec<f64>, q_values: Vec<f64>, samples: usize) -> SweepConfig {
        SweepConfig {
            functions,
            a_range: [0.0, 2.0],
            b_range: [0.0, 2.0],
            x_policy: XPolicy::Midpoint,
            m_values,
            q_values,
            samples,
            seed: 42,
            tol: 1e-10,
            oracle_budget: OracleBudget { grid_n: 12, random_n: 200, seed: 0 },
            parallel: true,
        }
    }

    #[test]
    fn constant_sweep_is_all_zero() {
        let cfg = quick(vec![spec(FnKind::Constant { c: 2.0 }, 8.0)], vec![0.5, 1.0], vec![1.0, 2.0], 20);
        let r = run_sweep(&cfg).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases_run, 20);
        for row in &r.rows {
            assert!(row.lhs_abs <= 1e-12);
            assert_eq!(row.bound_t3, Some(0.0));
            assert_eq!(row.bound_t5, Some(0.0));
        }
        assert!(r.tightness.values().all(|t| t.max == 0.0));
    }

    #[test]
    fn exponential_at_half_is_filtered() {
        let cfg = quick(vec![spec(FnKind::Exponential { scale: 1.0, rate: 1.0 }, 4.0)], vec![0.5], vec![1.0, 2.0], 12);
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.cases_run, 0);
        assert_eq!(r.cases_filtered_precondition, 12);
        assert!(r.filtered.iter().all(|f| !f.precondition.holds && f.precondition.witness.is_some()));
    }

    #[test]
    fn domain_filter_counts() {
        // b/m up to 8 but the domain stops at 2
        let cfg = quick(vec![spec(FnKind::Power { n: 2.0 }, 2.0)], vec![0.25], vec![1.0], 30);
        let r = run_sweep(&cfg).unwrap();
        assert!(r.cases_filtered_domain > 0);
        assert_eq!(
            r.cases_run + r.cases_filtered_domain + r.cases_filtered_precondition + r.cases_errored,
            r.cases_total
        );
    }

    #[test]
    fn grid_policy_expands_cases() {
        let mut cfg = quick(vec![spec(FnKind::Power { n: 3.0 }, 8.0)], vec![0.5], vec![2.0], 5);
        cfg.x_policy = XPolicy::Grid(4);
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.cases_total, 20);
        assert!(r.passed());
        assert_eq!(r.rows[0].x, r.rows[0].a);
        assert_eq!(r.rows[3].x, r.rows[3].b);
    }

    #[test]
    fn config_errors() {
        let mut cfg = quick(vec![], vec![1.0], vec![1.0], 1);
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
        cfg.functions = vec![spec(FnKind::Power { n: 2.0 }, 2.0)];
        cfg.m_values = vec![0.0];
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
        cfg.m_values = vec![1.0];
        cfg.a_range = [1.0, 0.5];
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::from_json("{"), Err(Error::Config(_))));
    }

    #[test]
    fn config_json_shape() {
        let text = r#"{
            "functions": [{"kind": "power", "n": 2, "domain_hi": 8}],
            "a_range": [0, 2], "b_range": [0, 2],
            "x_policy": {"random": 3},
            "m_values": [0.5], "q_values": [1, 2],
            "samples": 4, "seed": 1,
            "oracle_budget": {"grid_n": 8, "random_n": 10}
        }"#;
        let cfg = SweepConfig::from_json(text).unwrap();
        assert_eq!(cfg.x_policy, XPolicy::Random(3));
        assert_eq!(cfg.tol, DEFAULT_TOL);
        assert!(cfg.parallel);
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.cases_total, 12);
        let mid: SweepConfig = serde_json::from_str(&text.replace(r#"{"random": 3}"#, r#""midpoint""#)).unwrap();
        assert_eq!(mid.x_policy, XPolicy::Midpoint);
    }

    #[test]
    fn ordering_tally() {
        let sq = Fn1D::power(2.0, 4.0).unwrap();
        let opts = ReportOptions {
            oracle: OracleBudget { grid_n: 8, random_n: 0, seed: 0 },
            ..ReportOptions::default()
        };
        let r2 = full_report(&sq, &BoundParams::new(0.0, 1.0, 0.5, 1.0, 2.0).unwrap(), &opts).unwrap();
        let s = compare_bounds([&r2]);
        assert_eq!((s.cases_compared, s.t5_le_t4, s.t4_le_t5), (1, 1, 0));
        assert!(s.t5_above_t4.is_empty());
        assert!((s.worst_t5_over_t4.unwrap() - 0.288675 / 0.330280).abs() < 1e-5);

        let r1 = full_report(&sq, &BoundParams::new(0.0, 1.0, 0.5, 1.0, 1.0).unwrap(), &opts).unwrap();
        let s = compare_bounds([&r1]);
        assert_eq!(s.cases_compared, 0);

        let c = Fn1D::constant(1.0, 4.0).unwrap();
        let rc = full_report(&c, &BoundParams::new(0.0, 1.0, 0.5, 1.0, 3.0).unwrap(), &opts).unwrap();
        let s = compare_bounds([&rc, &rc]);
        assert_eq!((s.cases_compared, s.t5_le_t4, s.t4_le_t5, s.t3_le_t5), (2, 2, 2, 2));
        assert_eq!(s.worst_t5_over_t4, None);

        assert_eq!(compare_bounds(std::iter::empty()), OrderingStats::default());
    }
}
