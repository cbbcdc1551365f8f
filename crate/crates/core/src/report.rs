//! Machine-readable output: flat JSON objects with stable key order and
//! floats rounded to 12 significant digits.

use serde_json::{Map, Value};

use crate::fncatalog::ConvexityReport;
use crate::hh_bounds::{BoundName, HHReport};
use crate::means::{MeansCase, PropCheck};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v)
}

/// A JSON number rounded to 12 significant digits; non-finite values become `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(round_sig(v)).map_or(Value::Null, Value::Number)
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

/// Recursively rounds every float in a JSON tree.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(Value::Null, num),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// The text form of a scalar cell, used for CSV.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn put_convexity(out: &mut Map<String, Value>, prefix: &str, r: &ConvexityReport) {
    let key = |k: &str| format!("{prefix}.{k}");
    out.insert(key("holds"), Value::Bool(r.holds));
    out.insert(key("target"), Value::String(r.target.as_str().into()));
    out.insert(key("m"), num(r.m));
    out.insert(key("q"), num(r.q));
    out.insert(key("hi"), num(r.hi));
    out.insert(key("samples_checked"), Value::from(r.samples_checked));
    let w = r.witness;
    out.insert(key("witness.x"), opt_num(w.map(|w| w.x)));
    out.insert(key("witness.y"), opt_num(w.map(|w| w.y)));
    out.insert(key("witness.t"), opt_num(w.map(|w| w.t)));
    out.insert(key("witness.lhs"), opt_num(w.map(|w| w.lhs)));
    out.insert(key("witness.rhs"), opt_num(w.map(|w| w.rhs)));
    out.insert(key("witness.gap"), opt_num(w.map(|w| w.gap)));
}

/// A convexity report as a flat object (`holds`, `target`, ..., `witness.gap`).
pub fn convexity_flat(r: &ConvexityReport) -> Map<String, Value> {
    let mut out = Map::new();
    put_convexity(&mut out, "oracle", r);
    out.into_iter()
        .map(|(k, v)| (k.trim_start_matches("oracle.").to_string(), v))
        .collect()
}

/// One report as a flat object. Keys appear in the same order for every report.
pub fn hh_flat(r: &HHReport) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("lhs_abs".into(), num(r.lhs_abs));
    out.insert("bound_t3".into(), opt_num(r.bound_t3));
    out.insert("bound_t4".into(), opt_num(r.bound_t4));
    out.insert("bound_t5".into(), opt_num(r.bound_t5));
    out.insert("lemma1_residual".into(), num(r.lemma1_residual));
    out.insert("classical_left_gap".into(), num(r.classical_left_gap));
    out.insert("classical_right_gap".into(), num(r.classical_right_gap));
    for name in BoundName::ALL {
        out.insert(format!("tightness.{name}"), opt_num(r.tightness.get(&name).copied()));
    }
    for name in BoundName::ALL {
        out.insert(format!("applicable.{name}"), Value::Bool(r.applicable(name)));
    }
    put_convexity(&mut out, "preconditions.t3", &r.precondition_t3);
    put_convexity(&mut out, "preconditions.t45", &r.precondition_t45);
    let vacuous: Vec<&str> = r.vacuous.iter().map(|b| b.as_str()).collect();
    out.insert("vacuous_bounds".into(), Value::String(vacuous.join(",")));
    out.insert("errors".into(), Value::String(r.errors.join("; ")));
    out
}

/// Proposition results for the `"means"` key of the report envelope.
pub fn means_flat(
    case: &MeansCase,
    means: &[(&str, f64)],
    prop1: &PropCheck,
    prop2: Option<&PropCheck>,
) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("a".into(), num(case.a));
    out.insert("b".into(), num(case.b));
    out.insert("n".into(), Value::from(case.n));
    out.insert("m".into(), num(case.m));
    out.insert("q".into(), num(case.q));
    for (k, v) in means {
        out.insert((*k).to_string(), num(*v));
    }
    out.insert("prop1.lhs".into(), num(prop1.lhs));
    out.insert("prop1.rhs".into(), num(prop1.rhs));
    out.insert("prop1.holds".into(), Value::Bool(prop1.holds));
    if let Some(p) = prop2 {
        out.insert("prop2.lhs".into(), num(p.lhs));
        out.insert("prop2.rhs".into(), num(p.rhs));
        out.insert("prop2.holds".into(), Value::Bool(p.holds));
    }
    out
}
