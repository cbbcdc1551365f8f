//! Trapezoid-type deviation functional and its derivative-based upper bounds
//! for functions whose `|f'|` (or `|f'|^q`) is m-convex.
//!
//! The deviation functional at a node `x` in `[a, b]` is
//!
//! ```text
//! D(x) = ((b - x) f(b) + (x - a) f(a)) / (b - a) - 1/(b - a) * int_a^b f(u) du
//! ```
//!
//! and at `x = (a + b) / 2` it is the error of the trapezoid rule. Three
//! bounds on `|D(x)|` are provided (direct, Hölder, power mean), their
//! midpoint specializations, and the `m = 1` forms for ordinary convexity.
//! Evaluating `f'(a/m)` and `f'(b/m)` requires `b/m <= f.domain_hi()`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{domain, invalid, Result};
use crate::fncatalog::{check_abs_deriv_m_convex, ConvexityReport, Fn1D, OracleBudget};
use crate::quadrature::{integrate, DEFAULT_MAX_DEPTH, DEFAULT_TOL};

/// Absolute slack used when comparing a deviation with a bound.
pub const INEQUALITY_EPS: f64 = 1e-8;

/// The tuple `(a, b, x, m, q)` shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub m: f64,
    pub q: f64,
}

impl BoundParams {
    /// Checks `0 <= a < b`, `a <= x <= b`, `0 < m <= 1` and `q >= 1`.
    pub fn new(a: f64, b: f64, x: f64, m: f64, q: f64) -> Result<Self> {
        check_interval(a, b)?;
        if !(x >= a && x <= b) {
            return Err(invalid(format!("x must lie in [a, b] = [{a}, {b}], got {x}")));
        }
        check_m(m)?;
        if !(q.is_finite() && q >= 1.0) {
            return Err(invalid(format!("q must be >= 1, got {q}")));
        }
        Ok(BoundParams { a, b, x, m, q })
    }

    /// Parameters with `x` at the midpoint of `[a, b]`.
    pub fn midpoint(a: f64, b: f64, m: f64, q: f64) -> Result<Self> {
        Self::new(a, b, 0.5 * (a + b), m, q)
    }

    /// Hölder conjugate `q / (q - 1)`, defined only for `q > 1`.
    pub fn p(&self) -> Option<f64> {
        conjugate(self.q)
    }
}

fn conjugate(q: f64) -> Option<f64> {
    (q > 1.0).then(|| q / (q - 1.0))
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || a >= b {
        return Err(invalid(format!("need 0 <= a < b, got a = {a}, b = {b}")));
    }
    Ok(())
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(invalid(format!("m must lie in (0, 1], got {m}")));
    }
    Ok(())
}

fn check_covers(f: &Fn1D, u: f64, what: &str) -> Result<()> {
    if f.covers(u) {
        Ok(())
    } else {
        Err(domain(format!(
            "{what} = {u} lies outside the domain [0, {}] of {}",
            f.domain_hi(),
            f.label()
        )))
    }
}

/// Validates everything a derivative bound needs: the interval, `m`, and
/// that `f'` can be read at `b/m`.
fn check_bound_domain(f: &Fn1D, a: f64, b: f64, m: f64) -> Result<()> {
    check_interval(a, b)?;
    check_m(m)?;
    check_covers(f, b / m, "b/m")
}

fn integral_mean(f: &Fn1D, a: f64, b: f64, tol: f64) -> Result<f64> {
    let width = b - a;
    let est = integrate(|u| f.value(u), a, b, tol * width, DEFAULT_MAX_DEPTH)?;
    Ok(est.require_converged()? / width)
}

/// The deviation functional `D(x)`. `tol` bounds the error of the integral mean.
pub fn lhs_general(f: &Fn1D, a: f64, b: f64, x: f64, tol: f64) -> Result<f64> {
    check_interval(a, b)?;
    if !(x >= a && x <= b) {
        return Err(invalid(format!("x must lie in [a, b] = [{a}, {b}], got {x}")));
    }
    check_covers(f, b, "b")?;
    let mean = integral_mean(f, a, b, tol)?;
    Ok(((b - x) * f.value(b) + (x - a) * f.value(a)) / (b - a) - mean)
}

/// Which sign convention to use for the `t`-weights of the integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentitySigns {
    /// `(t - 1)` on the `a`-chord, `(1 - t)` on the `b`-chord; equals `D(x)`.
    Corrected,
    /// `(1 - t)` on the `a`-chord, `(t - 1)` on the `b`-chord; equals `-D(x)`.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides of the integration-by-parts identity for `D(x)`:
///
/// ```text
/// D(x) = (x-a)^2/(b-a) int_0^1 (t-1) f'(t x + (1-t) a) dt
///      + (b-x)^2/(b-a) int_0^1 (1-t) f'(t x + (1-t) b) dt
/// ```
///
/// The left side integrates `f`, the right side integrates `f'`, so the
/// residual is an independent consistency check of the two paths.
pub fn identity_sides(
    f: &Fn1D,
    a: f64,
    b: f64,
    x: f64,
    tol: f64,
    signs: IdentitySigns,
) -> Result<IdentitySides> {
    let lhs = lhs_general(f, a, b, x, tol)?;
    let width = b - a;
    let wa = (x - a) * (x - a) / width;
    let wb = (b - x) * (b - x) / width;
    let sign_a = match signs {
        IdentitySigns::Corrected => 1.0,
        IdentitySigns::Swapped => -1.0,
    };
    let chord = |w: f64, end: f64, sign: f64| -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        let est = integrate(
            |t| sign * (t - 1.0) * f.deriv(t * x + (1.0 - t) * end),
            0.0,
            1.0,
            0.5 * tol / w.max(1.0),
            DEFAULT_MAX_DEPTH,
        )?;
        Ok(w * est.require_converged()?)
    };
    let rhs = chord(wa, a, sign_a)? + chord(wb, b, -sign_a)?;
    Ok(IdentitySides {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `|D(x) - R|` where `R` is the right side of the identity with corrected signs.
pub fn lemma1_residual(f: &Fn1D, a: f64, b: f64, x: f64, tol: f64) -> Result<f64> {
    Ok(identity_sides(f, a, b, x, tol, IdentitySigns::Corrected)?.residual)
}

fn abs_d(f: &Fn1D, u: f64) -> f64 {
    f.deriv(u).abs()
}

fn abs_d_pow(f: &Fn1D, u: f64, q: f64) -> f64 {
    f.deriv(u).abs().powf(q)
}

/// Bound for m-convex `|f'|`:
/// `(x-a)^2/(b-a) (|f'(x)| + 2m|f'(a/m)|)/6 + (b-x)^2/(b-a) (|f'(x)| + 2m|f'(b/m)|)/6`.
pub fn bound_thm3(f: &Fn1D, params: &BoundParams) -> Result<f64> {
    let BoundParams { a, b, x, m, .. } = *params;
    check_bound_domain(f, a, b, m)?;
    let (wa, wb) = chord_weights(params);
    let dx = abs_d(f, x);
    Ok(wa * (dx + 2.0 * m * abs_d(f, a / m)) / 6.0 + wb * (dx + 2.0 * m * abs_d(f, b / m)) / 6.0)
}

fn chord_weights(params: &BoundParams) -> (f64, f64) {
    let BoundParams { a, b, x, .. } = *params;
    ((x - a) * (x - a) / (b - a), (b - x) * (b - x) / (b - a))
}

/// Hölder-route bound for m-convex `|f'|^q`, `q > 1`:
/// `(1/(p+1))^(1/p) [ (x-a)^2/(b-a) ((|f'(x)|^q + m|f'(a/m)|^q)/2)^(1/q) + (b-x)^2/(b-a) (...b/m...)^(1/q) ]`.
pub fn bound_thm4(f: &Fn1D, params: &BoundParams) -> Result<f64> {
    let BoundParams { a, b, x, m, q } = *params;
    let p = conjugate(q).ok_or_else(|| invalid(format!("the Hölder bound needs q > 1, got {q}")))?;
    check_bound_domain(f, a, b, m)?;
    let (wa, wb) = chord_weights(params);
    let dx = abs_d_pow(f, x, q);
    let side = |end: f64| ((dx + m * abs_d_pow(f, end / m, q)) / 2.0).powf(1.0 / q);
    Ok(holder_factor(p) * (wa * side(a) + wb * side(b)))
}

fn holder_factor(p: f64) -> f64 {
    (1.0 / (p + 1.0)).powf(1.0 / p)
}

/// Power-mean bound for m-convex `|f'|^q`, `q >= 1`:
/// `(x-a)^2/(2(b-a)) ((|f'(x)|^q + 2m|f'(a/m)|^q)/3)^(1/q) + (b-x)^2/(2(b-a)) (...b/m...)^(1/q)`.
pub fn bound_thm5(f: &Fn1D, params: &BoundParams) -> Result<f64> {
    let BoundParams { a, b, x, m, q } = *params;
    if !(q.is_finite() && q >= 1.0) {
        return Err(invalid(format!("the power-mean bound needs q >= 1, got {q}")));
    }
    check_bound_domain(f, a, b, m)?;
    let (wa, wb) = chord_weights(params);
    let dx = abs_d_pow(f, x, q);
    let side = |end: f64| ((dx + 2.0 * m * abs_d_pow(f, end / m, q)) / 3.0).powf(1.0 / q);
    Ok(0.5 * (wa * side(a) + wb * side(b)))
}

/// Midpoint form of [`bound_thm3`]:
/// `(b-a)/12 [ |f'((a+b)/2)| + m|f'(a/m)| + m|f'(b/m)| ]`.
pub fn bound_cor1(f: &Fn1D, a: f64, b: f64, m: f64) -> Result<f64> {
    check_bound_domain(f, a, b, m)?;
    let mid = 0.5 * (a + b);
    Ok((b - a) / 12.0 * (abs_d(f, mid) + m * abs_d(f, a / m) + m * abs_d(f, b / m)))
}

/// Midpoint form of [`bound_thm4`], `q > 1`.
pub fn bound_cor2(f: &Fn1D, a: f64, b: f64, m: f64, q: f64) -> Result<f64> {
    let p = conjugate(q).ok_or_else(|| invalid(format!("the Hölder bound needs q > 1, got {q}")))?;
    check_bound_domain(f, a, b, m)?;
    let dmid = abs_d_pow(f, 0.5 * (a + b), q);
    let side = |end: f64| ((dmid + m * abs_d_pow(f, end / m, q)) / 2.0).powf(1.0 / q);
    Ok(holder_factor(p) * (b - a) / 4.0 * (side(a) + side(b)))
}

/// The relaxed `m = 1` midpoint Hölder bound with the `(1/(p+1))^(1/p)`
/// factor replaced by 1:
/// `(b-a)/4 [ ((|f'(mid)|^q + |f'(a)|^q)/2)^(1/q) + ((|f'(mid)|^q + |f'(b)|^q)/2)^(1/q) ]`.
/// Always at least [`bound_cor2`] with `m = 1`.
pub fn bound_cor2_relaxed(f: &Fn1D, a: f64, b: f64, q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid(format!("the Hölder bound needs q > 1, got {q}")));
    }
    check_bound_domain(f, a, b, 1.0)?;
    let dmid = abs_d_pow(f, 0.5 * (a + b), q);
    let side = |end: f64| ((dmid + abs_d_pow(f, end, q)) / 2.0).powf(1.0 / q);
    Ok((b - a) / 4.0 * (side(a) + side(b)))
}

/// Midpoint form of [`bound_thm5`]:
/// `(b-a)/8 [ ((|f'(mid)|^q + 2m|f'(a/m)|^q)/3)^(1/q) + ((|f'(mid)|^q + 2m|f'(b/m)|^q)/3)^(1/q) ]`.
pub fn bound_cor3(f: &Fn1D, a: f64, b: f64, m: f64, q: f64) -> Result<f64> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(invalid(format!("the power-mean bound needs q >= 1, got {q}")));
    }
    check_bound_domain(f, a, b, m)?;
    let dmid = abs_d_pow(f, 0.5 * (a + b), q);
    let side = |end: f64| ((dmid + 2.0 * m * abs_d_pow(f, end / m, q)) / 3.0).powf(1.0 / q);
    Ok((b - a) / 8.0 * (side(a) + side(b)))
}

/// Trapezoid error bound for convex `|f'|`:
/// `(b-a)/12 [ |f'((a+b)/2)| + |f'(a)| + |f'(b)| ]`.
pub fn trapezoid_bound_convex_deriv(f: &Fn1D, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    check_covers(f, b, "b")?;
    let mid = 0.5 * (a + b);
    Ok((b - a) / 12.0 * (abs_d(f, mid) + abs_d(f, a) + abs_d(f, b)))
}

/// Trapezoid error bound for convex `|f'|^q`, `q >= 1`:
/// `(b-a)/8 [ ((|f'(mid)|^q + 2|f'(a)|^q)/3)^(1/q) + ((|f'(mid)|^q + 2|f'(b)|^q)/3)^(1/q) ]`.
pub fn trapezoid_bound_convex_deriv_pow(f: &Fn1D, a: f64, b: f64, q: f64) -> Result<f64> {
    check_interval(a, b)?;
    check_covers(f, b, "b")?;
    if !(q.is_finite() && q >= 1.0) {
        return Err(invalid(format!("q must be >= 1, got {q}")));
    }
    let dmid = abs_d_pow(f, 0.5 * (a + b), q);
    let da = abs_d_pow(f, a, q);
    let db = abs_d_pow(f, b, q);
    Ok((b - a) / 8.0 * (((dmid + 2.0 * da) / 3.0).powf(1.0 / q) + ((dmid + 2.0 * db) / 3.0).powf(1.0 / q)))
}

/// Gaps of the classical two-sided inequality
/// `f(mid) <= mean(f) <= (f(a) + f(b)) / 2`, returned as
/// `(mean - f(mid), (f(a) + f(b))/2 - mean)`. Both are nonnegative for convex `f`.
pub fn classical_hh_gap(f: &Fn1D, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    check_interval(a, b)?;
    check_covers(f, b, "b")?;
    let mean = integral_mean(f, a, b, tol)?;
    let left = mean - f.value(0.5 * (a + b));
    let right = 0.5 * (f.value(a) + f.value(b)) - mean;
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundName {
    T3,
    T4,
    T5,
}

impl BoundName {
    pub const ALL: [BoundName; 3] = [BoundName::T3, BoundName::T4, BoundName::T5];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::T3 => "t3",
            BoundName::T4 => "t4",
            BoundName::T5 => "t5",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Margin by which a deviation must exceed a bound to count as a violation.
pub fn violation_margin(bound: f64) -> f64 {
    INEQUALITY_EPS.max(1e-6 * bound.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tol: f64,
    pub oracle: OracleBudget,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tol: DEFAULT_TOL,
            oracle: OracleBudget::default(),
        }
    }
}

/// Everything known about one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct HHReport {
    pub lhs_abs: f64,
    pub bound_t3: Option<f64>,
    /// Absent when `q = 1`.
    pub bound_t4: Option<f64>,
    pub bound_t5: Option<f64>,
    pub classical_left_gap: f64,
    pub classical_right_gap: f64,
    /// Oracle for `|f'|` on `[0, b/m]`; gates `t3`.
    pub precondition_t3: ConvexityReport,
    /// Oracle for `|f'|^q` on `[0, b/m]`; gates `t4` and `t5`.
    pub precondition_t45: ConvexityReport,
    pub tightness: BTreeMap<BoundName, f64>,
    /// Bounds at or below `INEQUALITY_EPS` while the deviation is above it.
    pub vacuous: Vec<BoundName>,
    pub lemma1_residual: f64,
    /// Component failures; the affected values are NaN.
    pub errors: Vec<String>,
}

impl HHReport {
    pub fn bound(&self, name: BoundName) -> Option<f64> {
        match name {
            BoundName::T3 => self.bound_t3,
            BoundName::T4 => self.bound_t4,
            BoundName::T5 => self.bound_t5,
        }
    }

    /// Whether the oracle certified the precondition of `name`.
    pub fn applicable(&self, name: BoundName) -> bool {
        match name {
            BoundName::T3 => self.precondition_t3.holds,
            BoundName::T4 | BoundName::T5 => self.precondition_t45.holds,
        }
    }

    /// Certified bounds that the deviation exceeds by more than [`violation_margin`].
    pub fn violations(&self) -> Vec<(BoundName, f64, f64)> {
        BoundName::ALL
            .into_iter()
            .filter(|&k| self.applicable(k))
            .filter_map(|k| self.bound(k).map(|v| (k, v)))
            .filter_map(|(k, bound)| {
                let gap = self.lhs_abs - bound;
                (gap > violation_margin(bound)).then_some((k, bound, gap))
            })
            .collect()
    }
}

/// Runs both precondition oracles on `[0, b/m]`, the deviation, every
/// applicable bound, the identity residual and the classical gaps.
///
/// Bounds are computed even when their precondition fails; use
/// [`HHReport::applicable`] to tell them apart. Quadrature failures are
/// recorded in `errors` instead of aborting.
pub fn full_report(f: &Fn1D, params: &BoundParams, opts: &ReportOptions) -> Result<HHReport> {
    let BoundParams { a, b, x, m, q } = *params;
    let params = BoundParams::new(a, b, x, m, q)?;
    check_bound_domain(f, a, b, m)?;
    let hi = (b / m).min(f.domain_hi());

    let precondition_t3 = check_abs_deriv_m_convex(f, 1.0, m, hi, opts.oracle)?;
    let precondition_t45 = if q == 1.0 {
        precondition_t3.clone()
    } else {
        check_abs_deriv_m_convex(f, q, m, hi, opts.oracle)?
    };

    let mut errors = Vec::new();
    let mut record = |what: &str, r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            f64::NAN
        }
    };

    let lhs_abs = record("lhs", lhs_general(f, a, b, x, opts.tol).map(f64::abs));
    let lemma1_residual = record("identity", lemma1_residual(f, a, b, x, opts.tol));
    let (classical_left_gap, classical_right_gap) = match classical_hh_gap(f, a, b, opts.tol) {
        Ok(g) => g,
        Err(e) => {
            errors.push(format!("classical gap: {e}"));
            (f64::NAN, f64::NAN)
        }
    };

    let bound_t3 = Some(bound_thm3(f, &params)?);
    let bound_t4 = if q > 1.0 { Some(bound_thm4(f, &params)?) } else { None };
    let bound_t5 = Some(bound_thm5(f, &params)?);

    let mut tightness = BTreeMap::new();
    let mut vacuous = Vec::new();
    for (name, bound) in [(BoundName::T3, bound_t3), (BoundName::T4, bound_t4), (BoundName::T5, bound_t5)] {
        let Some(bound) = bound else { continue };
        if lhs_abs.is_nan() {
            continue;
        }
        if bound > INEQUALITY_EPS {
            tightness.insert(name, lhs_abs / bound);
        } else if lhs_abs <= INEQUALITY_EPS {
            tightness.insert(name, 0.0);
        } else {
            vacuous.push(name);
        }
    }

    Ok(HHReport {
        lhs_abs,
        bound_t3,
        bound_t4,
        bound_t5,
        classical_left_gap,
        classical_right_gap,
        precondition_t3,
        precondition_t45,
        tightness,
        vacuous,
        lemma1_residual,
        errors,
    })
}
