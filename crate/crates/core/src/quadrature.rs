//! Adaptive Simpson quadrature with bisection.
//!
//! Each panel compares the coarse Simpson estimate with the sum of its two
//! halves; the panel is accepted when `|S_fine - S_coarse| / 15` is within its
//! share of the tolerance. The returned value carries the Richardson
//! correction, and the error estimate is the sum of the accepted panels'
//! `|S_fine - S_coarse| / 15`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: u64,
    /// False when some panel hit `max_depth` before meeting its tolerance.
    pub converged: bool,
}

impl QuadratureEstimate {
    /// The value, or [`Error::NoConvergence`] if the estimate is not trusted.
    pub fn require_converged(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence {
                estimate: self.value,
                error_estimate: self.abs_error_estimate,
            })
        }
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(lo: f64, hi: f64, f_lo: f64, f_mid: f64, f_hi: f64) -> f64 {
    (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
}

/// Integrates `g` over `[lo, hi]` to absolute tolerance `tol`.
///
/// A non-finite sample is a hard error. Exhausting `max_depth` is reported
/// through `converged = false` with the best estimate still returned.
pub fn integrate<G>(g: G, lo: f64, hi: f64, tol: f64, max_depth: u32) -> Result<QuadratureEstimate>
where
    G: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(invalid(format!("integration limits must satisfy lo <= hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be > 0, got {tol}")));
    }
    if lo == hi {
        return Ok(QuadratureEstimate {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }

    let mut evaluations = 0u64;
    let mut eval = |u: f64| -> Result<f64> {
        evaluations += 1;
        let v = g(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteSample { at: u })
        }
    };

    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (eval(lo)?, eval(mid)?, eval(hi)?);
    let mut stack = vec![Panel {
        lo,
        hi,
        f_lo,
        f_mid,
        f_hi,
        whole: simpson(lo, hi, f_lo, f_mid, f_hi),
        tol,
        depth: 0,
    }];

    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    // LIFO with the right half pushed first keeps the summation order left to right.
    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.lo + p.hi);
        let lq = 0.5 * (p.lo + mid);
        let rq = 0.5 * (mid + p.hi);
        let (f_lq, f_rq) = (eval(lq)?, eval(rq)?);
        let left = simpson(p.lo, mid, p.f_lo, f_lq, p.f_mid);
        let right = simpson(mid, p.hi, p.f_mid, f_rq, p.f_hi);
        let diff = left + right - p.whole;
        let panel_err = diff.abs() / 15.0;
        let at_limit = p.depth + 1 >= max_depth;
        if panel_err <= p.tol || at_limit {
            if panel_err > p.tol {
                converged = false;
            }
            value += left + right + diff / 15.0;
            err += panel_err;
        } else {
            let half_tol = 0.5 * p.tol;
            stack.push(Panel {
                lo: mid,
                hi: p.hi,
                f_lo: p.f_mid,
                f_mid: f_rq,
                f_hi: p.f_hi,
                whole: right,
                tol: half_tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                lo: p.lo,
                hi: mid,
                f_lo: p.f_lo,
                f_mid: f_lq,
                f_hi: p.f_mid,
                whole: left,
                tol: half_tol,
                depth: p.depth + 1,
            });
        }
    }

    Ok(QuadratureEstimate {
        value,
        abs_error_estimate: err,
        evaluations,
        converged: converged && err <= tol,
    })
}

/// [`integrate`] with the default tolerance and depth.
pub fn integrate_default<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Result<QuadratureEstimate> {
    integrate(g, lo, hi, DEFAULT_TOL, DEFAULT_MAX_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_on_unit_interval() {
        let q = integrate(|u| u * u, 0.0, 1.0, 1e-10, 40).unwrap();
        assert!(q.converged);
        assert!((q.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(q.evaluations, 5);
    }

    #[test]
    fn reciprocal_gives_ln2() {
        let q = integrate(|u| 1.0 / u, 1.0, 2.0, 1e-10, 40).unwrap();
        assert!(q.converged);
        assert!((q.value - std::f64::consts::LN_2).abs() <= q.abs_error_estimate.max(1e-12));
        assert!((q.value - 0.6931471806).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(|_| panic!("must not evaluate"), 2.0, 2.0, 1e-10, 40).unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(q.evaluations, 0);
        assert!(q.converged);
    }

    #[test]
    fn cubic_exact_on_one_panel() {
        let g = |u: f64| 3.0 * u * u * u - u * u + 2.0 * u - 5.0;
        let q = integrate(g, -1.0, 2.0, 1e-10, 40).unwrap();
        // antiderivative 3u^4/4 - u^3/3 + u^2 - 5u
        let anti = |u: f64| 0.75 * u.powi(4) - u.powi(3) / 3.0 + u * u - 5.0 * u;
        assert!((q.value - (anti(2.0) - anti(-1.0))).abs() < 1e-13);
        assert_eq!(q.evaluations, 5);
    }

    #[test]
    fn non_finite_sample_is_error() {
        let r = integrate(|u| 1.0 / u, 0.0, 1.0, 1e-10, 40);
        assert!(matches!(r, Err(Error::NonFiniteSample { at }) if at == 0.0));
    }

    #[test]
    fn depth_exhaustion_is_soft() {
        let q = integrate(|u| (50.0 * u).sin(), 0.0, 3.0, 1e-14, 3).unwrap();
        assert!(!q.converged);
        assert!(q.value.is_finite());
        assert!(matches!(q.require_converged(), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn bad_arguments() {
        assert!(integrate(|u| u, 1.0, 0.0, 1e-10, 40).is_err());
        assert!(integrate(|u| u, 0.0, 1.0, 0.0, 40).is_err());
    }

    #[test]
    fn exp_converges_within_estimate() {
        let q = integrate(f64::exp, 0.0, 3.0, 1e-10, 40).unwrap();
        let exact = 3f64.exp() - 1.0;
        assert!(q.converged);
        assert!(q.abs_error_estimate <= 1e-10);
        assert!((q.value - exact).abs() <= 1e-10);
    }
}
