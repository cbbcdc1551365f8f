//! Arithmetic, logarithmic and generalized logarithmic means, and the two
//! trapezoid-error inequalities they satisfy through `f(u) = u^n`.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Absolute slack for the closed-form `holds` verdicts.
pub const MEANS_EPS: f64 = 1e-9;

fn positive(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a positive real, got {v}")))
    }
}

pub fn arithmetic_mean(alpha: f64, beta: f64) -> Result<f64> {
    positive(alpha, "alpha")?;
    positive(beta, "beta")?;
    Ok(0.5 * (alpha + beta))
}

/// `(alpha - beta) / (ln alpha - ln beta)` for distinct positive arguments.
pub fn log_mean(alpha: f64, beta: f64) -> Result<f64> {
    positive(alpha, "alpha")?;
    positive(beta, "beta")?;
    if alpha == beta {
        return Err(invalid("logarithmic mean needs alpha != beta"));
    }
    Ok((alpha - beta) / (alpha.ln() - beta.ln()))
}

fn check_gen_log_args(alpha: f64, beta: f64, n: i32) -> Result<()> {
    positive(alpha, "alpha")?;
    positive(beta, "beta")?;
    if alpha == beta {
        return Err(invalid("generalized log-mean needs alpha != beta"));
    }
    if n == 0 || n == -1 {
        return Err(invalid(format!("generalized log-mean index must not be 0 or -1, got {n}")));
    }
    Ok(())
}

/// `L_n^n = (beta^(n+1) - alpha^(n+1)) / ((n+1)(beta - alpha))`, i.e. the mean
/// value of `u^n` over the interval between the arguments.
pub fn gen_log_mean_pow(alpha: f64, beta: f64, n: i32) -> Result<f64> {
    check_gen_log_args(alpha, beta, n)?;
    Ok((beta.powi(n + 1) - alpha.powi(n + 1)) / ((n + 1) as f64 * (beta - alpha)))
}

/// `L_n = [(beta^(n+1) - alpha^(n+1)) / ((n+1)(beta - alpha))]^(1/n)`, `n` not in `{-1, 0}`.
pub fn gen_log_mean(alpha: f64, beta: f64, n: i32) -> Result<f64> {
    Ok(gen_log_mean_pow(alpha, beta, n)?.powf(1.0 / n as f64))
}

/// Inputs to the two propositions. `q` is only read by [`prop2_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeansCase {
    pub a: f64,
    pub b: f64,
    pub n: i32,
    pub m: f64,
    pub q: f64,
}

impl MeansCase {
    /// Checks `0 < a < b`, `n >= 2`, `0 < m <= 1`.
    pub fn new(a: f64, b: f64, n: i32, m: f64, q: f64) -> Result<Self> {
        positive(a, "a")?;
        positive(b, "b")?;
        if a >= b {
            return Err(invalid(format!("need a < b, got a = {a}, b = {b}")));
        }
        if n < 2 {
            return Err(invalid(format!("power index n must be >= 2, got {n}")));
        }
        if !(m > 0.0 && m <= 1.0) {
            return Err(invalid(format!("m must lie in (0, 1], got {m}")));
        }
        if !q.is_finite() {
            return Err(invalid(format!("q must be finite, got {q}")));
        }
        Ok(MeansCase { a, b, n, m, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl PropCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        PropCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + MEANS_EPS,
        }
    }
}

/// `|A(a^n, b^n) - L_n^n(a, b)|`, the trapezoid error of `u^n` on `[a, b]`.
pub fn power_trapezoid_gap(a: f64, b: f64, n: i32) -> Result<f64> {
    let arith = arithmetic_mean(a.powi(n), b.powi(n))?;
    Ok((arith - gen_log_mean_pow(a, b, n)?).abs())
}

fn validated(case: &MeansCase) -> Result<MeansCase> {
    MeansCase::new(case.a, case.b, case.n, case.m, case.q)
}

/// `|A(a^n,b^n) - L_n^n(a,b)| <= n (b-a)/12 [ |(a+b)/2|^(n-1) + m|a/m|^(n-1) + m|b/m|^(n-1) ]`.
pub fn prop1_check(case: &MeansCase) -> Result<PropCheck> {
    let MeansCase { a, b, n, m, .. } = validated(case)?;
    let lhs = power_trapezoid_gap(a, b, n)?;
    let k = n - 1;
    let mid = 0.5 * (a + b);
    let rhs = n as f64 * (b - a) / 12.0
        * (mid.abs().powi(k) + m * (a / m).abs().powi(k) + m * (b / m).abs().powi(k));
    Ok(PropCheck::new(lhs, rhs))
}

/// `|A(a^n,b^n) - L_n^n(a,b)| <= n (b-a)/8 ( [ (|mid|^(q(n-1)) + 2m|a/m|^(q(n-1)))/3 ]^(1/q) + [ ...b/m... ]^(1/q) )`, `q > 1`.
pub fn prop2_check(case: &MeansCase) -> Result<PropCheck> {
    let MeansCase { a, b, n, m, q } = validated(case)?;
    if q <= 1.0 {
        return Err(invalid(format!("q must exceed 1, got {q}")));
    }
    let lhs = power_trapezoid_gap(a, b, n)?;
    let e = q * (n - 1) as f64;
    let mid = (0.5 * (a + b)).abs().powf(e);
    let side = |end: f64| ((mid + 2.0 * m * (end / m).abs().powf(e)) / 3.0).powf(1.0 / q);
    let rhs = n as f64 * (b - a) / 8.0 * (side(a) + side(b));
    Ok(PropCheck::new(lhs, rhs))
}

/// The ordering `L(alpha, beta) <= A(alpha, beta)` for one pair.
pub fn log_mean_below_arithmetic(alpha: f64, beta: f64) -> Result<bool> {
    Ok(log_mean(alpha, beta)? <= arithmetic_mean(alpha, beta)? * (1.0 + 1e-15))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn arithmetic() {
        assert_eq!(arithmetic_mean(2.0, 4.0).unwrap(), 3.0);
        assert_eq!(arithmetic_mean(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(arithmetic_mean(1.0, 4.0).unwrap(), 2.5);
        assert!(arithmetic_mean(0.0, 1.0).is_err());
    }

    #[test]
    fn logarithmic() {
        let e = std::f64::consts::E;
        assert!(close(log_mean(1.0, e).unwrap(), e - 1.0, 1e-15));
        assert!(close(log_mean(1.0, 4.0).unwrap(), 3.0 / 4f64.ln(), 1e-15));
        assert!(close(log_mean(1.0, 4.0).unwrap(), 2.1640425, 1e-7));
        assert!(log_mean(2.0, 2.0).is_err());
        assert!(log_mean(-1.0, 2.0).is_err());
    }

    #[test]
    fn generalized_log() {
        for (x, y) in [(1.0, 2.0), (0.3, 5.0), (7.0, 2.5)] {
            assert!(close(gen_log_mean(x, y, 1).unwrap(), arithmetic_mean(x, y).unwrap(), 1e-14));
        }
        assert!(close(gen_log_mean(1.0, 2.0, 2).unwrap(), (7.0f64 / 3.0).sqrt(), 1e-15));
        assert!(close(gen_log_mean(1.0, 2.0, 2).unwrap(), 1.5275252, 1e-7));
        assert!(gen_log_mean(1.0, 2.0, 0).is_err());
        assert!(gen_log_mean(1.0, 2.0, -1).is_err());
        // n = -2: ((1/b - 1/a) / (-(b - a)))^(-1/2) = sqrt(a b), the geometric mean
        assert!(close(gen_log_mean(1.0, 4.0, -2).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn prop1_golden() {
        let r = prop1_check(&MeansCase::new(1.0, 2.0, 2, 1.0, 2.0).unwrap()).unwrap();
        assert!(close(r.lhs, 1.0 / 6.0, 1e-15));
        assert!(close(r.rhs, 0.75, 1e-15));
        assert!(r.holds);
        let r = prop1_check(&MeansCase::new(1.0, 2.0, 2, 0.5, 2.0).unwrap()).unwrap();
        assert!(close(r.rhs, 0.75, 1e-15));
        assert!(r.holds);
    }

    #[test]
    fn prop1_shrinking_interval() {
        let r = prop1_check(&MeansCase::new(1.0, 1.0 + 1e-4, 3, 0.5, 2.0).unwrap()).unwrap();
        assert!(r.lhs < 1e-3 && r.rhs < 1e-3);
        assert!(r.holds);
    }

    #[test]
    fn prop2_golden() {
        let r = prop2_check(&MeansCase::new(1.0, 2.0, 2, 1.0, 2.0).unwrap()).unwrap();
        let expected = 0.25 * ((4.25f64 / 3.0).sqrt() + (10.25f64 / 3.0).sqrt());
        assert!(close(r.lhs, 1.0 / 6.0, 1e-15));
        assert!(close(r.rhs, expected, 1e-15));
        assert!(close(r.rhs, 0.759664, 1e-5));
        assert!(r.holds);
        assert!(prop2_check(&MeansCase::new(1.0, 2.0, 2, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn prop2_m_one_display_form() {
        let (a, b, n, q) = (0.7, 2.3, 3, 2.5);
        let r = prop2_check(&MeansCase::new(a, b, n, 1.0, q).unwrap()).unwrap();
        let e = q * (n - 1) as f64;
        let mid = (0.5 * (a + b)).powf(e);
        let display = n as f64 * (b - a) / 8.0
            * (((mid + 2.0 * a.powf(e)) / 3.0).powf(1.0 / q) + ((mid + 2.0 * b.powf(e)) / 3.0).powf(1.0 / q));
        assert!((r.rhs - display).abs() <= 1e-12 * display);
    }

    #[test]
    fn case_validation() {
        assert!(MeansCase::new(0.0, 2.0, 2, 1.0, 2.0).is_err());
        assert!(MeansCase::new(2.0, 1.0, 2, 1.0, 2.0).is_err());
        assert!(MeansCase::new(1.0, 2.0, 1, 1.0, 2.0).is_err());
        assert!(MeansCase::new(1.0, 2.0, -3, 1.0, 2.0).is_err());
        assert!(MeansCase::new(1.0, 2.0, 2, 0.0, 2.0).is_err());
    }

    #[test]
    fn log_mean_ordering() {
        assert!(log_mean_below_arithmetic(1.0, 4.0).unwrap());
        assert!(log_mean_below_arithmetic(9.0, 0.1).unwrap());
    }
}
