//! Trapezoid-type error bounds for functions with m-convex derivatives.
//!
//! A function `g: [0, b] -> R` is *m-convex* (`m` in `[0, 1]`) when
//! `g(t x + m (1 - t) y) <= t g(x) + m (1 - t) g(y)`. If `|f'|` or `|f'|^q`
//! is m-convex, the deviation of a weighted-endpoint quadrature rule
//!
//! ```text
//! D(x) = ((b - x) f(b) + (x - a) f(a)) / (b - a) - 1/(b - a) * int_a^b f
//! ```
//!
//! is bounded in terms of `|f'(x)|`, `|f'(a/m)|` and `|f'(b/m)|`. This crate
//! evaluates those bounds, checks them numerically against adaptive
//! quadrature, and gates every check on a sampled m-convexity oracle.
//!
//! - [`fncatalog`]: closed-form test functions and the m-convexity oracle
//! - [`quadrature`]: adaptive Simpson integration
//! - [`hh_bounds`]: the deviation functional, the integral identity, the bounds
//! - [`means`]: arithmetic / logarithmic / generalized log means and the
//!   power-function inequalities
//! - [`harness`]: seeded parameter sweeps with JSON and CSV reports
//! - [`cli`]: the `mconvex` command line
//!
//! ```
//! use mconvex::{bound_cor1, lhs_general, Fn1D};
//!
//! let f = Fn1D::power(2.0, 1.0).unwrap();
//! let dev = lhs_general(&f, 0.0, 1.0, 0.5, 1e-10).unwrap();
//! let bound = bound_cor1(&f, 0.0, 1.0, 1.0).unwrap();
//! assert!((dev - 1.0 / 6.0).abs() < 1e-12);
//! assert!(dev <= bound);
//! ```

pub mod cli;
pub mod error;
pub mod fncatalog;
pub mod harness;
pub mod hh_bounds;
pub mod means;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use fncatalog::{
    check_abs_deriv_m_convex, check_m_convex, ConvexityReport, Fn1D, FnKind, FnSpec, OracleBudget, Target, Witness,
};
pub use harness::{compare_bounds, run_sweep, OrderingStats, SweepConfig, SweepReport, XPolicy};
pub use hh_bounds::{
    bound_cor1, bound_cor2, bound_cor2_relaxed, bound_cor3, bound_thm3, bound_thm4, bound_thm5, classical_hh_gap,
    full_report, identity_sides, lemma1_residual, lhs_general, trapezoid_bound_convex_deriv,
    trapezoid_bound_convex_deriv_pow, BoundName, BoundParams, HHReport, IdentitySigns, ReportOptions,
};
pub use means::{arithmetic_mean, gen_log_mean, log_mean, prop1_check, prop2_check, MeansCase, PropCheck};
pub use quadrature::{integrate, QuadratureEstimate};
