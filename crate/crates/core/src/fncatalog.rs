//! Test-function catalog and the sampled m-convexity oracle.
//!
//! Every function in the catalog has a closed-form derivative, so the bound
//! evaluators can read `|f'|` at isolated points such as `a/m` and `b/m`
//! without numeric differentiation.
//!
//! A function `g` on `[0, hi]` is m-convex when
//! `g(t x + m (1 - t) y) <= t g(x) + m (1 - t) g(y)` for all `x, y` in the
//! interval and `t` in `[0, 1]`. The oracle samples that inequality on a
//! lattice plus seeded random triples; a `holds` verdict is a sampled
//! certificate, not a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, invalid, Error, Result};

/// Closed-form function families. Serialized as an internally tagged JSON
/// object, e.g. `{"kind":"power","n":3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FnKind {
    /// `u^n`, `n >= 1`.
    Power { n: f64 },
    /// `c * u^n`, `n >= 1`.
    ScaledPower { c: f64, n: f64 },
    /// `sum_k coeffs[k] * u^k`.
    #[serde(alias = "poly")]
    Polynomial { coeffs: Vec<f64> },
    /// `scale * exp(rate * u)`.
    #[serde(alias = "exp")]
    Exponential {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    #[serde(alias = "const")]
    Constant { c: f64 },
}

fn one() -> f64 {
    1.0
}

fn pow(u: f64, n: f64) -> f64 {
    if n.fract() == 0.0 && n.abs() <= i32::MAX as f64 {
        u.powi(n as i32)
    } else {
        u.powf(n)
    }
}

impl FnKind {
    pub fn value(&self, u: f64) -> f64 {
        match self {
            FnKind::Power { n } => pow(u, *n),
            FnKind::ScaledPower { c, n } => c * pow(u, *n),
            FnKind::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c),
            FnKind::Exponential { scale, rate } => scale * (rate * u).exp(),
            FnKind::Constant { c } => *c,
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        match self {
            FnKind::Power { n } => n * pow(u, n - 1.0),
            FnKind::ScaledPower { c, n } => c * n * pow(u, n - 1.0),
            FnKind::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * u + k as f64 * c),
            FnKind::Exponential { scale, rate } => scale * rate * (rate * u).exp(),
            FnKind::Constant { .. } => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{what} must be finite")))
            }
        };
        match self {
            FnKind::Power { n } => {
                finite(*n, "exponent")?;
                if *n < 1.0 {
                    return Err(invalid(format!("power exponent must be >= 1, got {n}")));
                }
            }
            FnKind::ScaledPower { c, n } => {
                finite(*c, "scale")?;
                finite(*n, "exponent")?;
                if *n < 1.0 {
                    return Err(invalid(format!("power exponent must be >= 1, got {n}")));
                }
            }
            FnKind::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(invalid("polynomial needs at least one coefficient"));
                }
                for c in coeffs {
                    finite(*c, "polynomial coefficient")?;
                }
            }
            FnKind::Exponential { scale, rate } => {
                finite(*scale, "scale")?;
                finite(*rate, "rate")?;
            }
            FnKind::Constant { c } => finite(*c, "constant")?,
        }
        Ok(())
    }

    fn default_label(&self) -> String {
        match self {
            FnKind::Power { n } => format!("u^{n}"),
            FnKind::ScaledPower { c, n } => format!("{c}*u^{n}"),
            FnKind::Polynomial { coeffs } => {
                let terms: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("poly[{}]", terms.join(","))
            }
            FnKind::Exponential { scale, rate } => format!("{scale}*exp({rate}*u)"),
            FnKind::Constant { c } => format!("const {c}"),
        }
    }
}

/// Inline shorthand: `power:<n>`, `poly:<c0,c1,...>`, `exp`, `const:<c>`.
impl FromStr for FnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s, None),
        };
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("cannot parse number {v:?} in function shorthand {s:?}")))
        };
        let arg = || rest.ok_or_else(|| invalid(format!("function shorthand {s:?} needs an argument")));
        match head {
            "power" => Ok(FnKind::Power { n: num(arg()?)? }),
            "poly" | "polynomial" => {
                let coeffs = arg()?.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Ok(FnKind::Polynomial { coeffs })
            }
            "exp" => match rest {
                None => Ok(FnKind::Exponential { scale: 1.0, rate: 1.0 }),
                Some(r) => Ok(FnKind::Exponential { scale: 1.0, rate: num(r)? }),
            },
            "const" | "constant" => Ok(FnKind::Constant { c: num(arg()?)? }),
            _ => Err(invalid(format!("unknown function shorthand {s:?}"))),
        }
    }
}

/// JSON description of a catalog function, e.g. `{"kind":"power","n":3,"domain_hi":4.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnSpec {
    #[serde(flatten)]
    pub kind: FnKind,
    pub domain_hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FnSpec {
    pub fn build(&self) -> Result<Fn1D> {
        let f = Fn1D::new(self.kind.clone(), self.domain_hi)?;
        Ok(match &self.label {
            Some(l) => f.with_label(l.clone()),
            None => f,
        })
    }
}

/// A scalar function with exact derivative, evaluable on `[0, domain_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fn1D {
    kind: FnKind,
    domain_hi: f64,
    label: String,
}

const DERIV_CHECK_POINTS: usize = 100;
const DERIV_CHECK_RTOL: f64 = 1e-6;

impl Fn1D {
    /// Builds a catalog function and runs the finiteness and
    /// derivative-consistency checks over `[0, domain_hi]`.
    pub fn new(kind: FnKind, domain_hi: f64) -> Result<Self> {
        if !(domain_hi.is_finite() && domain_hi > 0.0) {
            return Err(invalid(format!("domain_hi must be finite and > 0, got {domain_hi}")));
        }
        kind.validate()?;
        let label = kind.default_label();
        let f = Fn1D { kind, domain_hi, label };
        f.check_finite()?;
        f.check_derivative_consistency()?;
        Ok(f)
    }

    pub fn power(n: f64, domain_hi: f64) -> Result<Self> {
        Self::new(FnKind::Power { n }, domain_hi)
    }

    pub fn constant(c: f64, domain_hi: f64) -> Result<Self> {
        Self::new(FnKind::Constant { c }, domain_hi)
    }

    pub fn polynomial(coeffs: impl Into<Vec<f64>>, domain_hi: f64) -> Result<Self> {
        Self::new(FnKind::Polynomial { coeffs: coeffs.into() }, domain_hi)
    }

    pub fn exponential(domain_hi: f64) -> Result<Self> {
        Self::new(FnKind::Exponential { scale: 1.0, rate: 1.0 }, domain_hi)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiplies the function by `c` (used for homogeneity checks).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let kind = match &self.kind {
            FnKind::Power { n } => FnKind::ScaledPower { c, n: *n },
            FnKind::ScaledPower { c: c0, n } => FnKind::ScaledPower { c: c0 * c, n: *n },
            FnKind::Polynomial { coeffs } => FnKind::Polynomial {
                coeffs: coeffs.iter().map(|k| k * c).collect(),
            },
            FnKind::Exponential { scale, rate } => FnKind::Exponential { scale: scale * c, rate: *rate },
            FnKind::Constant { c: c0 } => FnKind::Constant { c: c0 * c },
        };
        Self::new(kind, self.domain_hi)
    }

    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        self.kind.value(u)
    }

    #[inline]
    pub fn deriv(&self, u: f64) -> f64 {
        self.kind.deriv(u)
    }

    pub fn kind(&self) -> &FnKind {
        &self.kind
    }

    pub fn domain_hi(&self) -> f64 {
        self.domain_hi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> FnSpec {
        FnSpec {
            kind: self.kind.clone(),
            domain_hi: self.domain_hi,
            label: Some(self.label.clone()),
        }
    }

    /// True when `u` lies in `[0, domain_hi]`, allowing a few ulps above the
    /// top so that quotients like `b / m` that should land on `domain_hi` pass.
    pub fn covers(&self, u: f64) -> bool {
        u >= 0.0 && u <= self.domain_hi * (1.0 + 4.0 * f64::EPSILON)
    }

    fn check_finite(&self) -> Result<()> {
        let n = 4 * DERIV_CHECK_POINTS;
        for i in 0..=n {
            let u = self.domain_hi * i as f64 / n as f64;
            let (v, d) = (self.value(u), self.deriv(u));
            if !v.is_finite() || !d.is_finite() {
                return Err(invalid(format!(
                    "{} is not finite at u = {u} (f = {v}, f' = {d})",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Compares `f'` with a central difference at uniformly spaced interior points.
    pub fn check_derivative_consistency(&self) -> Result<()> {
        let hi = self.domain_hi;
        for i in 0..DERIV_CHECK_POINTS {
            let u = hi * (i as f64 + 0.5) / DERIV_CHECK_POINTS as f64;
            let h = (1e-5 * u.max(1.0)).min(0.25 * hi / DERIV_CHECK_POINTS as f64);
            let fd = (self.value(u + h) - self.value(u - h)) / (2.0 * h);
            let d = self.deriv(u);
            if (fd - d).abs() > DERIV_CHECK_RTOL * d.abs().max(1.0) {
                return Err(invalid(format!(
                    "derivative of {} inconsistent at u = {u}: closed form {d}, central difference {fd}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Fn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [0, {}]", self.label, self.domain_hi)
    }
}

/// What the oracle was asked to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    F,
    AbsDeriv,
    AbsDerivPowQ,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::F => "f",
            Target::AbsDeriv => "abs_deriv",
            Target::AbsDerivPowQ => "abs_deriv_pow_q",
        }
    }
}

/// A sampled triple at which the defining inequality failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub holds: bool,
    /// The most violated sampled triple, if any violated beyond slack.
    pub witness: Option<Witness>,
    pub samples_checked: u64,
    pub m: f64,
    pub hi: f64,
    pub target: Target,
    pub q: f64,
}

/// Sampling effort for the oracle: a `grid_n^3` lattice plus `random_n`
/// seeded random triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub grid_n: usize,
    pub random_n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            grid_n: 48,
            random_n: 10_000,
            seed: 0,
        }
    }
}

impl OracleBudget {
    pub fn with_seed(self, seed: u64) -> Self {
        OracleBudget { seed, ..self }
    }
}

fn slack(rhs: f64) -> f64 {
    1e-12 * (1.0 + rhs.abs())
}

/// Samples `g(t x + m (1 - t) y) <= t g(x) + m (1 - t) g(y)` over `[0, hi]^2 x [0, 1]`.
/// Returns the worst violation (first one wins ties) and the number of triples checked.
fn sample_m_convexity<G>(g: G, m: f64, hi: f64, budget: OracleBudget) -> (Option<Witness>, u64)
where
    G: Fn(f64) -> f64,
{
    let mut worst: Option<Witness> = None;
    let mut checked = 0u64;
    let mut probe = |x: f64, y: f64, t: f64, gx: f64, gy: f64| {
        let lhs = g(t * x + m * (1.0 - t) * y);
        let rhs = t * gx + m * (1.0 - t) * gy;
        let gap = lhs - rhs;
        checked += 1;
        if gap > slack(rhs) && worst.map_or(true, |w| gap > w.gap) {
            worst = Some(Witness { x, y, t, lhs, rhs, gap });
        }
    };

    let n = budget.grid_n;
    let step = 1.0 / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| hi * i as f64 * step).collect();
    let values: Vec<f64> = nodes.iter().map(|&u| g(u)).collect();
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            for k in 0..n {
                probe(x, y, k as f64 * step, values[i], values[j]);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..budget.random_n {
        let x = rng.gen::<f64>() * hi;
        let y = rng.gen::<f64>() * hi;
        let t = rng.gen::<f64>();
        probe(x, y, t, g(x), g(y));
    }
    (worst, checked)
}

fn validate_oracle_args(f: &Fn1D, m: f64, hi: f64, budget: &OracleBudget) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(invalid(format!("m must lie in [0, 1], got {m}")));
    }
    if !(hi.is_finite() && hi > 0.0) {
        return Err(invalid(format!("oracle interval end must be > 0, got {hi}")));
    }
    if !f.covers(hi) {
        return Err(domain(format!(
            "oracle interval [0, {hi}] exceeds the domain [0, {}] of {}",
            f.domain_hi(),
            f.label()
        )));
    }
    if budget.grid_n < 2 {
        return Err(invalid(format!("grid_n must be >= 2, got {}", budget.grid_n)));
    }
    Ok(())
}

/// Sampled check that `f` itself is m-convex on `[0, hi]`.
pub fn check_m_convex(f: &Fn1D, m: f64, hi: f64, budget: OracleBudget) -> Result<ConvexityReport> {
    validate_oracle_args(f, m, hi, &budget)?;
    let (witness, samples_checked) = sample_m_convexity(|u| f.value(u), m, hi, budget);
    Ok(ConvexityReport {
        holds: witness.is_none(),
        witness,
        samples_checked,
        m,
        hi,
        target: Target::F,
        q: 1.0,
    })
}

/// Sampled check that `|f'|^q` is m-convex on `[0, hi]`; the precondition
/// of the derivative-based trapezoid bounds.
pub fn check_abs_deriv_m_convex(
    f: &Fn1D,
    q: f64,
    m: f64,
    hi: f64,
    budget: OracleBudget,
) -> Result<ConvexityReport> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(invalid(format!("q must be >= 1, got {q}")));
    }
    validate_oracle_args(f, m, hi, &budget)?;
    let (witness, samples_checked) = if q == 1.0 {
        sample_m_convexity(|u| f.deriv(u).abs(), m, hi, budget)
    } else {
        sample_m_convexity(|u| f.deriv(u).abs().powf(q), m, hi, budget)
    };
    Ok(ConvexityReport {
        holds: witness.is_none(),
        witness,
        samples_checked,
        m,
        hi,
        target: if q == 1.0 { Target::AbsDeriv } else { Target::AbsDerivPowQ },
        q,
    })
}
