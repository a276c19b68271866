//! Right-hand-side catalog.
//!
//! Each family is evaluated through the weighted substitution
//! `x = u^{γ-1} z` and returned in factored form `g u^k` with `g`
//! continuous at `u = 0`. Because the families are explicit, the growth
//! exponent `k`, envelope `M` and Lipschitz constant `A` of the
//! hypotheses are available in closed form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::special::{gamma, gamma_ratio, mittag_leffler};

/// Stand-in Lipschitz constant for right-hand sides that do not depend on x.
pub const VACUOUS_LIPSCHITZ: f64 = 1e-300;

/// `f(t, x)` written in terms of `u = log(t/a)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RhsSpec {
    /// `c u^ν`
    PowerSource { c: f64, nu: f64 },
    /// `λ u^κ x`, κ >= 0
    LinearInLog { lambda: f64, kappa: f64 },
    /// `λ u^μ |x|^m`, m > 1
    PowerNonlinear { lambda: f64, mu: f64, m: f64 },
    /// Sum of catalog terms.
    Sum(Vec<RhsSpec>),
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, v, "a finite real"))
    }
}

impl RhsSpec {
    /// Parameter sanity checks. Growth exponents are not checked here;
    /// that is [`derive_hypotheses`]'s job.
    pub fn validate(&self) -> Result<()> {
        match self {
            RhsSpec::PowerSource { c, nu } => {
                finite("c", *c)?;
                finite("nu", *nu)
            }
            RhsSpec::LinearInLog { lambda, kappa } => {
                finite("lambda", *lambda)?;
                if !(*kappa >= 0.0) || !kappa.is_finite() {
                    return Err(Error::domain("kappa", *kappa, "kappa >= 0"));
                }
                Ok(())
            }
            RhsSpec::PowerNonlinear { lambda, mu, m } => {
                finite("lambda", *lambda)?;
                finite("mu", *mu)?;
                if !(*m > 1.0) || !m.is_finite() {
                    return Err(Error::domain("m", *m, "m > 1"));
                }
                Ok(())
            }
            RhsSpec::Sum(terms) => {
                if terms.is_empty() {
                    return Err(Error::domain("terms", 0.0, "at least one term"));
                }
                terms.iter().try_for_each(RhsSpec::validate)
            }
        }
    }

    /// Growth exponent `k` of `f(t, u^{γ-1} z) = g u^k`.
    pub fn exponent(&self, gamma: f64) -> f64 {
        match self {
            RhsSpec::PowerSource { nu, .. } => *nu,
            RhsSpec::LinearInLog { kappa, .. } => kappa + gamma - 1.0,
            RhsSpec::PowerNonlinear { mu, m, .. } => mu + m * (gamma - 1.0),
            RhsSpec::Sum(terms) => terms
                .iter()
                .map(|t| t.exponent(gamma))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Regular factor `g(u, z)` relative to `u^exponent`.
    fn factor(&self, u: f64, z: f64, gamma: f64, exponent: f64) -> f64 {
        match self {
            RhsSpec::Sum(terms) => terms.iter().map(|t| t.factor(u, z, gamma, exponent)).sum(),
            leaf => {
                let own = leaf.exponent(gamma);
                let g = match leaf {
                    RhsSpec::PowerSource { c, .. } => *c,
                    RhsSpec::LinearInLog { lambda, .. } => lambda * z,
                    RhsSpec::PowerNonlinear { lambda, m, .. } => lambda * libm::pow(libm::fabs(z), *m),
                    RhsSpec::Sum(_) => unreachable!(),
                };
                if own == exponent {
                    g
                } else {
                    g * libm::pow(u, own - exponent)
                }
            }
        }
    }

    /// `(g, k)` with `f(t, u^{γ-1} z) = g u^k`; for sums `k` is the
    /// smallest term exponent.
    pub fn eval_factored(&self, u: f64, z: f64, gamma: f64) -> (f64, f64) {
        let k = self.exponent(gamma);
        (self.factor(u, z, gamma, k), k)
    }

    /// Direct evaluation of `f(t, x)` at `u = log(t/a) > 0`.
    pub fn eval(&self, u: f64, x: f64) -> f64 {
        match self {
            RhsSpec::PowerSource { c, nu } => c * libm::pow(u, *nu),
            RhsSpec::LinearInLog { lambda, kappa } => lambda * libm::pow(u, *kappa) * x,
            RhsSpec::PowerNonlinear { lambda, mu, m } => {
                lambda * libm::pow(u, *mu) * libm::pow(libm::fabs(x), *m)
            }
            RhsSpec::Sum(terms) => terms.iter().map(|t| t.eval(u, x)).sum(),
        }
    }

    /// Whether `f` depends on x at all.
    pub fn depends_on_x(&self) -> bool {
        match self {
            RhsSpec::PowerSource { .. } => false,
            RhsSpec::LinearInLog { lambda, .. } | RhsSpec::PowerNonlinear { lambda, .. } => *lambda != 0.0,
            RhsSpec::Sum(terms) => terms.iter().any(RhsSpec::depends_on_x),
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            RhsSpec::PowerSource { c, nu } => format!("power_source(c={c}, nu={nu})"),
            RhsSpec::LinearInLog { lambda, kappa } => {
                format!("linear_in_log(lambda={lambda}, kappa={kappa})")
            }
            RhsSpec::PowerNonlinear { lambda, mu, m } => {
                format!("power_nonlinear(lambda={lambda}, mu={mu}, m={m})")
            }
            RhsSpec::Sum(terms) => {
                let parts: Vec<String> = terms.iter().map(RhsSpec::describe).collect();
                format!("sum[{}]", parts.join(", "))
            }
        }
    }
}

/// Free-function form of [`RhsSpec::eval_factored`].
pub fn eval_factored(spec: &RhsSpec, u: f64, z: f64, gamma: f64) -> (f64, f64) {
    spec.eval_factored(u, z, gamma)
}

/// Growth and Lipschitz constants on the box `|z - x0| <= b`, `u <= h`:
///
/// ```text
/// |f(t, u^{γ-1} z)|                       <= M u^k
/// |f(t, u^{γ-1} z1) - f(t, u^{γ-1} z2)|   <= A u^k |z1 - z2|
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub k: f64,
    pub m: f64,
    pub a: f64,
    /// `k > β(1-α) - 1` and `M` finite.
    pub valid_h1: bool,
    /// `A > 0` and finite.
    pub valid_h2: bool,
    /// `f` does not depend on x and `A` is [`VACUOUS_LIPSCHITZ`].
    pub lipschitz_vacuous: bool,
    /// Names the offending terms when `valid_h1` is false.
    pub violation: Option<String>,
}

impl Hypotheses {
    /// Error carrying the diagnostic when the growth hypothesis fails.
    pub fn require_h1(&self) -> Result<()> {
        if self.valid_h1 {
            Ok(())
        } else {
            Err(Error::Hypothesis(
                self.violation
                    .clone()
                    .unwrap_or_else(|| String::from("invalid constants")),
            ))
        }
    }

    pub fn require_h1_h2(&self) -> Result<()> {
        self.require_h1()?;
        if self.valid_h2 {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "Lipschitz constant A = {} is not usable",
                self.a
            )))
        }
    }
}

/// (k, M, A) of one leaf term.
fn leaf_constants(spec: &RhsSpec, gamma: f64, radius: f64) -> (f64, f64, f64) {
    let k = spec.exponent(gamma);
    match spec {
        RhsSpec::PowerSource { c, .. } => (k, libm::fabs(*c), 0.0),
        RhsSpec::LinearInLog { lambda, .. } => {
            let l = libm::fabs(*lambda);
            (k, l * radius, l)
        }
        RhsSpec::PowerNonlinear { lambda, m, .. } => {
            let l = libm::fabs(*lambda);
            (k, l * libm::pow(radius, *m), l * m * libm::pow(radius, m - 1.0))
        }
        RhsSpec::Sum(_) => unreachable!(),
    }
}

fn leaves<'a>(spec: &'a RhsSpec, out: &mut Vec<&'a RhsSpec>) {
    match spec {
        RhsSpec::Sum(terms) => terms.iter().for_each(|t| leaves(t, out)),
        leaf => out.push(leaf),
    }
}

/// Analytic growth and Lipschitz constants for `spec` attached to `problem`.
///
/// With `R = |x0| + b` bounding |z| on the box:
/// power source `k = ν, M = |c|`; linear `k = κ + γ - 1, M = |λ| R,
/// A = |λ|`; power nonlinearity `k = μ + m(γ - 1), M = |λ| R^m,
/// A = |λ| m R^{m-1}`. Sums take the smallest `k` and add the term
/// constants scaled by `h^{k_term - k}`.
pub fn derive_hypotheses(spec: &RhsSpec, problem: &Problem) -> Hypotheses {
    let gamma = problem.gamma();
    let radius = libm::fabs(problem.x0()) + problem.b();
    let floor = problem.k_floor();
    let mut terms = Vec::new();
    leaves(spec, &mut terms);
    let k = spec.exponent(gamma);
    let (mut m, mut a) = (0.0, 0.0);
    let mut bad = Vec::new();
    for t in &terms {
        let (kt, mt, at) = leaf_constants(t, gamma, radius);
        let lift = libm::pow(problem.h(), kt - k);
        m += mt * lift;
        a += at * lift;
        if !(kt > floor) {
            bad.push(format!(
                "{} has k = {kt} <= beta(1-alpha) - 1 = {floor}",
                t.describe()
            ));
        }
    }
    let valid_h1 = bad.is_empty() && m.is_finite();
    let lipschitz_vacuous = a == 0.0;
    if lipschitz_vacuous {
        a = VACUOUS_LIPSCHITZ;
    }
    let violation = if bad.is_empty() {
        if m.is_finite() {
            None
        } else {
            Some(String::from("envelope constant M is not finite"))
        }
    } else {
        Some(bad.join("; "))
    };
    Hypotheses {
        k,
        m,
        a,
        valid_h1,
        valid_h2: a > 0.0 && a.is_finite(),
        lipschitz_vacuous,
        violation,
    }
}

/// Analytic weighted solution `z*(u)` for the families that have one.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `x0 + coeff u^power`
    Power { x0: f64, coeff: f64, power: f64 },
    /// `x0 Γ(γ) E_{α,γ}(λ u^α)`
    MittagLeffler {
        x0: f64,
        alpha: f64,
        gamma: f64,
        lambda: f64,
    },
}

impl ClosedForm {
    pub fn eval(&self, u: f64) -> Result<f64> {
        match *self {
            ClosedForm::Power { x0, coeff, power } => Ok(x0 + coeff * libm::pow(u, power)),
            ClosedForm::MittagLeffler {
                x0,
                alpha,
                gamma: g,
                lambda,
            } => {
                if x0 == 0.0 {
                    return Ok(0.0);
                }
                let e = mittag_leffler(alpha, g, lambda * libm::pow(u, alpha))?;
                Ok(x0 * gamma(g)? * e.value)
            }
        }
    }
}

/// Closed-form weighted solution, when one exists:
/// power sources integrate in one step by the power-law identity, and the
/// linear family with κ = 0 sums to a Mittag-Leffler function.
pub fn closed_form_solution(spec: &RhsSpec, problem: &Problem) -> Option<ClosedForm> {
    let (alpha, gamma, x0) = (problem.alpha(), problem.gamma(), problem.x0());
    match *spec {
        RhsSpec::PowerSource { c, nu } if nu > -1.0 => Some(ClosedForm::Power {
            x0,
            coeff: c * gamma_ratio(nu + 1.0, alpha + nu + 1.0).ok()?,
            power: nu + alpha + 1.0 - gamma,
        }),
        RhsSpec::LinearInLog { lambda, kappa: 0.0 } => Some(ClosedForm::MittagLeffler {
            x0,
            alpha,
            gamma,
            lambda,
        }),
        _ => None,
    }
}
