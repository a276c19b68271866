use crate::error::{Error, Result};
use crate::rhs::RhsSpec;

/// γ = α + β(1 - α), the order that fixes the initial singularity
/// `(log t)^{γ-1}`. Requires α ∈ (0, 1) and β ∈ [0, 1].
pub fn gamma_order(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "0 < alpha < 1"));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain("beta", beta, "0 <= beta <= 1"));
    }
    Ok(alpha + beta * (1.0 - alpha))
}

/// Initial value problem
///
/// ```text
/// D^{α,β} x(t) = f(t, x),   lim_{t→a} (log(t/a))^{1-γ} x(t) = x0
/// ```
///
/// posed on `log(t/a) ∈ (0, h]`, with the hypotheses checked on the box
/// `|z - x0| <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: f64,
    x0: f64,
    rhs: RhsSpec,
    h: f64,
    b: f64,
}

impl Problem {
    pub fn new(alpha: f64, beta: f64, a: f64, x0: f64, rhs: RhsSpec, h: f64, b: f64) -> Result<Self> {
        let gamma = gamma_order(alpha, beta)?;
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain("a", a, "a > 0"));
        }
        if !x0.is_finite() {
            return Err(Error::domain("x0", x0, "a finite real"));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain("h", h, "h > 0"));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::domain("b", b, "b > 0"));
        }
        rhs.validate()?;
        Ok(Problem {
            alpha,
            beta,
            gamma,
            a,
            x0,
            rhs,
            h,
            b,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Base point `a` of the log variable.
    pub fn base(&self) -> f64 {
        self.a
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn rhs(&self) -> &RhsSpec {
        &self.rhs
    }

    /// Log-domain cap.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Half-width of the box `|z - x0| <= b`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// μ = 1 - β(1 - α); the existence radius exponent is `1/(μ + k)`.
    pub fn mu(&self) -> f64 {
        1.0 - self.beta * (1.0 - self.alpha)
    }

    /// Lower bound for the growth exponent: `k > β(1-α) - 1`.
    pub fn k_floor(&self) -> f64 {
        self.beta * (1.0 - self.alpha) - 1.0
    }

    /// Same problem with a different initial value.
    pub fn with_x0(&self, x0: f64) -> Result<Self> {
        Problem::new(
            self.alpha,
            self.beta,
            self.a,
            x0,
            self.rhs.clone(),
            self.h,
            self.b,
        )
    }
}
