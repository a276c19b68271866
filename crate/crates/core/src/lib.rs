//! Successive approximations for initial value problems with the
//! Hilfer-Hadamard fractional derivative.
//!
//! The problem
//!
//! ```text
//! D^{α,β} x(t) = f(t, x),     lim_{t→a} (log(t/a))^{1-γ} x(t) = x0,    γ = α + β(1-α)
//! ```
//!
//! is solved through its Volterra form in the log variable `u = log(t/a)`:
//!
//! ```text
//! z(u) = x0 + u^{1-γ}/Γ(α) ∫_0^u (u - s)^{α-1} f(s, s^{γ-1} z(s)) ds,     z(u) = u^{1-γ} x(t)
//! ```
//!
//! Every quantity is carried in the weighted variable `z`, which stays
//! continuous at the initial point even though `x` blows up there when
//! `γ < 1`.
//!
//! Modules:
//! - [`special`]: log-gamma, the Euler product limit and the Mittag-Leffler series.
//! - [`quadrature`]: Gauss-Jacobi rules.
//! - [`grid`]: graded log-time grids and the sample types that live on them.
//! - [`hadamard`]: Hadamard integral and derivative operators on a grid.
//! - [`rhs`]: the right-hand-side catalog with analytic hypothesis constants.
//! - [`problem`]: the initial value problem.
//! - [`picard`]: the iteration, its existence radius and the bound series.
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `rayon`
//! feature to evaluate the product-integration node loops in parallel;
//! results are bit-identical either way.
#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

mod error;
mod exec;

pub mod grid;
pub mod hadamard;
pub mod picard;
pub mod problem;
pub mod quadrature;
pub mod rhs;
pub mod special;

pub use error::{Error, Result};
pub use grid::{GridFunction, LogGrid, WeightedSample};
pub use picard::{PicardRun, SolveOptions};
pub use problem::Problem;
pub use rhs::{Hypotheses, RhsSpec};
