//! Picard iteration on the weighted Volterra form, the existence radius
//! and the majorant series that controls successive differences.
//!
//! Iterates are weighted samples `z_n`, started from `z_0 ≡ x0`:
//!
//! ```text
//! z_n(u) = x0 + u^{1-γ} I^α [f(s, s^{γ-1} z_{n-1}(s))](u)
//! ```
//!
//! Successive differences satisfy `sup |z_{j+1} - z_j| <= d_j` with
//!
//! ```text
//! d_j = M A^j l^{(j+1)σ} Π_{i=0}^{j} Γ((i+1)k + i(α+1-γ) + 1) / Γ((i+1)(α+k) + i(1-γ) + 1)
//! ```
//!
//! where `σ = α + k + 1 - γ`. The bound terms are `u_n = d_{n+1}`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::grid::{same_grid, LogGrid, WeightedSample};
use crate::hadamard::{hilfer_hadamard_derivative_split, ProductRule, SplitSample};
use crate::problem::Problem;
use crate::rhs::{derive_hypotheses, Hypotheses};
use crate::special::{gamma_ratio, log_gamma};

/// Term budget of the bound series.
pub const MAX_BOUND_TERMS: usize = 10_000;

/// Relative slack on the box test `|z - x0| <= b`.
pub const BOX_SLACK: f64 = 1e-12;

/// `l = min(h, (b Γ(α+k+1) / (M Γ(k+1)))^{1/(μ+k)})` with
/// `μ = 1 - β(1-α)`; `h` when `M = 0`. In log units: the solution lives on
/// `t ∈ (a, a e^l]`.
pub fn existence_radius(hyp: &Hypotheses, problem: &Problem) -> Result<f64> {
    hyp.require_h1()?;
    let h = problem.h();
    if hyp.m == 0.0 {
        return Ok(h);
    }
    let k = hyp.k;
    let power = problem.mu() + k;
    let ln_base = libm::log(problem.b()) + log_gamma(problem.alpha() + k + 1.0)?
        - log_gamma(k + 1.0)?
        - libm::log(hyp.m);
    Ok(libm::fmin(h, libm::exp(ln_base / power)))
}

/// Log-space evaluation of the majorant series for fixed constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSeries {
    ln_m: f64,
    ln_a: f64,
    ln_l: f64,
    alpha: f64,
    gamma: f64,
    k: f64,
}

impl BoundSeries {
    pub fn new(hyp: &Hypotheses, problem: &Problem, l: f64) -> Result<Self> {
        hyp.require_h1()?;
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::domain("l", l, "l > 0"));
        }
        if !(hyp.a > 0.0) || !hyp.a.is_finite() {
            return Err(Error::domain("A", hyp.a, "A > 0"));
        }
        Ok(BoundSeries {
            ln_m: libm::log(hyp.m),
            ln_a: libm::log(hyp.a),
            ln_l: libm::log(l),
            alpha: problem.alpha(),
            gamma: problem.gamma(),
            k: hyp.k,
        })
    }

    /// `σ = α + k + 1 - γ`.
    pub fn sigma(&self) -> f64 {
        self.alpha + self.k + 1.0 - self.gamma
    }

    /// `ln Γ((i+1)k + i(α+1-γ) + 1) - ln Γ((i+1)(α+k) + i(1-γ) + 1)`.
    fn log_factor(&self, i: usize) -> Result<f64> {
        let i = i as f64;
        let num = (i + 1.0) * self.k + i * (self.alpha + 1.0 - self.gamma) + 1.0;
        let den = (i + 1.0) * (self.alpha + self.k) + i * (1.0 - self.gamma) + 1.0;
        if !(num > 0.0) {
            return Err(Error::domain("gamma argument", num, "a positive argument"));
        }
        Ok(log_gamma(num)? - log_gamma(den)?)
    }

    /// `ln d_j` for `j = 0..count`.
    pub fn log_difference_bounds(&self, count: usize) -> Result<Vec<f64>> {
        let sigma = self.sigma();
        let mut out = Vec::with_capacity(count);
        let mut product = 0.0;
        for j in 0..count {
            product += self.log_factor(j)?;
            let jf = j as f64;
            out.push(self.ln_m + jf * self.ln_a + (jf + 1.0) * sigma * self.ln_l + product);
        }
        Ok(out)
    }

    /// `d_j` for `j = 0..count`; `d_0` bounds `sup |z_1 - z_0|`.
    pub fn difference_bounds(&self, count: usize) -> Result<Vec<f64>> {
        Ok(self
            .log_difference_bounds(count)?
            .into_iter()
            .map(libm::exp)
            .collect())
    }

    /// `u_n` for `n = 0..count`.
    pub fn terms(&self, count: usize) -> Result<Vec<f64>> {
        let mut d = self.difference_bounds(count + 1)?;
        d.remove(0);
        Ok(d)
    }

    /// `u_{n+1}/u_n` for `n = 0..count`, formed from log terms so that it
    /// stays meaningful after the terms underflow (and when `M = 0`).
    pub fn ratios(&self, count: usize) -> Result<Vec<f64>> {
        let step = self.ln_a + self.sigma() * self.ln_l;
        (0..count)
            .map(|n| Ok(libm::exp(step + self.log_factor(n + 2)?)))
            .collect()
    }
}

/// `u_n` for the given constants.
pub fn error_bound_term(n: usize, hyp: &Hypotheses, problem: &Problem, l: f64) -> Result<f64> {
    let series = BoundSeries::new(hyp, problem, l)?;
    Ok(series.terms(n + 1)?[n])
}

/// Tail bounds `T_N >= Σ_{n>=N} u_n` for `N = 0..=K`, where `K` is the
/// first index with ratio below 1/2 and geometric tail below `eps`.
fn tail_bounds(series: &BoundSeries, eps: f64) -> Result<Vec<f64>> {
    let step = series.ln_a + series.sigma() * series.ln_l;
    let sigma = series.sigma();
    let mut terms = Vec::new();
    let mut product = series.log_factor(0)?;
    for n in 0..MAX_BOUND_TERMS {
        product += series.log_factor(n + 1)?;
        let nf = (n + 1) as f64;
        let ln_u = series.ln_m + nf * series.ln_a + (nf + 1.0) * sigma * series.ln_l + product;
        let u = libm::exp(ln_u);
        let ratio = libm::exp(step + series.log_factor(n + 2)?);
        terms.push(u);
        if ratio < 0.5 {
            let geometric = u / (1.0 - ratio);
            if geometric < eps * 1e-6 || u == 0.0 {
                let mut tails = alloc::vec![0.0; terms.len() + 1];
                tails[terms.len()] = 0.0;
                let last = terms.len() - 1;
                tails[last] = geometric;
                for i in (0..last).rev() {
                    tails[i] = tails[i + 1] + terms[i];
                }
                tails.pop();
                return Ok(tails);
            }
        }
    }
    Err(Error::BoundSeries {
        terms: MAX_BOUND_TERMS,
    })
}

/// Least `N` with `Σ_{n>=N} u_n < eps`.
///
/// The tail is summed term by term until the ratio `u_{n+1}/u_n` drops
/// below 1/2, after which the geometric majorant `u_n/(1 - r_n)` bounds
/// the rest (the ratios decrease monotonically).
pub fn a_priori_iteration_count(hyp: &Hypotheses, problem: &Problem, l: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps", eps, "eps > 0"));
    }
    hyp.require_h1()?;
    if hyp.m == 0.0 {
        return Ok(0);
    }
    let series = BoundSeries::new(hyp, problem, l)?;
    let tails = tail_bounds(&series, eps)?;
    Ok(tails.iter().position(|&t| t < eps).unwrap_or(tails.len()))
}

/// Tail estimates `Σ_{m>=n} u_m` for `n = 0..count`.
pub fn tail_estimates(hyp: &Hypotheses, problem: &Problem, l: f64, count: usize) -> Result<Vec<f64>> {
    let series = BoundSeries::new(hyp, problem, l)?;
    if hyp.m == 0.0 {
        return Ok(alloc::vec![0.0; count]);
    }
    let tails = tail_bounds(&series, f64::MIN_POSITIVE)?;
    Ok((0..count).map(|n| tails.get(n).copied().unwrap_or(0.0)).collect())
}

/// `z_0 ≡ x0`.
pub fn picard_initial(problem: &Problem, grid: &Arc<LogGrid>) -> WeightedSample {
    WeightedSample::constant(grid, problem.gamma(), problem.x0())
        .expect("x0 is finite and gamma lies in (0, 1]")
}

/// Reusable Picard map for one problem on one grid.
#[derive(Debug, Clone)]
pub struct PicardMap {
    problem: Problem,
    rule: ProductRule,
    /// `u^{1-γ}` at every node.
    weight: Vec<f64>,
}

/// One application of the Picard map.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub sample: WeightedSample,
    /// Nodes with `|z - x0| > b`.
    pub box_violations: usize,
}

impl PicardMap {
    pub fn new(problem: &Problem, grid: &Arc<LogGrid>) -> Result<Self> {
        let k = problem.rhs().exponent(problem.gamma());
        let rule = ProductRule::new(grid, problem.alpha(), k)?;
        let lift = 1.0 - problem.gamma();
        let weight = grid.sample(|u| if lift == 0.0 { 1.0 } else { libm::pow(u, lift) });
        Ok(PicardMap {
            problem: problem.clone(),
            rule,
            weight,
        })
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        self.rule.grid()
    }

    /// Product-integration weights; exposed for fault injection.
    #[doc(hidden)]
    pub fn rule_mut(&mut self) -> &mut ProductRule {
        &mut self.rule
    }

    pub fn apply(&self, prev: &WeightedSample) -> Result<StepOutput> {
        if !same_grid(prev.grid(), self.grid()) {
            return Err(Error::GridMismatch);
        }
        let p = &self.problem;
        let gamma = p.gamma();
        let nodes = self.grid().nodes();
        let g = map_range(0..nodes.len(), |i| {
            p.rhs().eval_factored(nodes[i], prev.z()[i], gamma).0
        });
        if let Some(index) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "right-hand side",
                index,
            });
        }
        let integral = self.rule.apply(&g)?;
        let x0 = p.x0();
        let mut z = Vec::with_capacity(nodes.len());
        z.push(x0);
        for j in 1..nodes.len() {
            z.push(x0 + self.weight[j] * integral[j]);
        }
        let box_violations = count_box_violations(&z, x0, p.b());
        Ok(StepOutput {
            sample: WeightedSample::new(self.grid(), gamma, z)?,
            box_violations,
        })
    }
}

fn count_box_violations(z: &[f64], x0: f64, b: f64) -> usize {
    let limit = b * (1.0 + BOX_SLACK);
    z.iter().filter(|&&v| libm::fabs(v - x0) > limit).count()
}

/// One Picard step from `prev`. Builds the quadrature weights on every
/// call; use [`PicardMap`] to iterate.
pub fn picard_step(prev: &WeightedSample, problem: &Problem) -> Result<StepOutput> {
    PicardMap::new(problem, prev.grid())?.apply(prev)
}

/// Stopping rule and iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once `sup |z_n - z_{n-1}| <= tol`.
    pub tol: f64,
    /// Iteration cap; `None` means the a-priori count plus 10.
    pub n_max: Option<usize>,
    /// Target for the a-priori count.
    pub eps: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            n_max: None,
            eps: 1e-8,
        }
    }
}

/// Outcome of a Picard solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    /// `z_0, z_1, ..., z_n`; the last entry is the approximate solution.
    pub iterates: Vec<WeightedSample>,
    /// `sup |z_{i+1} - z_i|` for each step performed.
    pub sup_diffs: Vec<f64>,
    pub converged: bool,
    pub n_performed: usize,
    /// Existence radius in log units.
    pub radius_l: f64,
    /// A-priori iteration count for `eps`.
    pub a_priori_n: usize,
    /// Iteration cap actually used.
    pub n_max: usize,
    /// `u_n` for `n = 0..n_performed`.
    pub bound_terms: Vec<f64>,
    /// `d_i`, aligned with `sup_diffs`.
    pub difference_bounds: Vec<f64>,
    pub hypotheses: Hypotheses,
    /// Box violations per iterate, aligned with `iterates`.
    pub box_violations: Vec<usize>,
    /// The grid extends past the existence radius.
    pub beyond_radius: bool,
}

impl PicardRun {
    pub fn solution(&self) -> &WeightedSample {
        self.iterates
            .last()
            .expect("a run holds at least the initial iterate")
    }

    pub fn total_box_violations(&self) -> usize {
        self.box_violations.iter().sum()
    }
}

/// Iterates from `z_0 ≡ x0`. See [`solve_from`].
pub fn solve(problem: &Problem, grid: &Arc<LogGrid>, opts: &SolveOptions) -> Result<PicardRun> {
    solve_from(problem, picard_initial(problem, grid), opts, None)
}

/// Iterates the Picard map from `initial` until the sup-norm of successive
/// differences is at most `opts.tol` or the cap is reached.
///
/// Non-convergence and box violations are reported in the run, not as
/// errors. `observer` is called after every step with the step index
/// (from 1) and its sup difference.
pub fn solve_from(
    problem: &Problem,
    initial: WeightedSample,
    opts: &SolveOptions,
    mut observer: Option<&mut dyn FnMut(usize, f64)>,
) -> Result<PicardRun> {
    if !(opts.tol > 0.0) {
        return Err(Error::domain("tol", opts.tol, "tol > 0"));
    }
    if libm::fabs(initial.gamma() - problem.gamma()) > 4.0 * f64::EPSILON {
        return Err(Error::domain("gamma", initial.gamma(), "the problem's gamma"));
    }
    let hyp = derive_hypotheses(problem.rhs(), problem);
    hyp.require_h1()?;
    let radius_l = existence_radius(&hyp, problem)?;
    let a_priori_n = a_priori_iteration_count(&hyp, problem, radius_l, opts.eps)?;
    let n_max = opts.n_max.unwrap_or(a_priori_n + 10);
    if n_max == 0 {
        return Err(Error::domain("n_max", 0.0, "n_max >= 1"));
    }
    let grid = Arc::clone(initial.grid());
    let beyond_radius = grid.length() > radius_l * (1.0 + BOX_SLACK);
    let map = PicardMap::new(problem, &grid)?;

    let mut box_violations = alloc::vec![count_box_violations(initial.z(), problem.x0(), problem.b())];
    let mut iterates = alloc::vec![initial];
    let mut sup_diffs = Vec::new();
    let mut converged = false;
    while sup_diffs.len() < n_max {
        let prev = iterates.last().expect("non-empty");
        let step = map.apply(prev)?;
        let diff = step.sample.sup_distance(prev)?;
        sup_diffs.push(diff);
        box_violations.push(step.box_violations);
        iterates.push(step.sample);
        if let Some(obs) = observer.as_mut() {
            obs(sup_diffs.len(), diff);
        }
        if diff <= opts.tol {
            converged = true;
            break;
        }
    }
    let n_performed = sup_diffs.len();
    let series = BoundSeries::new(&hyp, problem, radius_l)?;
    let difference_bounds = series.difference_bounds(n_performed)?;
    let bound_terms = series.terms(n_performed)?;
    Ok(PicardRun {
        iterates,
        sup_diffs,
        converged,
        n_performed,
        radius_l,
        a_priori_n,
        n_max,
        bound_terms,
        difference_bounds,
        hypotheses: hyp,
        box_violations,
        beyond_radius,
    })
}

/// Scaled residual of `D^{α,β} x = f(t, x)` for a converged run.
///
/// See [`sample_residual`].
pub fn residual(run: &PicardRun, problem: &Problem) -> Result<f64> {
    if !run.converged {
        return Err(Error::NotConverged);
    }
    sample_residual(run.solution(), problem)
}

/// `max_j |D^{α,β} x(u_j) - f(t_j, x_j)| u_j^{-k} / M` over nodes
/// `2 <= j <= N-2` (M replaced by 1 when it is 0).
///
/// The derivative is taken of the split form
/// `x = x0 u^{γ-1} + u^{α+k} tail(u)`, whose first term the operator
/// annihilates; `tail(0) = g(0) Γ(k+1)/Γ(α+k+1)` from the leading term of
/// the integral equation.
pub fn sample_residual(x: &WeightedSample, problem: &Problem) -> Result<f64> {
    let gamma = problem.gamma();
    let (alpha, beta) = (problem.alpha(), problem.beta());
    let hyp = derive_hypotheses(problem.rhs(), problem);
    hyp.require_h1()?;
    let k = hyp.k;
    let n = x.grid().cells();
    if n < 4 {
        return Err(Error::domain("N", n as f64, "N >= 4"));
    }
    let (g0, _) = problem.rhs().eval_factored(0.0, x.origin(), gamma);
    let tail0 = g0 * gamma_ratio(k + 1.0, alpha + k + 1.0)?;
    let split = SplitSample::from_weighted(x, alpha + k, tail0)?;
    let d = hilfer_hadamard_derivative_split(&split, alpha, beta)?;
    let nodes = x.grid().nodes();
    let scale = if hyp.m > 0.0 { hyp.m } else { 1.0 };
    let mut worst: f64 = 0.0;
    for j in 2..=n - 2 {
        let u = nodes[j];
        let (g, _) = problem.rhs().eval_factored(u, x.z()[j], gamma);
        let r = libm::fabs(d.values()[j] * libm::pow(u, -k) - g) / scale;
        if r.is_nan() {
            return Err(Error::NonFinite {
                what: "residual",
                index: j,
            });
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Initial-condition diagnostics of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    /// `|z(u_0) - x0|`; zero by construction.
    pub at_origin: f64,
    /// `|z(u_1) - x0|`, which tends to 0 under refinement.
    pub at_first_node: f64,
}

impl InitialCondition {
    pub fn max(&self) -> f64 {
        self.at_origin.max(self.at_first_node)
    }
}

pub fn initial_condition_check(run: &PicardRun, problem: &Problem) -> Result<InitialCondition> {
    let z = run.solution().z();
    Ok(InitialCondition {
        at_origin: libm::fabs(z[0] - problem.x0()),
        at_first_node: libm::fabs(z[1] - problem.x0()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::{closed_form_solution, RhsSpec};
    use crate::special::gamma;

    fn problem(alpha: f64, beta: f64, x0: f64, rhs: RhsSpec, h: f64, b: f64) -> Problem {
        Problem::new(alpha, beta, 1.0, x0, rhs, h, b).unwrap()
    }

    fn hyp(k: f64, m: f64, a: f64) -> Hypotheses {
        Hypotheses {
            k,
            m,
            a,
            valid_h1: true,
            valid_h2: true,
            lipschitz_vacuous: false,
            violation: None,
        }
    }

    #[test]
    fn radius_examples() {
        let p = problem(0.5, 0.0, 1.0, RhsSpec::PowerSource { c: 0.0, nu: 0.0 }, 1.0, 1.0);
        assert_eq!(existence_radius(&hyp(0.0, 0.0, 1.0), &p).unwrap(), 1.0);

        let p = problem(0.5, 0.0, 1.0, RhsSpec::PowerSource { c: 1.0, nu: 0.0 }, 10.0, 1.0);
        let l = existence_radius(&hyp(0.0, 1.0, 1.0), &p).unwrap();
        assert!((l - 0.886_226_925_452_758).abs() < 1e-15, "{l}");

        let p = problem(0.5, 1.0, 1.0, RhsSpec::PowerSource { c: 2.0, nu: 0.0 }, 0.2, 1.0);
        let l = existence_radius(&hyp(0.0, 2.0, 1.0), &p).unwrap();
        assert!((l - 0.196_349_540_849_362_07).abs() < 1e-15, "{l}");

        let mut bad = hyp(-2.0, 1.0, 1.0);
        bad.valid_h1 = false;
        assert!(existence_radius(&bad, &p).is_err());
    }

    #[test]
    fn bound_term_example() {
        let p = problem(0.5, 0.0, 1.0, RhsSpec::PowerSource { c: 1.0, nu: 0.0 }, 1.0, 1.0);
        let h = hyp(0.0, 1.0, 1.0);
        let u0 = error_bound_term(0, &h, &p, 1.0).unwrap();
        assert!((u0 - 0.848_826_363_156_775_1).abs() < 1e-15, "{u0}");
        assert_eq!(error_bound_term(7, &hyp(0.0, 0.0, 1.0), &p, 1.0).unwrap(), 0.0);

        let r = BoundSeries::new(&h, &p, 1.0).unwrap().ratios(21).unwrap();
        assert!(r[20] < r[5]);
        let t = BoundSeries::new(&h, &p, 1.0).unwrap().terms(6).unwrap();
        assert!((t[5] / t[4] - r[4]).abs() < 1e-13 * r[4]);
    }

    #[test]
    fn a_priori_count_is_consistent_with_brute_force_tail() {
        let p = problem(0.5, 0.0, 1.0, RhsSpec::PowerSource { c: 1.0, nu: 0.0 }, 1.0, 1.0);
        let h = hyp(0.0, 1.0, 1.0);
        let n = a_priori_iteration_count(&h, &p, 1.0, 1e-8).unwrap();
        let terms = BoundSeries::new(&h, &p, 1.0)
            .unwrap()
            .terms(MAX_BOUND_TERMS)
            .unwrap();
        let tail: f64 = terms[n..].iter().sum();
        assert!(tail < 1e-8);
        let before: f64 = terms[n - 1..].iter().sum();
        assert!(before >= 1e-8);
        assert!(a_priori_iteration_count(&h, &p, 1.0, 1e-12).unwrap() >= n);
        assert_eq!(
            a_priori_iteration_count(&hyp(0.0, 0.0, 1.0), &p, 1.0, 1e-8).unwrap(),
            0
        );
    }

    #[test]
    fn initial_iterate() {
        let g = Arc::new(LogGrid::new(1.0, 1.0, 8, 2.0).unwrap());
        let p = problem(0.5, 0.5, -2.5, RhsSpec::PowerSource { c: 0.0, nu: 0.0 }, 1.0, 1.0);
        assert!(picard_initial(&p, &g).z().iter().all(|&z| z == -2.5));
    }

    #[test]
    fn zero_source_converges_in_one_step() {
        let g = Arc::new(LogGrid::new(1.0, 0.5, 32, 2.0).unwrap());
        let p = problem(0.5, 0.5, 1.0, RhsSpec::PowerSource { c: 0.0, nu: 0.0 }, 1.0, 1.0);
        let run = solve(&p, &g, &SolveOptions::default()).unwrap();
        assert!(run.converged);
        assert_eq!(run.n_performed, 1);
        assert!(run.solution().z().iter().all(|&z| z == 1.0));
        let ic = initial_condition_check(&run, &p).unwrap();
        assert_eq!((ic.at_origin, ic.at_first_node), (0.0, 0.0));
        assert!(residual(&run, &p).unwrap() < 1e-12);
    }

    #[test]
    fn power_source_matches_closed_form() {
        let g = Arc::new(LogGrid::new(1.0, 0.5, 256, 2.0).unwrap());
        let rhs = RhsSpec::PowerSource { c: -2.0, nu: 0.5 };
        let p = problem(0.3, 0.5, 1.0, rhs.clone(), 1.0, 1.0);
        let run = solve(&p, &g, &SolveOptions::default()).unwrap();
        assert!(run.converged && run.n_performed <= 2);
        let exact = closed_form_solution(&rhs, &p).unwrap();
        for (z, &u) in run.solution().z().iter().zip(g.nodes()) {
            assert!((z - exact.eval(u).unwrap()).abs() < 1e-12);
        }
        assert_eq!(run.total_box_violations(), 0);
    }

    #[test]
    fn linear_step_from_constant() {
        // One step from z ≡ x0: x0 + λ x0 Γ(γ)/Γ(γ+α) u^α.
        let g = Arc::new(LogGrid::new(1.0, 0.5, 128, 2.0).unwrap());
        let p = problem(
            0.5,
            0.5,
            1.0,
            RhsSpec::LinearInLog {
                lambda: 0.5,
                kappa: 0.0,
            },
            1.0,
            1.0,
        );
        let out = picard_step(&picard_initial(&p, &g), &p).unwrap();
        let c = 0.5 * gamma(0.75).unwrap() / gamma(1.25).unwrap();
        for (z, &u) in out.sample.z().iter().zip(g.nodes()) {
            assert!((z - (1.0 + c * libm::sqrt(u))).abs() < 1e-12);
        }
        assert_eq!(out.sample.z()[0], 1.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = Arc::new(LogGrid::new(1.0, 0.5, 64, 2.0).unwrap());
        let p = problem(
            0.5,
            0.5,
            1.0,
            RhsSpec::LinearInLog {
                lambda: 0.5,
                kappa: 0.0,
            },
            1.0,
            1.0,
        );
        let opts = SolveOptions {
            tol: 1e-14,
            n_max: Some(2),
            eps: 1e-8,
        };
        let run = solve(&p, &g, &opts).unwrap();
        assert!(!run.converged);
        assert_eq!(run.n_performed, 2);
        assert_eq!(run.sup_diffs.len(), 2);
        assert!(matches!(residual(&run, &p), Err(Error::NotConverged)));
    }

    #[test]
    fn invalid_hypotheses_are_rejected() {
        let g = Arc::new(LogGrid::new(1.0, 0.5, 16, 2.0).unwrap());
        let p = problem(0.5, 0.0, 1.0, RhsSpec::PowerSource { c: 1.0, nu: -2.0 }, 1.0, 1.0);
        assert!(matches!(
            solve(&p, &g, &SolveOptions::default()),
            Err(Error::Hypothesis(_))
        ));
    }
}
