use std::sync::Arc;

use hpd_core::picard::*;
use hpd_core::rhs::{closed_form_solution, derive_hypotheses};
use hpd_core::special::gamma_ratio;
use hpd_core::{Error, LogGrid, Problem, RhsSpec, SolveOptions, WeightedSample};

/// Quadrature tolerance used for the bound-domination slack.
const QUAD_TOL: f64 = 1e-6;

fn linear_problem() -> Problem {
    Problem::new(
        0.5,
        0.5,
        1.0,
        1.0,
        RhsSpec::LinearInLog {
            lambda: 0.5,
            kappa: 0.0,
        },
        1.0,
        1.0,
    )
    .unwrap()
}

fn grid_for(p: &Problem, n: usize) -> Arc<LogGrid> {
    let hyp = derive_hypotheses(p.rhs(), p);
    let l = existence_radius(&hyp, p).unwrap().min(0.5);
    Arc::new(LogGrid::new(p.base(), l, n, 2.0).unwrap())
}

fn opts() -> SolveOptions {
    SolveOptions {
        tol: 1e-10,
        n_max: None,
        eps: 1e-8,
    }
}

#[test]
fn linear_problem_matches_mittag_leffler() {
    let p = linear_problem();
    let g = grid_for(&p, 256);
    let run = solve(&p, &g, &opts()).unwrap();
    assert!(run.converged);
    assert!(run.n_performed <= run.a_priori_n + 10);
    let exact = closed_form_solution(p.rhs(), &p).unwrap();
    for (z, &u) in run.solution().z().iter().zip(g.nodes()) {
        assert!((z - exact.eval(u).unwrap()).abs() < 5e-6);
    }
}

#[test]
fn successive_differences_are_dominated_by_the_bound_series() {
    let cases = [
        linear_problem(),
        Problem::new(
            0.3,
            1.0,
            1.0,
            0.5,
            RhsSpec::LinearInLog {
                lambda: -1.0,
                kappa: 0.5,
            },
            1.0,
            1.0,
        )
        .unwrap(),
        Problem::new(
            0.7,
            0.2,
            2.0,
            0.0,
            RhsSpec::PowerNonlinear {
                lambda: 1.0,
                mu: 0.0,
                m: 2.0,
            },
            1.0,
            1.0,
        )
        .unwrap(),
    ];
    for p in cases {
        let g = grid_for(&p, 256);
        let run = solve(&p, &g, &opts()).unwrap();
        assert_eq!(run.difference_bounds.len(), run.sup_diffs.len());
        for (i, (d, bound)) in run.sup_diffs.iter().zip(&run.difference_bounds).enumerate() {
            assert!(
                *d <= bound + 10.0 * QUAD_TOL,
                "{:?} step {i}: {d} > {bound}",
                p.rhs()
            );
        }
        // u_n = d_{n+1}
        for n in 0..run.bound_terms.len().saturating_sub(1) {
            assert_eq!(run.bound_terms[n], run.difference_bounds[n + 1]);
        }
    }
}

#[test]
fn iterates_stay_in_the_box_and_keep_the_initial_value() {
    for p in [
        linear_problem(),
        Problem::new(
            0.4,
            0.6,
            1.0,
            -0.5,
            RhsSpec::PowerNonlinear {
                lambda: -0.8,
                mu: 0.3,
                m: 1.5,
            },
            1.0,
            0.5,
        )
        .unwrap(),
    ] {
        let g = grid_for(&p, 128);
        let run = solve(&p, &g, &opts()).unwrap();
        assert!(!run.beyond_radius);
        assert_eq!(run.total_box_violations(), 0);
        for it in &run.iterates {
            assert_eq!(it.origin(), p.x0());
            assert!(it.z().iter().all(|z| (z - p.x0()).abs() <= p.b()));
        }
    }
}

#[test]
fn box_violations_are_reported_beyond_the_radius() {
    let p = Problem::new(
        0.5,
        0.5,
        1.0,
        0.0,
        RhsSpec::PowerSource { c: 5.0, nu: 0.0 },
        4.0,
        0.1,
    )
    .unwrap();
    let g = Arc::new(LogGrid::new(1.0, 4.0, 64, 2.0).unwrap());
    let run = solve(&p, &g, &opts()).unwrap();
    assert!(run.converged);
    assert!(run.beyond_radius);
    assert!(run.total_box_violations() > 0);
}

#[test]
fn uniqueness_from_two_starting_samples() {
    let p = linear_problem();
    let g = grid_for(&p, 256);
    let a = solve(&p, &g, &opts()).unwrap();
    let start = WeightedSample::constant(&g, p.gamma(), p.x0() + p.b() / 2.0).unwrap();
    let b = solve_from(&p, start, &opts(), None).unwrap();
    assert!(a.converged && b.converged);
    assert!(a.solution().sup_distance(b.solution()).unwrap() <= 10.0 * opts().tol);
}

#[test]
fn observer_sees_every_step() {
    let p = linear_problem();
    let g = grid_for(&p, 64);
    let mut seen = Vec::new();
    let mut obs = |n: usize, d: f64| seen.push((n, d));
    let run = solve_from(&p, picard_initial(&p, &g), &opts(), Some(&mut obs)).unwrap();
    assert_eq!(seen.len(), run.n_performed);
    assert_eq!(seen.last().unwrap().1, *run.sup_diffs.last().unwrap());
}

#[test]
fn ratios_decrease_and_a_priori_count_covers_the_tail() {
    let p = linear_problem();
    let hyp = derive_hypotheses(p.rhs(), &p);
    let l = existence_radius(&hyp, &p).unwrap();
    let series = BoundSeries::new(&hyp, &p, l).unwrap();
    let ratios = series.ratios(400).unwrap();
    for n in 5..399 {
        assert!(ratios[n + 1] < ratios[n], "n = {n}");
    }
    let mut last = 0;
    for eps in [1e-4, 1e-6, 1e-8, 1e-10] {
        let n = a_priori_iteration_count(&hyp, &p, l, eps).unwrap();
        assert!(n >= last);
        last = n;
        let terms = series.terms(MAX_BOUND_TERMS).unwrap();
        let tail: f64 = terms[n..].iter().sum();
        assert!(tail < eps, "eps {eps}: N = {n}, tail {tail:e}");
        if n > 0 {
            assert!(terms[n - 1..].iter().sum::<f64>() >= eps);
        }
    }
    let tails = tail_estimates(&hyp, &p, l, 10).unwrap();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn initial_condition_diagnostics() {
    let spec = RhsSpec::PowerSource { c: 1.5, nu: 0.5 };
    let p = Problem::new(0.5, 0.5, 1.0, 0.2, spec.clone(), 1.0, 1.0).unwrap();
    let mut previous = f64::INFINITY;
    for n in [64, 128, 256] {
        let g = grid_for(&p, n);
        let run = solve(&p, &g, &opts()).unwrap();
        let ic = initial_condition_check(&run, &p).unwrap();
        assert_eq!(ic.at_origin, 0.0);
        let u1 = g.nodes()[1];
        let want = 1.5 * gamma_ratio(1.5, 2.0).unwrap() * u1.powf(0.5 + 0.5 + 1.0 - p.gamma());
        assert!((ic.at_first_node - want).abs() < 1e-12 * want.max(1e-300) + 1e-16);
        assert!(ic.max() < previous);
        previous = ic.max();
    }
}

#[test]
fn residuals_of_computed_and_analytic_solutions_agree() {
    let p = linear_problem();
    let g = grid_for(&p, 256);
    let run = solve(&p, &g, &opts()).unwrap();
    let r = residual(&run, &p).unwrap();
    let exact = closed_form_solution(p.rhs(), &p).unwrap();
    let sample = WeightedSample::new(&g, p.gamma(), g.sample(|u| exact.eval(u).unwrap())).unwrap();
    let ra = sample_residual(&sample, &p).unwrap();
    assert!(r < 1e-3 && ra < 1e-3);
    assert!(r.max(ra) <= 3.0 * r.min(ra), "{r:e} vs {ra:e}");
}

#[test]
fn nonlinear_and_sum_problems_converge_with_small_residual() {
    let problems = [
        Problem::new(
            0.6,
            0.4,
            1.0,
            0.5,
            RhsSpec::PowerNonlinear {
                lambda: 1.0,
                mu: 0.0,
                m: 2.0,
            },
            1.0,
            1.0,
        )
        .unwrap(),
        Problem::new(
            0.5,
            0.25,
            1.0,
            1.0,
            RhsSpec::Sum(vec![
                RhsSpec::PowerSource { c: 1.0, nu: 0.5 },
                RhsSpec::LinearInLog {
                    lambda: -0.5,
                    kappa: 0.0,
                },
            ]),
            1.0,
            1.0,
        )
        .unwrap(),
    ];
    for p in problems {
        let g = grid_for(&p, 256);
        let run = solve(&p, &g, &opts()).unwrap();
        assert!(run.converged, "{:?}", p.rhs());
        assert_eq!(run.total_box_violations(), 0);
        let r = residual(&run, &p).unwrap();
        assert!(r < 1e-3, "{:?}: {r:e}", p.rhs());
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let p = linear_problem();
    let g = grid_for(&p, 16);
    let wrong = WeightedSample::constant(&g, 0.6, 1.0).unwrap();
    assert!(matches!(
        solve_from(&p, wrong, &opts(), None),
        Err(Error::Domain { .. })
    ));
    let other = Arc::new(LogGrid::new(1.0, 0.3, 16, 2.0).unwrap());
    let map = PicardMap::new(&p, &g).unwrap();
    assert!(matches!(
        map.apply(&picard_initial(&p, &other)),
        Err(Error::GridMismatch)
    ));
    let bad_tol = SolveOptions { tol: 0.0, ..opts() };
    assert!(solve(&p, &g, &bad_tol).is_err());
}
