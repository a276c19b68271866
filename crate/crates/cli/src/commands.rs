use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hpd_core::picard::{
    a_priori_iteration_count, existence_radius, initial_condition_check, picard_initial, residual,
    solve_from, tail_estimates, BoundSeries,
};
use hpd_core::rhs::derive_hypotheses;
use hpd_core::{Hypotheses, LogGrid, PicardRun, Problem, SolveOptions};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Auto, RunConfig};
use crate::error::CliError;
use crate::format::fmt_f64;

/// A config with its problem and hypothesis constants.
pub struct Resolved {
    pub config: RunConfig,
    pub problem: Problem,
    pub hyp: Hypotheses,
    /// Existence radius, when the growth bound holds.
    pub radius: Option<f64>,
}

impl Resolved {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let c = &config;
        let problem = Problem::new(c.alpha, c.beta, c.a, c.x0, c.rhs.clone(), c.h, c.b)
            .map_err(|e| CliError::config(0, "problem", e.to_string()))?;
        let hyp = derive_hypotheses(problem.rhs(), &problem);
        let radius = if hyp.valid_h1 {
            Some(existence_radius(&hyp, &problem)?)
        } else {
            None
        };
        Ok(Resolved {
            config,
            problem,
            hyp,
            radius,
        })
    }

    fn require_h1(&self) -> Result<f64, CliError> {
        self.radius.ok_or_else(|| CliError::Hypothesis(self.violation()))
    }

    fn violation(&self) -> String {
        self.hyp
            .violation
            .clone()
            .unwrap_or_else(|| "growth hypothesis does not hold".into())
    }

    /// Replaces `auto` entries by the values they stand for.
    fn substitute_auto(&mut self) -> Result<(), CliError> {
        let radius = self.require_h1()?;
        if self.config.grid_l == Auto::Auto {
            self.config.grid_l = Auto::Value(radius);
        }
        if self.config.n_max == Auto::Auto {
            let n = a_priori_iteration_count(&self.hyp, &self.problem, radius, self.config.eps)?;
            self.config.n_max = Auto::Value(n + 10);
        }
        Ok(())
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct HypothesisReport {
    gamma: f64,
    k: f64,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "valid_H1")]
    valid_h1: bool,
    #[serde(rename = "valid_H2")]
    valid_h2: bool,
    lipschitz_vacuous: bool,
    l: Option<f64>,
    l_capped_by_h: Option<bool>,
    violation: Option<String>,
}

impl HypothesisReport {
    fn new(r: &Resolved) -> Self {
        HypothesisReport {
            gamma: r.problem.gamma(),
            k: r.hyp.k,
            m: r.hyp.m,
            a: r.hyp.a,
            valid_h1: r.hyp.valid_h1,
            valid_h2: r.hyp.valid_h2,
            lipschitz_vacuous: r.hyp.lipschitz_vacuous,
            l: r.radius,
            l_capped_by_h: r.radius.map(|l| l >= r.problem.h()),
            violation: r.hyp.violation.clone(),
        }
    }
}

/// Hypothesis report; written to `check.json` and echoed to stdout.
pub fn check(config: RunConfig) -> Result<(), CliError> {
    let r = Resolved::new(config)?;
    prepare_dir(&r.config.output_dir)?;
    let json = to_json(&HypothesisReport::new(&r));
    write_file(&r.config.output_dir, "check.json", &json)?;
    print!("{json}");
    if r.hyp.valid_h1 {
        Ok(())
    } else {
        Err(CliError::Hypothesis(r.violation()))
    }
}

#[derive(Serialize)]
struct InitialConditionReport {
    at_origin: f64,
    at_first_node: f64,
}

#[derive(Serialize)]
struct SolveReport {
    converged: bool,
    n_performed: usize,
    n_max: usize,
    #[serde(rename = "a_priori_N")]
    a_priori_n: usize,
    radius_l: f64,
    grid_l: f64,
    beyond_radius: bool,
    sup_diffs: Vec<f64>,
    difference_bounds: Vec<f64>,
    box_violations: usize,
    residual: Option<f64>,
    initial_condition: InitialConditionReport,
    hypotheses: HypothesisReport,
    config: Map<String, Value>,
}

fn config_map(c: &RunConfig) -> Map<String, Value> {
    c.entries()
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect()
}

fn solution_csv(run: &PicardRun, problem: &Problem) -> String {
    let sol = run.solution();
    let grid = sol.grid();
    let mut s = String::from("u,t,z,x,rhs_value\n");
    for (i, (&u, &z)) in grid.nodes().iter().zip(sol.z()).enumerate() {
        let x = sol.unweighted(i);
        let f = x.map(|x| problem.rhs().eval(u, x)).unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_f64(u),
            fmt_f64(grid.time(i)),
            fmt_f64(z),
            x.map_or(String::new(), fmt_f64),
            fmt_f64(f)
        );
    }
    s
}

/// Runs the iteration and writes `solution.csv` and `report.json`.
pub fn solve(config: RunConfig) -> Result<(), CliError> {
    let mut r = Resolved::new(config)?;
    r.substitute_auto()?;
    let c = &r.config;
    prepare_dir(&c.output_dir)?;
    let (Auto::Value(length), Auto::Value(n_max)) = (c.grid_l, c.n_max) else {
        unreachable!("auto values substituted")
    };
    let grid = Arc::new(
        LogGrid::new(c.a, length, c.grid_n, c.grid_q)
            .map_err(|e| CliError::config(0, "grid", e.to_string()))?,
    );
    let opts = SolveOptions {
        tol: c.tol,
        n_max: Some(n_max),
        eps: c.eps,
    };
    let mut log = |n: usize, d: f64| eprintln!("iteration {n}: sup diff {d:e}");
    let run = solve_from(
        &r.problem,
        picard_initial(&r.problem, &grid),
        &opts,
        Some(&mut log),
    )?;
    if run.beyond_radius {
        eprintln!(
            "warning: grid.L = {} exceeds the existence radius {}",
            fmt_f64(length),
            fmt_f64(run.radius_l)
        );
    }
    let res = if run.converged {
        Some(residual(&run, &r.problem)?)
    } else {
        None
    };
    let ic = initial_condition_check(&run, &r.problem)?;
    let report = SolveReport {
        converged: run.converged,
        n_performed: run.n_performed,
        n_max: run.n_max,
        a_priori_n: run.a_priori_n,
        radius_l: run.radius_l,
        grid_l: length,
        beyond_radius: run.beyond_radius,
        sup_diffs: run.sup_diffs.clone(),
        difference_bounds: run.difference_bounds.clone(),
        box_violations: run.total_box_violations(),
        residual: res,
        initial_condition: InitialConditionReport {
            at_origin: ic.at_origin,
            at_first_node: ic.at_first_node,
        },
        hypotheses: HypothesisReport::new(&r),
        config: config_map(c),
    };
    write_file(&c.output_dir, "solution.csv", &solution_csv(&run, &r.problem))?;
    write_file(&c.output_dir, "report.json", &to_json(&report))?;
    if run.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(run.n_max))
    }
}

#[derive(Serialize)]
struct BoundsReport {
    #[serde(rename = "a_priori_N")]
    a_priori_n: usize,
    eps: f64,
    l: f64,
    terms: usize,
}

/// Writes the majorant series `bounds.csv` and `bounds.json`.
pub fn bounds(config: RunConfig) -> Result<(), CliError> {
    let r = Resolved::new(config)?;
    let l = r.require_h1()?;
    if !r.hyp.valid_h2 {
        return Err(CliError::Hypothesis(
            "the Lipschitz constant is not finite".into(),
        ));
    }
    let c = &r.config;
    prepare_dir(&c.output_dir)?;
    let count = c.bound_terms;
    let series = BoundSeries::new(&r.hyp, &r.problem, l)?;
    let terms = series.terms(count)?;
    let ratios = series.ratios(count)?;
    let tails = tail_estimates(&r.hyp, &r.problem, l, count)?;
    let a_priori_n = a_priori_iteration_count(&r.hyp, &r.problem, l, c.eps)?;
    let mut csv = String::from("n,u_n,ratio,tail\n");
    for n in 0..count {
        let _ = writeln!(
            csv,
            "{n},{},{},{}",
            fmt_f64(terms[n]),
            fmt_f64(ratios[n]),
            fmt_f64(tails[n])
        );
    }
    write_file(&c.output_dir, "bounds.csv", &csv)?;
    let report = BoundsReport {
        a_priori_n,
        eps: c.eps,
        l,
        terms: count,
    };
    write_file(&c.output_dir, "bounds.json", &to_json(&report))?;
    println!("a_priori_N = {a_priori_n}");
    Ok(())
}
