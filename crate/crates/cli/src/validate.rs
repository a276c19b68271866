//! Oracle suites behind `hpd validate`.

use std::sync::Arc;

use clap::ValueEnum;
use hpd_core::hadamard::{hadamard_integral_powerlaw, ProductRule};
use hpd_core::special::{gamma, gamma_euler_limit, mittag_leffler, recip_gamma};
use hpd_core::LogGrid;
use rayon::prelude::*;

use crate::error::CliError;
use crate::format::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn grid_sizes(self) -> &'static [usize] {
        match self {
            Level::Quick => &[128, 512],
            Level::Full => &[512, 2048, 4096],
        }
    }
}

/// One line of the validation table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: &'static str,
    pub case: String,
    pub error: f64,
    pub tolerance: f64,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }

    pub fn name(&self) -> String {
        format!("{} {}", self.suite, self.case)
    }
}

const ALPHAS: [f64; 3] = [0.3, 0.5, 0.8];
const POWERS: [f64; 4] = [0.0, 0.25, 1.0, 1.75];
const SINGULAR: [f64; 2] = [0.0, -0.25];
const POWER_LAW_TOL: f64 = 1e-6;

/// The case whose weights `--inject-fault` corrupts.
pub const FAULT_CASE: (f64, f64, f64) = (0.5, 1.0, 0.0);

fn power_law_case(alpha: f64, p: f64, k: f64, sizes: &[usize], corrupt: bool) -> Result<Row, CliError> {
    // The whole power u^{p+k} goes into the rule, so g is 1 or u and the
    // interpolant is exact; what is left is the moment error.
    let s = p + k;
    let mut worst: f64 = 0.0;
    let mut n_last = 0;
    for &n in sizes {
        let grid = Arc::new(LogGrid::new(1.0, 1.0, n, 2.0)?);
        let mut rule = ProductRule::new(&grid, alpha, s)?;
        if corrupt {
            rule.scale_cell(n, n - 1, 1.01);
        }
        let ones = vec![1.0; grid.len()];
        let flat = rule.apply(&ones)?;
        let linear = rule.apply(grid.nodes())?;
        let mut err: f64 = 0.0;
        for (j, &u) in grid.nodes().iter().enumerate().skip(1) {
            let e0 = hadamard_integral_powerlaw(alpha, s, u)?;
            let e1 = hadamard_integral_powerlaw(alpha, s + 1.0, u)?;
            err = err
                .max(((flat[j] - e0) / e0).abs())
                .max(((linear[j] - e1) / e1).abs());
        }
        worst = worst.max(err);
        n_last = n;
    }
    Ok(Row {
        suite: "power_law",
        case: format!("alpha={alpha} p={p} k={k} N<={n_last}"),
        error: worst,
        tolerance: POWER_LAW_TOL,
    })
}

fn power_law(level: Level, inject_fault: bool) -> Result<Vec<Row>, CliError> {
    let cases: Vec<(f64, f64, f64)> = ALPHAS
        .iter()
        .flat_map(|&a| {
            POWERS
                .iter()
                .flat_map(move |&p| SINGULAR.iter().map(move |&k| (a, p, k)))
        })
        .collect();
    cases
        .par_iter()
        .map(|&(a, p, k)| {
            power_law_case(
                a,
                p,
                k,
                level.grid_sizes(),
                inject_fault && (a, p, k) == FAULT_CASE,
            )
        })
        .collect()
}

fn euler() -> Result<Vec<Row>, CliError> {
    const M: u64 = 1_000_000;
    [0.3, 0.5, 1.5, 2.7]
        .into_iter()
        .map(|x| {
            let exact = gamma(x)?;
            let approx = gamma_euler_limit(x, M)?;
            Ok(Row {
                suite: "euler",
                case: format!("x={x} m={M}"),
                error: ((approx - exact) / exact).abs(),
                tolerance: 1e-5,
            })
        })
        .collect()
}

fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64, CliError> {
    Ok(mittag_leffler(alpha, beta, z)?.value)
}

fn max_over<T>(
    points: impl Iterator<Item = T>,
    f: impl Fn(T) -> Result<f64, CliError>,
) -> Result<f64, CliError> {
    points.map(f).try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
}

fn mittag_leffler_rows() -> Result<Vec<Row>, CliError> {
    let grid = || (0..=40).map(|i| -5.0 + 0.25 * f64::from(i));
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut rows = vec![
        Row {
            suite: "mittag_leffler",
            case: "E_{1,1}(z) = exp(z), |z| <= 5".into(),
            error: max_over(grid(), |z| Ok(rel(ml(1.0, 1.0, z)?, z.exp())))?,
            tolerance: 1e-12,
        },
        Row {
            suite: "mittag_leffler",
            case: "E_{2,1}(-z^2) = cos(z), |z| <= 5".into(),
            error: max_over(grid(), |z| Ok(rel(ml(2.0, 1.0, -z * z)?, z.cos())))?,
            tolerance: 1e-12,
        },
        Row {
            suite: "mittag_leffler",
            case: "E_{2,1}(z^2) = cosh(z), |z| <= 5".into(),
            error: max_over(grid(), |z| Ok(rel(ml(2.0, 1.0, z * z)?, z.cosh())))?,
            tolerance: 1e-12,
        },
    ];
    rows.push(Row {
        suite: "mittag_leffler",
        case: "E_{a,b}(0) = 1/Gamma(b)".into(),
        error: max_over([0.3, 0.5, 0.75, 1.0, 1.5, 2.5].into_iter(), |b| {
            max_over([0.2, 0.5, 0.9, 1.7].into_iter(), |a| {
                Ok(rel(ml(a, b, 0.0)?, recip_gamma(b)))
            })
        })?,
        tolerance: 1e-14,
    });
    // Alternating terms reach ~1e4 for a = 0.3, z = -2; the loose
    // tolerance covers that cancellation.
    rows.push(Row {
        suite: "mittag_leffler",
        case: "E_{a,b}(z) = z E_{a,a+b}(z) + 1/Gamma(b), |z| <= 2".into(),
        error: max_over((0..=16).map(|i| -2.0 + 0.25 * f64::from(i)), |z| {
            max_over(
                [(0.5, 0.5), (0.5, 1.0), (0.7, 1.5), (0.3, 0.75)].into_iter(),
                |(a, b)| {
                    let lhs = ml(a, b, z)?;
                    Ok(rel(lhs, z * ml(a, a + b, z)? + recip_gamma(b)))
                },
            )
        })?,
        tolerance: 1e-10,
    });
    Ok(rows)
}

/// Runs every suite at `level`.
pub fn run_suites(level: Level, inject_fault: bool) -> Result<Vec<Row>, CliError> {
    let mut rows = power_law(level, inject_fault)?;
    rows.extend(euler()?);
    rows.extend(mittag_leffler_rows()?);
    Ok(rows)
}

pub fn render(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.name().len()).max().unwrap_or(0);
    let mut out = format!("{:<width$}  {:>22}  {:>8}  result\n", "case", "max error", "tol");
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>22}  {:>8}  {}\n",
            r.name(),
            fmt_f64(r.error),
            fmt_f64(r.tolerance),
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    out
}

pub fn validate(level: Level, inject_fault: bool) -> Result<(), CliError> {
    let rows = run_suites(level, inject_fault)?;
    print!("{}", render(&rows));
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed()).map(Row::name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join("; ")))
    }
}
