//! Flat `key = value` run configuration.
//!
//! One setting per line, dotted keys, `#` starts a comment. See the
//! README for the full key list.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hpd_core::RhsSpec;

use crate::error::CliError;
use crate::format::fmt_f64;

/// A value that may be left for the solver to pick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auto<T> {
    Auto,
    Value(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub x0: f64,
    pub h: f64,
    pub b: f64,
    pub rhs: RhsSpec,
    pub grid_n: usize,
    pub grid_q: f64,
    pub grid_l: Auto<f64>,
    pub tol: f64,
    pub n_max: Auto<usize>,
    pub eps: f64,
    pub bound_terms: usize,
    pub output_dir: PathBuf,
}

pub const DEFAULT_N: usize = 1024;
pub const DEFAULT_Q: f64 = 2.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_EPS: f64 = 1e-8;
pub const DEFAULT_BOUND_TERMS: usize = 200;
pub const DEFAULT_OUTPUT_DIR: &str = "hpd-out";

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Entries {
    map: BTreeMap<String, Entry>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::config(line, content, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(CliError::config(line, key, "malformed key"));
            }
            if value.is_empty() {
                return Err(CliError::config(line, key, "missing value"));
            }
            let entry = Entry {
                value: value.to_string(),
                line,
                used: false,
            };
            if let Some(prev) = map.insert(key.to_string(), entry) {
                return Err(CliError::config(
                    line,
                    key,
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
        }
        Ok(Entries { map })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(CliError::config(
                    line,
                    key,
                    format!("`{v}` is not a finite number"),
                )),
            },
        }
    }

    fn f64_req(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?
            .ok_or_else(|| CliError::config(0, key, "required key is missing"))
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| CliError::config(line, key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn auto_f64(&mut self, key: &str) -> Result<Auto<f64>, CliError> {
        match self.map.get(key) {
            Some(e) if e.value == "auto" => {
                self.take(key);
                Ok(Auto::Auto)
            }
            _ => Ok(self.f64_opt(key)?.map_or(Auto::Auto, Auto::Value)),
        }
    }

    fn auto_usize(&mut self, key: &str) -> Result<Auto<usize>, CliError> {
        match self.map.get(key) {
            Some(e) if e.value == "auto" => {
                self.take(key);
                Ok(Auto::Auto)
            }
            _ => Ok(self.usize_opt(key)?.map_or(Auto::Auto, Auto::Value)),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |e| e.line)
    }

    fn rhs(&mut self, prefix: &str, nested: bool) -> Result<RhsSpec, CliError> {
        let key = format!("{prefix}.variant");
        let (variant, line) = self
            .take(&key)
            .ok_or_else(|| CliError::config(0, &key, "required key is missing"))?;
        let p = |name: &str| format!("{prefix}.{name}");
        let spec = match variant.as_str() {
            "power_source" => RhsSpec::PowerSource {
                c: self.f64_req(&p("c"))?,
                nu: self.f64_req(&p("nu"))?,
            },
            "linear_in_log" => RhsSpec::LinearInLog {
                lambda: self.f64_req(&p("lambda"))?,
                kappa: self.f64_opt(&p("kappa"))?.unwrap_or(0.0),
            },
            "power_nonlinear" => RhsSpec::PowerNonlinear {
                lambda: self.f64_req(&p("lambda"))?,
                mu: self.f64_opt(&p("mu"))?.unwrap_or(0.0),
                m: self.f64_req(&p("m"))?,
            },
            "sum" if !nested => {
                let count_key = p("terms");
                let count = self
                    .usize_opt(&count_key)?
                    .ok_or_else(|| CliError::config(line, &count_key, "required for rhs.variant = sum"))?;
                if count == 0 {
                    return Err(CliError::config(
                        self.line_of(&count_key),
                        &count_key,
                        "a sum needs at least one term",
                    ));
                }
                let terms = (0..count)
                    .map(|i| self.rhs(&format!("{prefix}.term.{i}"), true))
                    .collect::<Result<Vec<_>, _>>()?;
                RhsSpec::Sum(terms)
            }
            other => {
                let allowed = if nested {
                    "power_source, linear_in_log, power_nonlinear"
                } else {
                    "power_source, linear_in_log, power_nonlinear, sum"
                };
                return Err(CliError::config(
                    line,
                    &key,
                    format!("unknown variant `{other}` (expected one of {allowed})"),
                ));
            }
        };
        spec.validate()
            .map_err(|e| CliError::config(line, &key, e.to_string()))?;
        Ok(spec)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut e = Entries::parse(text)?;
        let cfg = RunConfig {
            alpha: e.f64_req("problem.alpha")?,
            beta: e.f64_req("problem.beta")?,
            a: e.f64_opt("problem.a")?.unwrap_or(1.0),
            x0: e.f64_req("problem.x0")?,
            h: e.f64_req("problem.h")?,
            b: e.f64_req("problem.b")?,
            rhs: e.rhs("rhs", false)?,
            grid_n: e.usize_opt("grid.N")?.unwrap_or(DEFAULT_N),
            grid_q: e.f64_opt("grid.q")?.unwrap_or(DEFAULT_Q),
            grid_l: e.auto_f64("grid.L")?,
            tol: e.f64_opt("solver.tol")?.unwrap_or(DEFAULT_TOL),
            n_max: e.auto_usize("solver.n_max")?,
            eps: e.f64_opt("solver.eps")?.unwrap_or(DEFAULT_EPS),
            bound_terms: e.usize_opt("bounds.terms")?.unwrap_or(DEFAULT_BOUND_TERMS),
            output_dir: e
                .take("output.dir")
                .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), |(v, _)| PathBuf::from(v)),
        };
        if let Some((key, entry)) = e.map.iter().find(|(_, v)| !v.used) {
            return Err(CliError::config(entry.line, key, "unknown key"));
        }
        cfg.check_ranges(&e)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))?;
        let parsed = if text.trim_start().starts_with('{') {
            Self::from_report(&text)
        } else {
            Self::parse(&text)
        };
        parsed.map_err(|err| err.in_file(path))
    }

    /// Reads the resolved config embedded in a `report.json`.
    pub fn from_report(json: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(json).map_err(|e| CliError::config(e.line(), "report", e.to_string()))?;
        let Some(map) = value.get("config").and_then(|v| v.as_object()) else {
            return Err(CliError::config(
                0,
                "config",
                "report has no embedded config object",
            ));
        };
        let mut text = String::new();
        for (k, v) in map {
            let Some(v) = v.as_str() else {
                return Err(CliError::config(0, k, "embedded values must be strings"));
            };
            let _ = writeln!(text, "{k} = {v}");
        }
        Self::parse(&text)
    }

    fn check_ranges(&self, e: &Entries) -> Result<(), CliError> {
        let fail = |key: &str, msg: &str| Err(CliError::config(e.line_of(key), key, msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("problem.alpha", "must satisfy 0 < alpha < 1");
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return fail("problem.beta", "must satisfy 0 <= beta <= 1");
        }
        if !(self.a > 0.0) {
            return fail("problem.a", "must be positive");
        }
        if !(self.h > 0.0) {
            return fail("problem.h", "must be positive");
        }
        if !(self.b > 0.0) {
            return fail("problem.b", "must be positive");
        }
        if self.grid_n < 4 {
            return fail("grid.N", "must be at least 4");
        }
        if !(self.grid_q >= 1.0) {
            return fail("grid.q", "must be at least 1");
        }
        if let Auto::Value(l) = self.grid_l {
            if !(l > 0.0 && l <= self.h) {
                return fail("grid.L", "must satisfy 0 < L <= problem.h");
            }
        }
        if !(self.tol > 0.0) {
            return fail("solver.tol", "must be positive");
        }
        if self.n_max == Auto::Value(0) {
            return fail("solver.n_max", "must be at least 1");
        }
        if !(self.eps > 0.0) {
            return fail("solver.eps", "must be positive");
        }
        if self.bound_terms == 0 {
            return fail("bounds.terms", "must be at least 1");
        }
        Ok(())
    }

    /// Every setting as `(key, value)` pairs, in file order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("problem.alpha", fmt_f64(self.alpha));
        put("problem.beta", fmt_f64(self.beta));
        put("problem.a", fmt_f64(self.a));
        put("problem.x0", fmt_f64(self.x0));
        put("problem.h", fmt_f64(self.h));
        put("problem.b", fmt_f64(self.b));
        rhs_entries("rhs", &self.rhs, &mut put);
        put("grid.N", self.grid_n.to_string());
        put("grid.q", fmt_f64(self.grid_q));
        put("grid.L", auto_text(self.grid_l, |v| fmt_f64(*v)));
        put("solver.tol", fmt_f64(self.tol));
        put("solver.n_max", auto_text(self.n_max, |v| v.to_string()));
        put("solver.eps", fmt_f64(self.eps));
        put("bounds.terms", self.bound_terms.to_string());
        put("output.dir", self.output_dir.display().to_string());
        out
    }

    /// Config file text that parses back to `self`.
    #[cfg(test)]
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn auto_text<T>(v: Auto<T>, f: impl Fn(&T) -> String) -> String {
    match v {
        Auto::Auto => "auto".to_string(),
        Auto::Value(x) => f(&x),
    }
}

fn rhs_entries(prefix: &str, spec: &RhsSpec, put: &mut impl FnMut(&str, String)) {
    let k = |name: &str| format!("{prefix}.{name}");
    match spec {
        RhsSpec::PowerSource { c, nu } => {
            put(&k("variant"), "power_source".into());
            put(&k("c"), fmt_f64(*c));
            put(&k("nu"), fmt_f64(*nu));
        }
        RhsSpec::LinearInLog { lambda, kappa } => {
            put(&k("variant"), "linear_in_log".into());
            put(&k("lambda"), fmt_f64(*lambda));
            put(&k("kappa"), fmt_f64(*kappa));
        }
        RhsSpec::PowerNonlinear { lambda, mu, m } => {
            put(&k("variant"), "power_nonlinear".into());
            put(&k("lambda"), fmt_f64(*lambda));
            put(&k("mu"), fmt_f64(*mu));
            put(&k("m"), fmt_f64(*m));
        }
        RhsSpec::Sum(terms) => {
            put(&k("variant"), "sum".into());
            put(&k("terms"), terms.len().to_string());
            for (i, t) in terms.iter().enumerate() {
                rhs_entries(&format!("{prefix}.term.{i}"), t, put);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# linear test problem
problem.alpha = 0.5
problem.beta = 0.5
problem.x0 = 1
problem.h = 1
problem.b = 1   # box half-width
rhs.variant = linear_in_log
rhs.lambda = 0.5
grid.N = 256
";

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::parse(BASIC).unwrap();
        assert_eq!(
            c.rhs,
            RhsSpec::LinearInLog {
                lambda: 0.5,
                kappa: 0.0
            }
        );
        assert_eq!((c.grid_n, c.grid_q, c.grid_l), (256, 2.0, Auto::Auto));
        assert_eq!(c.n_max, Auto::Auto);
        assert_eq!(c.a, 1.0);
    }

    #[test]
    fn text_round_trip() {
        let sum =
            "problem.alpha = 0.3\nproblem.beta = 0\nproblem.x0 = -0.1\nproblem.h = 2\nproblem.b = 0.5\n\
                   rhs.variant = sum\nrhs.terms = 2\nrhs.term.0.variant = power_source\nrhs.term.0.c = 0.1\n\
                   rhs.term.0.nu = 0.3\nrhs.term.1.variant = power_nonlinear\nrhs.term.1.lambda = -1\n\
                   rhs.term.1.m = 2\ngrid.L = 0.25\nsolver.n_max = 40\n";
        for text in [BASIC, sum] {
            let c = RunConfig::parse(text).unwrap();
            assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
        }
    }

    #[test]
    fn diagnostics_name_line_and_key() {
        let err = RunConfig::parse(&BASIC.replace("grid.N = 256", "grid.N = many")).unwrap_err();
        assert_eq!(
            err.to_string(),
            "line 9: grid.N: `many` is not a non-negative integer"
        );
        let err = RunConfig::parse(&format!("{BASIC}grid.M = 3\n")).unwrap_err();
        assert_eq!(err.to_string(), "line 10: grid.M: unknown key");
        let err = RunConfig::parse(&BASIC.replace("problem.x0 = 1\n", "")).unwrap_err();
        assert_eq!(err.to_string(), "problem.x0: required key is missing");
        let err = RunConfig::parse(&format!("{BASIC}grid.N 5\n")).unwrap_err();
        assert!(err.to_string().starts_with("line 10:"));
        let err = RunConfig::parse(&format!("{BASIC}grid.N = 5\n")).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = RunConfig::parse(&BASIC.replace("problem.alpha = 0.5", "problem.alpha = 1.5")).unwrap_err();
        assert_eq!(
            err.to_string(),
            "line 2: problem.alpha: must satisfy 0 < alpha < 1"
        );
        let err = RunConfig::parse(&BASIC.replace("linear_in_log", "cubic")).unwrap_err();
        assert!(err.to_string().contains("unknown variant `cubic`"));
    }
}
