//! Problem configuration files.
//!
//! ```text
//! # Linear potential on three intervals
//! [problem]
//! q = x
//! breakpoints =                # comma-separated constant expressions
//! reference = -0.157663483, 2.09076065   # optional lambda_ref for n = 0, 1, ...
//!
//! [mesh]
//! N = 3
//! rule = midpoint              # or endpoint_average
//!
//! [quadrature]
//! K = 350                      # default: 500 for N = 1, 350 otherwise
//! h =                          # optional sinc step override
//!
//! [solve]
//! indices = 0-4                # list of n; a-b is an inclusive range
//! rank = 15
//! ranks = 15, 15, 15, 13, 11   # optional per-n rank, indexed by n
//! tol =                        # optional early stop
//! bisect_tol = 1e-13
//! out = results                # optional output directory
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ini::{Ini, ParseOption, WriteOption};
use slfd_core::basicsolver::DEFAULT_BISECT_TOL;
use slfd_core::coeffmesh::{Potential, Rule};
use slfd_core::exprparse;
use slfd_core::sincquad::MIN_K;

use crate::error::{CliError, CliResult};

pub const DEFAULT_K_SINGLE: usize = 500;
pub const DEFAULT_K: usize = 350;
pub const DEFAULT_RANK: usize = 10;

const KEYS: &[(&str, &[&str])] = &[
    ("problem", &["q", "breakpoints", "reference"]),
    ("mesh", &["N", "rule"]),
    ("quadrature", &["K", "h"]),
    (
        "solve",
        &["indices", "rank", "ranks", "tol", "bisect_tol", "out"],
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub q: String,
    pub breakpoints: Vec<f64>,
    /// Reference eigenvalues indexed by `n`.
    pub reference: Vec<f64>,
    pub intervals: usize,
    pub rule: Rule,
    pub k: Option<usize>,
    pub h: Option<f64>,
    pub indices: Vec<usize>,
    pub rank: usize,
    /// Per-index ranks indexed by `n`; indices past the end use `rank`.
    pub ranks: Vec<usize>,
    pub tol: Option<f64>,
    pub bisect_tol: f64,
    pub out: Option<PathBuf>,
}

impl ProblemConfig {
    /// A minimal configuration for potential `q` on `n` uniform intervals.
    pub fn new(q: impl Into<String>, intervals: usize) -> Self {
        ProblemConfig {
            q: q.into(),
            breakpoints: Vec::new(),
            reference: Vec::new(),
            intervals,
            rule: Rule::Midpoint,
            k: None,
            h: None,
            indices: vec![0],
            rank: DEFAULT_RANK,
            ranks: Vec::new(),
            tol: None,
            bisect_tol: DEFAULT_BISECT_TOL,
            out: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let opt = ParseOption {
            enabled_quote: false,
            enabled_escape: false,
            ..ParseOption::default()
        };
        let ini = Ini::load_from_str_opt(text, opt).map_err(|e| {
            CliError::config(format!("line {}, column {}: {}", e.line, e.col, e.msg))
        })?;
        check_keys(&ini)?;
        let get = |section: &str, key: &str| -> Option<&str> {
            ini.get_from(Some(section), key)
                .map(str::trim)
                .filter(|v| !v.is_empty())
        };

        let q = get("problem", "q").ok_or_else(|| CliError::config("[problem] q is required"))?;
        let mut cfg = ProblemConfig::new(q, 1);
        if let Some(v) = get("problem", "breakpoints") {
            cfg.breakpoints = split(v).map(constant).collect::<CliResult<_>>()?;
        }
        if let Some(v) = get("problem", "reference") {
            cfg.reference = split(v)
                .map(|s| number("reference", s))
                .collect::<CliResult<_>>()?;
        }
        if let Some(v) = get("mesh", "N") {
            cfg.intervals = integer("N", v)?;
        }
        if let Some(v) = get("mesh", "rule") {
            cfg.rule = parse_rule(v)?;
        }
        cfg.k = get("quadrature", "K")
            .map(|v| integer("K", v))
            .transpose()?;
        cfg.h = get("quadrature", "h").map(|v| number("h", v)).transpose()?;
        if let Some(v) = get("solve", "indices") {
            cfg.indices = parse_indices(v)?;
        }
        if let Some(v) = get("solve", "rank") {
            cfg.rank = integer("rank", v)?;
        }
        if let Some(v) = get("solve", "ranks") {
            cfg.ranks = split(v)
                .map(|s| integer("ranks", s))
                .collect::<CliResult<_>>()?;
        }
        cfg.tol = get("solve", "tol").map(|v| number("tol", v)).transpose()?;
        if let Some(v) = get("solve", "bisect_tol") {
            cfg.bisect_tol = number("bisect_tol", v)?;
        }
        cfg.out = get("solve", "out").map(PathBuf::from);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.intervals < 1 {
            return Err(CliError::config("N must be at least 1"));
        }
        if let Some(k) = self.k {
            if k < MIN_K {
                return Err(CliError::config(format!("K must be at least {MIN_K}")));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::config("h must be positive"));
            }
        }
        if self.indices.is_empty() {
            return Err(CliError::config("indices must not be empty"));
        }
        if let Some(b) = self.breakpoints.iter().find(|b| b.is_nan() || b.abs() >= 1.0) {
            return Err(CliError::config(format!(
                "breakpoint {b} is not inside (-1, 1)"
            )));
        }
        if let Some(t) = self.tol {
            if t.is_nan() || t <= 0.0 {
                return Err(CliError::config("tol must be positive"));
            }
        }
        if self.bisect_tol.is_nan() || self.bisect_tol <= 0.0 {
            return Err(CliError::config("bisect_tol must be positive"));
        }
        self.potential()?;
        Ok(())
    }

    pub fn potential(&self) -> CliResult<Potential> {
        Potential::parse(&self.q, &self.breakpoints).map_err(|e| CliError::Config {
            kind: e.name(),
            message: format!("q = {}: {e}", self.q),
        })
    }

    pub fn effective_k(&self) -> usize {
        self.k.unwrap_or(if self.intervals == 1 {
            DEFAULT_K_SINGLE
        } else {
            DEFAULT_K
        })
    }

    pub fn rank_for(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(self.rank)
    }

    pub fn reference_for(&self, n: usize) -> Option<f64> {
        self.reference.get(n).copied()
    }

    /// Serialises every setting, defaults resolved, so that reading the
    /// result back reproduces this configuration exactly.
    pub fn to_text(&self) -> String {
        let list = |v: &[String]| v.join(", ");
        let reals = |v: &[f64]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let ints = |v: &[usize]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let mut ini = Ini::new();
        ini.with_section(Some("problem"))
            .set("q", self.q.clone())
            .set("breakpoints", reals(&self.breakpoints))
            .set("reference", reals(&self.reference));
        ini.with_section(Some("mesh"))
            .set("N", self.intervals.to_string())
            .set("rule", rule_name(self.rule));
        ini.with_section(Some("quadrature"))
            .set("K", self.effective_k().to_string())
            .set("h", self.h.map(|h| h.to_string()).unwrap_or_default());
        ini.with_section(Some("solve"))
            .set("indices", ints(&self.indices))
            .set("rank", self.rank.to_string())
            .set("ranks", ints(&self.ranks))
            .set(
                "tol",
                self.tol.map(|t| format!("{t:e}")).unwrap_or_default(),
            )
            .set("bisect_tol", format!("{:e}", self.bisect_tol))
            .set(
                "out",
                self.out
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            );
        let mut buf = Vec::new();
        let opt = WriteOption {
            kv_separator: " = ",
            ..WriteOption::default()
        };
        ini.write_to_opt(&mut buf, opt).expect("writing to memory");
        let mut out = String::from("# effective configuration\n");
        let _ = write!(out, "{}", String::from_utf8_lossy(&buf));
        out
    }
}

pub fn rule_name(rule: Rule) -> &'static str {
    match rule {
        Rule::Midpoint => "midpoint",
        Rule::EndpointAverage => "endpoint_average",
    }
}

pub fn parse_rule(v: &str) -> CliResult<Rule> {
    match v {
        "midpoint" => Ok(Rule::Midpoint),
        "endpoint_average" => Ok(Rule::EndpointAverage),
        _ => Err(CliError::config(format!(
            "unknown rule '{v}' (expected midpoint or endpoint_average)"
        ))),
    }
}

/// `"0-4, 7"` -> `[0, 1, 2, 3, 4, 7]`, sorted and deduplicated.
pub fn parse_indices(v: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for part in split(v) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (integer("indices", a.trim())?, integer("indices", b.trim())?);
                if a > b {
                    return Err(CliError::config(format!("empty index range '{part}'")));
                }
                out.extend(a..=b);
            }
            None => out.push(integer("indices", part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn split(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn integer(key: &str, v: &str) -> CliResult<usize> {
    v.parse()
        .map_err(|_| CliError::config(format!("{key}: '{v}' is not a non-negative integer")))
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::config(format!(
            "{key}: '{v}' is not a finite number"
        ))),
    }
}

fn constant(text: &str) -> CliResult<f64> {
    let expr = exprparse::parse(text).map_err(|e| CliError::Config {
        kind: e.name(),
        message: format!("breakpoint '{text}': {e}"),
    })?;
    expr.evaluate(f64::NAN)
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::config(format!("breakpoint '{text}' is not a finite constant")))
}

fn check_keys(ini: &Ini) -> CliResult<()> {
    for (section, props) in ini.iter() {
        let Some(section) = section else {
            if let Some((k, _)) = props.iter().next() {
                return Err(CliError::config(format!("key '{k}' outside any section")));
            }
            continue;
        };
        let allowed = KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .ok_or_else(|| CliError::config(format!("unknown section [{section}]")))?
            .1;
        for (k, _) in props.iter() {
            if !allowed.contains(&k) {
                return Err(CliError::config(format!(
                    "unknown key '{k}' in [{section}]"
                )));
            }
            if props.get_all(k).count() > 1 {
                return Err(CliError::config(format!(
                    "duplicate key '{k}' in [{section}]"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# three intervals
[problem]
q = x   # linear
breakpoints = -1/3, 1/3
reference = -0.157663483, 2.09076065

[mesh]
N = 3
rule = endpoint_average

[quadrature]
K = 120

[solve]
indices = 0-2, 4
rank = 6
ranks = 7, 7
tol = 1e-12
";

    #[test]
    fn parses_every_section() {
        let c = ProblemConfig::parse(EXAMPLE).unwrap();
        assert_eq!(c.q, "x");
        assert_eq!(c.breakpoints, vec![-1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(c.reference.len(), 2);
        assert_eq!(c.intervals, 3);
        assert_eq!(c.rule, Rule::EndpointAverage);
        assert_eq!(c.effective_k(), 120);
        assert_eq!(c.indices, vec![0, 1, 2, 4]);
        assert_eq!((c.rank_for(1), c.rank_for(4)), (7, 6));
        assert_eq!(c.tol, Some(1e-12));
        assert_eq!(c.bisect_tol, DEFAULT_BISECT_TOL);
    }

    #[test]
    fn defaults_depend_on_the_mesh() {
        let c = ProblemConfig::parse("[problem]\nq = x\n").unwrap();
        assert_eq!(
            (c.intervals, c.effective_k(), c.indices.clone()),
            (1, 500, vec![0])
        );
        let c = ProblemConfig::parse("[problem]\nq = x\n[mesh]\nN = 2\n").unwrap();
        assert_eq!(c.effective_k(), 350);
    }

    #[test]
    fn written_config_reads_back_identically() {
        let mut c = ProblemConfig::parse(EXAMPLE).unwrap();
        c.h = Some(0.1234567890123);
        c.out = Some(PathBuf::from("runs/a"));
        let back = ProblemConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        for (a, b) in back.breakpoints.iter().zip(&c.breakpoints) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_invalid_settings() {
        let bad = [
            "[mesh]\nN = 3\n",
            "[problem]\nq = x\n[mesh]\nN = 0\n",
            "[problem]\nq = x\n[quadrature]\nK = 4\n",
            "[problem]\nq = x\n[solve]\nindices = ,\n",
            "[problem]\nq = x\nbreakpoints = 1\n",
            "[problem]\nq = x\nbreakpoints = x/2\n",
            "[problem]\nq = x\n[mesh]\nrule = trapezoid\n",
            "[problem]\nq = x\ncolour = red\n",
            "[problem]\nq = x\n[extra]\n",
            "[problem]\nq = x\n[solve]\nrank = -1\n",
            "[problem]\nq = x\n[solve]\nindices = 4-2\n",
        ];
        for text in bad {
            let e = ProblemConfig::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}");
        }
    }

    #[test]
    fn expression_errors_keep_their_name() {
        let e = ProblemConfig::parse("[problem]\nq = (x\n").unwrap_err();
        assert_eq!(e.name(), "SyntaxError");
        let e = ProblemConfig::parse("[problem]\nq = y\n").unwrap_err();
        assert_eq!(e.name(), "UnknownIdentifier");
    }

    #[test]
    fn index_lists_are_sorted_and_unique() {
        assert_eq!(parse_indices("3, 0-2, 2").unwrap(), vec![0, 1, 2, 3]);
    }
}
