//! Convergence study: fooling-function error against the theorem bound over
//! a list of `n`.

use std::fmt::Write as _;
use std::time::Instant;

use crate::cubature::{
    build_rule_with_bracket, default_reference_resolution, reference_integral, theorem_bound,
    Exponent, RuleOptions,
};
use crate::error::{Error, Result};
use crate::functions::Fooling;
use crate::geometry::StarDomain;

const HEADER: &str = "# starquad-convergence v1";
const COLUMNS: &str =
    "n,nodes,h_n,sum_weights,remainder,fooling_error,theorem_bound,ratio,wall_time_s,status";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub nodes: usize,
    pub h_n: f64,
    pub sum_weights: f64,
    /// `mes ⋃ U_k`.
    pub remainder: f64,
    pub fooling_error: f64,
    pub theorem_bound: f64,
    pub ratio: f64,
    /// Zero unless timing was requested.
    pub wall_time_s: f64,
    /// `ok`, or the error that stopped the row.
    pub status: String,
}

impl ConvergenceRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn failed(n: usize, err: &Error) -> Self {
        ConvergenceRow {
            n,
            nodes: 0,
            h_n: f64::NAN,
            sum_weights: f64::NAN,
            remainder: f64::NAN,
            fooling_error: f64::NAN,
            theorem_bound: f64::NAN,
            ratio: f64::NAN,
            wall_time_s: 0.0,
            status: format!("error: {err}").replace([',', '\n'], ";"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub domain: String,
    pub exponent: Exponent,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log fooling_error` against `log n` over the
    /// upper half of the successful rows; NaN with fewer than two.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOptions {
    pub rule: RuleOptions,
    /// Reference grid for the fooling integral; per-row default when `None`.
    pub resolution: Option<usize>,
    /// Recorded in the report. The pipeline itself draws no random numbers.
    pub seed: u64,
    /// Wall times are nondeterministic; leave off for reproducible reports.
    pub record_timing: bool,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            rule: RuleOptions::default(),
            resolution: None,
            seed: 1,
            record_timing: false,
        }
    }
}

/// Builds the rule, the fooling-function error and the bound for each `n`.
/// A row that fails is recorded with its error and skipped by the fit.
pub fn run_convergence(
    dom: &StarDomain,
    domain_id: &str,
    exp: Exponent,
    n_list: &[usize],
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    if n_list.len() < 3 {
        return Err(Error::InvalidArgument("need at least three values of n".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n values must be strictly increasing".into()));
    }
    if domain_id.contains(['\n', '=']) {
        return Err(Error::InvalidArgument("domain id may not contain `=` or newlines".into()));
    }
    Exponent::new(exp.p(), dom.dim())?;
    let res = opts
        .rule
        .measure_resolution
        .unwrap_or_else(|| dom.default_measure_resolution());
    let bracket = dom.jordan_measure(res)?;
    let rows = n_list
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let mut row = match convergence_row(dom, exp, n, bracket, opts) {
                Ok(row) => row,
                Err(e) => ConvergenceRow::failed(n, &e),
            };
            if opts.record_timing {
                row.wall_time_s = start.elapsed().as_secs_f64();
            }
            row
        })
        .collect::<Vec<_>>();
    let slope = fit_slope(&rows);
    Ok(ConvergenceReport {
        domain: domain_id.to_string(),
        exponent: exp,
        seed: opts.seed,
        rows,
        slope,
    })
}

fn convergence_row(
    dom: &StarDomain,
    exp: Exponent,
    n: usize,
    bracket: crate::geometry::JordanBracket,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceRow> {
    let rule = build_rule_with_bracket(dom, n, bracket, &opts.rule)?;
    let fooling = Fooling::new(&rule, exp)?;
    let res = opts
        .resolution
        .unwrap_or_else(|| default_reference_resolution(dom, &rule));
    // The fooling function vanishes at every node, so the rule returns 0.
    let fooling_error = reference_integral(dom, &fooling, res)?.abs();
    let bound = theorem_bound(dom.dim(), exp, bracket.midpoint(), n)?;
    Ok(ConvergenceRow {
        n,
        nodes: rule.len(),
        h_n: rule.h_n(),
        sum_weights: rule.sum_weights,
        remainder: rule.remainder,
        fooling_error,
        theorem_bound: bound,
        ratio: fooling_error / bound,
        wall_time_s: 0.0,
        status: "ok".into(),
    })
}

/// Least squares over the upper `ceil(len / 2)` successful rows.
pub fn fit_slope(rows: &[ConvergenceRow]) -> f64 {
    let ok: Vec<&ConvergenceRow> = rows
        .iter()
        .filter(|r| r.is_ok() && r.fooling_error > 0.0)
        .collect();
    let upper = &ok[ok.len() / 2..];
    if upper.len() < 2 {
        return f64::NAN;
    }
    let pts: Vec<(f64, f64)> = upper
        .iter()
        .map(|r| ((r.n as f64).ln(), r.fooling_error.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// CSV text of the report. Floats use the shortest representation that
/// parses back to the same value.
pub fn write_report(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "# domain={}", report.domain);
    let _ = writeln!(out, "# p={}", report.exponent);
    let _ = writeln!(out, "# seed={}", report.seed);
    let _ = writeln!(out, "# slope={}", report.slope);
    let _ = writeln!(out, "{COLUMNS}");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.nodes,
            r.h_n,
            r.sum_weights,
            r.remainder,
            r.fooling_error,
            r.theorem_bound,
            r.ratio,
            r.wall_time_s,
            r.status
        );
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_value<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, text) = line.ok_or_else(|| parse_err(0, format!("missing `# {key}=` header")))?;
    text.strip_prefix("# ")
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .map(|v| (no, v))
        .ok_or_else(|| parse_err(no, format!("expected `# {key}=`")))
}

fn num<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{field}`")))
}

/// Inverse of [`write_report`].
pub fn parse_report(text: &str) -> Result<ConvergenceReport> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == HEADER => {}
        _ => return Err(parse_err(1, format!("expected `{HEADER}`"))),
    }
    let (_, domain) = header_value(lines.next(), "domain")?;
    let (no, p) = header_value(lines.next(), "p")?;
    // The dimension is not stored; every valid exponent exceeds 1.
    let exponent = Exponent::parse(p, 1).map_err(|e| parse_err(no, e.to_string()))?;
    let (no, seed) = header_value(lines.next(), "seed")?;
    let seed = num(no, seed, "seed")?;
    let (no, slope) = header_value(lines.next(), "slope")?;
    let slope = num(no, slope, "slope")?;
    match lines.next() {
        Some((_, l)) if l == COLUMNS => {}
        Some((no, _)) => return Err(parse_err(no, "unexpected column header")),
        None => return Err(parse_err(0, "missing column header")),
    }
    let mut rows = Vec::new();
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.splitn(10, ',').collect();
        if f.len() != 10 {
            return Err(parse_err(no, format!("expected 10 fields, found {}", f.len())));
        }
        rows.push(ConvergenceRow {
            n: num(no, f[0], "n")?,
            nodes: num(no, f[1], "node count")?,
            h_n: num(no, f[2], "h_n")?,
            sum_weights: num(no, f[3], "sum_weights")?,
            remainder: num(no, f[4], "remainder")?,
            fooling_error: num(no, f[5], "fooling_error")?,
            theorem_bound: num(no, f[6], "theorem_bound")?,
            ratio: num(no, f[7], "ratio")?,
            wall_time_s: num(no, f[8], "wall_time_s")?,
            status: f[9].to_string(),
        });
    }
    Ok(ConvergenceReport {
        domain: domain.to_string(),
        exponent,
        seed,
        rows,
        slope,
    })
}
