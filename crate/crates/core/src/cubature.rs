//! The asymptotic constant `c(d, p)`, the error bound, rule construction and
//! evaluation, and grid reference integrals.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::geometry::{JordanBracket, StarDomain};
use crate::nodes::{build_nodeset_with, NodeOptions};
use crate::partition::{compute_weights, CubatureRule};
use crate::quadrature::{integrate_adaptive, pairwise_sum};

/// Largest grid a reference integral may visit.
const MAX_REFERENCE_CELLS: u64 = 1 << 40;

/// Summability exponent `p in (d, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    p: f64,
}

impl Exponent {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if p.is_nan() || p <= d as f64 {
            return Err(Error::ExponentTooSmall { p, d });
        }
        Ok(Exponent { p })
    }

    pub fn infinity() -> Self {
        Exponent { p: f64::INFINITY }
    }

    /// Accepts a number or `inf` / `infinity`.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let p = match t.as_str() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            _ => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad exponent `{s}`")))?,
        };
        Self::new(p, d)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// `p' = p / (p - 1)`, and `1` for `p = ∞`.
    pub fn conjugate(&self) -> f64 {
        if self.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

/// `c(d, p) = (1/d) ‖ |x|∞^(1-d) - |x|∞ ‖_{L_p'}` over the unit ∞-ball.
///
/// Level sets of `|x|∞` reduce the norm to
/// `(1/d) [d 2^d ∫₀¹ t^(d-1) (t^(1-d) - t)^p' dt]^(1/p')`. The integrand
/// equals `t^((d-1)(1-p')) (1 - t^d)^p'`, singular at `0`; with
/// `t = s^a`, `a = 1 / (1 + (d-1)(1-p'))`, it becomes the bounded
/// `a (1 - s^(a d))^p'`, integrated adaptively with at most `quad_points`
/// subintervals.
pub fn cdp_constant(d: usize, exp: Exponent, quad_points: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    if exp.p() <= d as f64 {
        return Err(Error::ExponentTooSmall { p: exp.p(), d });
    }
    let df = d as f64;
    let two_d = 2f64.powi(d as i32);
    if exp.is_infinite() {
        return Ok(two_d * df / (df + 1.0));
    }
    let q = exp.conjugate();
    let a = 1.0 / (1.0 + (df - 1.0) * (1.0 - q));
    let r = integrate_adaptive(
        |s: f64| a * (1.0 - s.powf(a * df)).max(0.0).powf(q),
        0.0,
        1.0,
        1e-15,
        1e-13,
        quad_points.max(1),
    );
    Ok((df * two_d * r.value).powf(1.0 / q) / df)
}

/// Default subinterval budget for [`cdp_constant`].
pub const DEFAULT_QUAD_POINTS: usize = 1000;

/// Leading term `c(d,p) (mes Q / 2^d)^(1/d + 1/p') n^(-1/d)` of the optimal
/// error.
pub fn theorem_bound(d: usize, exp: Exponent, mes_q: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(mes_q > 0.0) {
        return Err(Error::InvalidArgument(format!("measure must be positive, got {mes_q}")));
    }
    let c = cdp_constant(d, exp, DEFAULT_QUAD_POINTS)?;
    let df = d as f64;
    let scale = (mes_q / 2f64.powi(d as i32)).powf(1.0 / df + 1.0 / exp.conjugate());
    Ok(c * scale * (n as f64).powf(-1.0 / df))
}

/// Options for [`build_rule`].
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOptions {
    pub nodes: NodeOptions,
    /// Subcells per fine-cube side for measuring the cells.
    pub subgrid: usize,
    /// Grid resolution of the Jordan bracket; the domain default when `None`.
    pub measure_resolution: Option<usize>,
}

impl Default for RuleOptions {
    fn default() -> Self {
        RuleOptions {
            nodes: NodeOptions::default(),
            subgrid: 8,
            measure_resolution: None,
        }
    }
}

/// Brackets `mes Q`, then builds the nodes and weights for `n`.
pub fn build_rule(dom: &StarDomain, n: usize, opts: &RuleOptions) -> Result<CubatureRule> {
    let res = opts
        .measure_resolution
        .unwrap_or_else(|| dom.default_measure_resolution());
    let bracket = dom.jordan_measure(res)?;
    build_rule_with_bracket(dom, n, bracket, opts)
}

/// Builds the rule for `n` using `bracket.midpoint()` as `mes Q`.
pub fn build_rule_with_bracket(
    dom: &StarDomain,
    n: usize,
    bracket: JordanBracket,
    opts: &RuleOptions,
) -> Result<CubatureRule> {
    let set = build_nodeset_with(dom, n, bracket.midpoint(), &opts.nodes)?;
    compute_weights(dom, &set, opts.subgrid, bracket)
}

/// `Σ c_k f(x_k)`.
pub fn evaluate(rule: &CubatureRule, f: &dyn TestFunction) -> f64 {
    rule.apply(|x| f.value(x))
}

/// Midpoint rule over the `resolution^d` bounding-box grid, keeping cells
/// whose centers lie in `Q`. Rows along the first axis are summed in
/// parallel and combined by a fixed pairwise reduction, so the result does
/// not depend on the thread count. For Lipschitz `f` the error is
/// `O(1 / resolution)`.
pub fn reference_integral_with<F>(dom: &StarDomain, f: F, resolution: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let d = dom.dim();
    if (resolution as u64)
        .checked_pow(d as u32)
        .map_or(true, |c| c > MAX_REFERENCE_CELLS)
    {
        return Err(Error::ResolutionOverflow { resolution, dim: d });
    }
    let bbox = dom.bbox();
    let step: Vec<f64> = (0..d).map(|a| bbox.extent(a) / resolution as f64).collect();
    let cell: f64 = step.iter().product();
    let rest = resolution.pow(d as u32 - 1);
    let rows: Vec<f64> = (0..resolution)
        .into_par_iter()
        .map(|i0| {
            let mut x = vec![0.0; d];
            x[0] = bbox.min[0] + step[0] * (i0 as f64 + 0.5);
            let mut sum = 0.0;
            for r in 0..rest {
                let mut rem = r;
                for a in (1..d).rev() {
                    x[a] = bbox.min[a] + step[a] * ((rem % resolution) as f64 + 0.5);
                    rem /= resolution;
                }
                if dom.contains(&x) {
                    sum += f(&x);
                }
            }
            sum
        })
        .collect();
    Ok(pairwise_sum(&rows) * cell)
}

pub fn reference_integral(dom: &StarDomain, f: &dyn TestFunction, resolution: usize) -> Result<f64> {
    reference_integral_with(dom, |x| f.value(x), resolution)
}

/// Four times the grid implied by the rule: fine cells across the largest
/// bounding-box extent, times the subgrid.
pub fn default_reference_resolution(dom: &StarDomain, rule: &CubatureRule) -> usize {
    let cells = (dom.bbox().max_extent() / (2.0 * rule.h_n())).ceil() as usize;
    4 * cells.max(1) * rule.subgrid
}

/// `|∫_Q f - Σ c_k f(x_k)|` with the reference integral at `resolution`.
pub fn empirical_error(
    dom: &StarDomain,
    rule: &CubatureRule,
    f: &dyn TestFunction,
    resolution: usize,
) -> Result<f64> {
    Ok((reference_integral(dom, f, resolution)? - evaluate(rule, f)).abs())
}
