//! Test functions with certified gradient bounds.
//!
//! A function belongs to the unit ball of the class when
//! `‖ |∇f|₁ ‖_{L_p(Q)} <= 1`; each function reports an upper bound on that
//! norm together with a short derivation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cubature::Exponent;
use crate::error::{Error, Result};
use crate::geometry::{Shape, StarDomain};
use crate::partition::{CubatureRule, NodeLocator};

pub trait TestFunction: Sync {
    fn name(&self) -> &str;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Upper bound on `‖ |∇f|₁ ‖_{L_p(Q)}`.
    fn certified_norm(&self) -> f64;
    /// Upper bound on `|∇f(x)|₁` over `Q`.
    fn gradient_bound(&self) -> f64;
    /// Closed-form `∫_Q f`, when known.
    fn exact_integral(&self) -> Option<f64> {
        None
    }
    /// How `certified_norm` was obtained.
    fn certificate(&self) -> String;
}

/// Names accepted by [`named_function`].
pub const FUNCTION_NAMES: &[&str] = &["const", "linear-x1", "sin-sum", "fooling"];

/// `L_p` norm of a constant `c` over a set of measure at most `mes`.
fn const_norm(c: f64, mes: f64, exp: Exponent) -> f64 {
    if exp.is_infinite() {
        c
    } else {
        c * mes.powf(1.0 / exp.p())
    }
}

/// `f ≡ 1`.
#[derive(Debug, Clone)]
pub struct Constant {
    measure: Option<f64>,
}

impl Constant {
    pub fn new(dom: Option<&StarDomain>) -> Self {
        Constant {
            measure: dom.map(|d| d.exact_measure()),
        }
    }
}

impl TestFunction for Constant {
    fn name(&self) -> &str {
        "const"
    }
    fn value(&self, _x: &[f64]) -> f64 {
        1.0
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn certified_norm(&self) -> f64 {
        0.0
    }
    fn gradient_bound(&self) -> f64 {
        0.0
    }
    fn exact_integral(&self) -> Option<f64> {
        self.measure
    }
    fn certificate(&self) -> String {
        "gradient vanishes identically".into()
    }
}

/// `f(x) = x_1`, not rescaled.
#[derive(Debug, Clone)]
pub struct LinearX1 {
    norm: f64,
    integral: Option<f64>,
}

impl LinearX1 {
    pub fn new(dom: &StarDomain, mes_upper: f64, exp: Exponent) -> Self {
        // Shapes symmetric under a rotation about o have their centroid at o.
        let symmetric = !matches!(
            dom.shape(),
            Shape::FourierRadial { .. } | Shape::Tabulated { .. }
        );
        LinearX1 {
            norm: const_norm(1.0, mes_upper, exp),
            integral: symmetric.then(|| dom.center()[0] * dom.exact_measure()),
        }
    }
}

impl TestFunction for LinearX1 {
    fn name(&self) -> &str {
        "linear-x1"
    }
    fn value(&self, x: &[f64]) -> f64 {
        x[0]
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        g[0] = 1.0;
        g
    }
    fn certified_norm(&self) -> f64 {
        self.norm
    }
    fn gradient_bound(&self) -> f64 {
        1.0
    }
    fn exact_integral(&self) -> Option<f64> {
        self.integral
    }
    fn certificate(&self) -> String {
        "|grad f|_1 = 1, so the norm is mes(Q)^(1/p) (not rescaled into the class)".into()
    }
}

/// `f(x) = s · sin(Σ x_i) / d` with `s = mes(Q)^(-1/p)` (upper bracket).
#[derive(Debug, Clone)]
pub struct SinSum {
    scale: f64,
    dim: usize,
}

impl SinSum {
    pub fn new(dim: usize, mes_upper: f64, exp: Exponent) -> Self {
        SinSum {
            scale: 1.0 / const_norm(1.0, mes_upper, exp),
            dim,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl TestFunction for SinSum {
    fn name(&self) -> &str {
        "sin-sum"
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.scale * x.iter().sum::<f64>().sin() / self.dim as f64
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let g = self.scale * x.iter().sum::<f64>().cos() / self.dim as f64;
        vec![g; x.len()]
    }
    fn certified_norm(&self) -> f64 {
        1.0
    }
    fn gradient_bound(&self) -> f64 {
        self.scale
    }
    fn certificate(&self) -> String {
        format!(
            "|grad f|_1 = s |cos(sum x)| <= s = {} and s * mes(Q)^(1/p) <= 1",
            self.scale
        )
    }
}

/// `f(x) = σ · min_k |x - x_k|∞`, which vanishes at every node.
#[derive(Debug, Clone)]
pub struct Fooling {
    sigma: f64,
    norm: f64,
    locator: NodeLocator,
}

impl Fooling {
    /// `σ = 1` for `p = ∞`, otherwise `σ = mes(Q)^(-1/p)` with the bracket
    /// midpoint as `mes(Q)`.
    pub fn new(rule: &CubatureRule, exp: Exponent) -> Result<Self> {
        if rule.is_empty() {
            return Err(Error::InvalidArgument("fooling function needs at least one node".into()));
        }
        let mid = rule.bracket.midpoint();
        let sigma = 1.0 / const_norm(1.0, mid, exp);
        Ok(Fooling {
            sigma,
            norm: sigma * const_norm(1.0, rule.bracket.outer, exp),
            locator: NodeLocator::from_rule(rule)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl TestFunction for Fooling {
    fn name(&self) -> &str {
        "fooling"
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.sigma * self.locator.nearest(x).0
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (_, k) = self.locator.nearest(x);
        let node = &self.locator.points()[k];
        let (axis, _) = x
            .iter()
            .zip(node)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold((0, -1.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let mut g = vec![0.0; x.len()];
        g[axis] = self.sigma * (x[axis] - node[axis]).signum();
        g
    }
    fn certified_norm(&self) -> f64 {
        self.norm
    }
    fn gradient_bound(&self) -> f64 {
        self.sigma
    }
    fn certificate(&self) -> String {
        format!(
            "|grad f|_1 = sigma = {} almost everywhere; norm <= sigma * mes_outer^(1/p)",
            self.sigma
        )
    }
}

/// Builds one of [`FUNCTION_NAMES`].
pub fn named_function(
    name: &str,
    dom: &StarDomain,
    rule: &CubatureRule,
    exp: Exponent,
) -> Result<Box<dyn TestFunction>> {
    let outer = rule.bracket.outer;
    Ok(match name {
        "const" => Box::new(Constant::new(Some(dom))),
        "linear-x1" => Box::new(LinearX1::new(dom, outer, exp)),
        "sin-sum" => Box::new(SinSum::new(dom.dim(), outer, exp)),
        "fooling" => Box::new(Fooling::new(rule, exp)?),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown test function `{other}` (expected one of {})",
                FUNCTION_NAMES.join(", ")
            )))
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSpotCheck {
    pub samples: usize,
    pub max_gradient_l1: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Samples `samples` uniform points of `Q` (rejection from the bounding box)
/// and compares `|∇f|₁` with the pointwise certificate.
pub fn spot_check_gradient(
    f: &dyn TestFunction,
    dom: &StarDomain,
    seed: u64,
    samples: usize,
) -> GradientSpotCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bbox = dom.bbox();
    let d = dom.dim();
    let mut max_g: f64 = 0.0;
    let mut taken = 0;
    let mut x = vec![0.0; d];
    while taken < samples {
        for (a, xa) in x.iter_mut().enumerate() {
            *xa = rng.gen_range(bbox.min[a]..bbox.max[a]);
        }
        if !dom.contains(&x) {
            continue;
        }
        taken += 1;
        max_g = max_g.max(f.gradient(&x).iter().map(|g| g.abs()).sum());
    }
    let bound = f.gradient_bound();
    GradientSpotCheck {
        samples,
        max_gradient_l1: max_g,
        bound,
        passed: max_g <= bound * (1.0 + 1e-12),
    }
}
