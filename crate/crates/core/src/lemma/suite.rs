//! Randomized checks of every closed form in the lemma lab, in a fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::maps::{
    det_identity, determinant, fd_jacobian, jacobian_p, jacobian_phi, jacobian_psi, p_map,
    phi_map, psi_map,
};
use super::planar::{distance_bound_check, geometric_sense_check};
use super::preimage::{preimage_count, scan_root_count};
use super::regions::w_region_survey;
use super::{dist2, AuxConfig};
use crate::cubature::{build_rule, RuleOptions};
use crate::error::Result;
use crate::geometry::{random_unit, StarDomain};
use crate::quadrature::gauss_legendre;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Worst observed error (or count, for counting checks).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub det_instances: usize,
    pub fd_configs: usize,
    pub geometry_configs: usize,
    pub distance_pairs: usize,
    pub preimage_configs: usize,
    pub scan_samples: usize,
    pub segment_samples: usize,
    /// `n` for the remainder-region check on the cross; skipped when `None`.
    pub w_region_n: Option<usize>,
    pub w_region_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            det_instances: 1000,
            fd_configs: 100,
            geometry_configs: 1000,
            distance_pairs: 10_000,
            preimage_configs: 10_000,
            scan_samples: 100_000,
            segment_samples: 1000,
            w_region_n: Some(65_536),
            w_region_samples: 100_000,
        }
    }
}

/// A random admissible configuration in `R^d`: `x` and `x*` outside the
/// ball, `r` one of `R`, `R/8` or uniform in `(0, R]`, `t` uniform in
/// `[0, 1]`.
pub fn random_config<R: Rng>(rng: &mut R, d: usize) -> AuxConfig {
    let o: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let big_r = rng.gen_range(0.25..1.0);
    let r = match rng.gen_range(0..3) {
        0 => big_r,
        1 => big_r / 8.0,
        _ => big_r * rng.gen_range(0.01..=1.0),
    };
    let u = random_unit(rng, d);
    let rho = big_r * rng.gen_range(1.1..3.0);
    let node: Vec<f64> = (0..d).map(|i| o[i] + rho * u[i]).collect();
    let x = loop {
        let v = random_unit(rng, d);
        let len = big_r * rng.gen_range(0.01..2.0);
        let x: Vec<f64> = (0..d).map(|i| node[i] + len * v[i]).collect();
        if dist2(&x, &o) > 1.05 * big_r {
            break x;
        }
    };
    AuxConfig {
        o,
        big_r,
        r,
        node,
        x,
        t: rng.gen_range(0.0..=1.0),
    }
}

/// `|f(y) - f(x) - ∫₀¹ (y - x, ∇f((1-t) x + t y)) dt|` with the 64-point
/// Gauss–Legendre rule.
pub fn segment_identity_residual(
    f: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    y: &[f64],
) -> f64 {
    let (nodes, weights) = gauss_legendre(64);
    let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let integral: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(s, w)| {
            let t = 0.5 * (s + 1.0);
            let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            let g = grad(&p);
            0.5 * w * diff.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum();
    (f(y) - f(x) - integral).abs()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn check(name: &'static str, samples: usize, worst: f64, tolerance: f64, detail: String) -> LemmaCheck {
    LemmaCheck {
        name,
        passed: worst <= tolerance,
        samples,
        worst,
        tolerance,
        detail,
    }
}

fn det_check(opts: &SuiteOptions) -> Result<LemmaCheck> {
    let mut rng = rng_for(opts.seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.det_instances {
        let d = rng.gen_range(2..=6);
        let alpha: f64 = rng.sample::<f64, _>(StandardNormal) * 2.0;
        let beta: f64 = rng.sample::<f64, _>(StandardNormal) * 2.0;
        let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let (formula, direct) = det_identity(alpha, beta, &u, &v)?;
        worst = worst.max((formula - direct).abs() / (1.0 + direct.abs()));
    }
    Ok(check(
        "det-identity",
        opts.det_instances,
        worst,
        1e-9,
        "closed form vs Gaussian elimination, d in 2..=6".into(),
    ))
}

fn p_map_check() -> LemmaCheck {
    let base = AuxConfig {
        o: vec![0.0, 0.0],
        big_r: 1.0,
        r: 1.0,
        node: vec![-2.0, 0.0],
        x: vec![2.0, 0.0],
        t: 1.0,
    };
    let e1 = dist2(&p_map(&base), &[0.0, 0.0]);
    let diag = AuxConfig {
        node: vec![0.0, 4.0],
        x: vec![4.0, 0.0],
        ..base.clone()
    };
    let c = 4.0 / (2.0 + 4.0 * 2f64.sqrt());
    let e2 = dist2(&p_map(&diag), &[c, c]);
    let same = base.with_x(base.node.clone());
    let e3 = dist2(&p_map(&same), &same.node);
    check(
        "p-map-examples",
        3,
        e1.max(e2).max(e3),
        1e-15,
        "symmetric, diagonal and x = x* cases".into(),
    )
}

fn geometric_check(opts: &SuiteOptions) -> LemmaCheck {
    let mut rng = rng_for(opts.seed, 2);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for _ in 0..opts.geometry_configs {
        let d = rng.gen_range(2..=5);
        let cfg = random_config(&mut rng, d);
        if let Ok(res) = geometric_sense_check(&cfg) {
            used += 1;
            worst = worst.max(res);
        }
    }
    check(
        "geometric-sense",
        used,
        worst,
        1e-10,
        format!("diagonal intersection vs p-map, {} degenerate skipped", opts.geometry_configs - used),
    )
}

/// Random pairs `(x, x*)` of the domain outside the ball with
/// `|x - x*|∞ <= R`.
fn random_pair<R: Rng>(rng: &mut R, dom: &StarDomain) -> (Vec<f64>, Vec<f64>) {
    let bbox = dom.bbox();
    let d = dom.dim();
    let big_r = dom.ball_radius();
    let o = dom.center();
    loop {
        let x: Vec<f64> = (0..d).map(|a| rng.gen_range(bbox.min[a]..bbox.max[a])).collect();
        if !dom.contains(&x) || dist2(&x, o) <= big_r {
            continue;
        }
        for _ in 0..16 {
            let y: Vec<f64> = x.iter().map(|v| v + rng.gen_range(-big_r..big_r)).collect();
            if dom.contains(&y) && dist2(&y, o) > big_r {
                return (x, y);
            }
        }
    }
}

fn distance_check(opts: &SuiteOptions) -> Result<LemmaCheck> {
    let cross = StarDomain::cross(2, 1.0, 3.0, 0.5)?;
    let mut rng = rng_for(opts.seed, 3);
    let mut worst_ratio: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..opts.distance_pairs {
        let (x, node) = random_pair(&mut rng, &cross);
        let cfg = AuxConfig {
            o: cross.center().to_vec(),
            big_r: 0.5,
            r: 0.5,
            node,
            x,
            t: 1.0,
        };
        let rep = distance_bound_check(&cross, &cfg)?;
        if rep.rhs > 0.0 {
            worst_ratio = worst_ratio.max(rep.lhs / rep.rhs);
        }
        failures += usize::from(!rep.passed());
    }
    Ok(LemmaCheck {
        name: "distance-bound",
        passed: failures == 0,
        samples: opts.distance_pairs,
        worst: failures as f64,
        tolerance: 0.0,
        detail: format!("cross(1,3), r = R = 0.5; largest lhs/rhs = {worst_ratio:.4}"),
    })
}

fn jacobian_checks(opts: &SuiteOptions) -> Result<Vec<LemmaCheck>> {
    let mut rng = rng_for(opts.seed, 4);
    let (mut wp, mut wphi, mut wpsi, mut wid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..opts.fd_configs {
        let d = rng.gen_range(2..=4);
        let cfg = random_config(&mut rng, d);
        let jp = jacobian_p(&cfg)?;
        let fd = fd_jacobian(|x| p_map(&cfg.with_x(x.to_vec())), &cfg.x);
        let diff: Vec<Vec<f64>> = jp
            .iter()
            .zip(&fd)
            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u - v).collect())
            .collect();
        wp = wp.max(max_abs(&diff) / max_abs(&jp));

        let phi = jacobian_phi(&cfg)?;
        let fd_phi = determinant(&fd_jacobian(|x| phi_map(&cfg.with_x(x.to_vec())), &cfg.x));
        if phi != 0.0 {
            wphi = wphi.max((phi - fd_phi).abs() / phi.abs());
        }
        let psi = jacobian_psi(&cfg)?;
        let fd_psi = determinant(&fd_jacobian(|x| psi_map(&cfg.with_x(x.to_vec())), &cfg.x));
        wpsi = wpsi.max((psi - fd_psi).abs() / psi.abs());

        let one = AuxConfig { t: 1.0, ..cfg };
        wid = wid.max((jacobian_psi(&one)? - 1.0).abs());
    }
    let n = opts.fd_configs;
    Ok(vec![
        check("jacobian-p", n, wp, 1e-6, "closed form vs central differences".into()),
        check("jacobian-phi", n, wphi, 1e-6, "closed form vs central differences".into()),
        check("jacobian-psi", n, wpsi, 1e-6, "closed form vs central differences".into()),
        check("psi-identity", n, wid, 1e-15, "det D psi at t = 1".into()),
    ])
}

fn preimage_check(opts: &SuiteOptions) -> Result<LemmaCheck> {
    let outcomes: Vec<Result<(usize, bool, bool)>> = (0..opts.preimage_configs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(opts.seed, 1000 + i as u64);
            let d = rng.gen_range(2..=4);
            let mut cfg = random_config(&mut rng, d);
            cfg.t = rng.gen_range(0.05..=1.0);
            let q = psi_map(&cfg);
            let pre = preimage_count(&cfg, &q)?;
            let found = pre.points.iter().any(|p| dist2(p, &cfg.x) <= 1e-7 * (1.0 + dist2(&cfg.x, &cfg.o)));
            let agrees = match &pre.frame {
                Some(f) => {
                    scan_root_count(cfg.r, cfg.t, f.x_star, f.y_star, f.x_q, opts.scan_samples) == pre.count
                }
                None => pre.count == 1,
            };
            Ok((pre.count, found, agrees))
        })
        .collect();
    let mut max_count = 0;
    let (mut missing, mut mismatched) = (0, 0);
    for o in outcomes {
        let (count, found, agrees) = o?;
        max_count = max_count.max(count);
        missing += usize::from(!found);
        mismatched += usize::from(!agrees);
    }
    // t = 1 must give exactly one preimage.
    let mut rng = rng_for(opts.seed, 5);
    let mut t1_bad = 0;
    for _ in 0..100 {
        let mut cfg = random_config(&mut rng, 3);
        cfg.t = 1.0;
        let q = cfg.x.clone();
        t1_bad += usize::from(preimage_count(&cfg, &q)?.count != 1);
    }
    Ok(LemmaCheck {
        name: "preimage-count",
        passed: max_count <= 4 && missing == 0 && mismatched == 0 && t1_bad == 0,
        samples: opts.preimage_configs,
        worst: max_count as f64,
        tolerance: 4.0,
        detail: format!(
            "max count {max_count}; forward point missed {missing}; scan mismatches {mismatched}; t = 1 failures {t1_bad}"
        ),
    })
}

fn segment_check(opts: &SuiteOptions) -> Result<LemmaCheck> {
    let cross = StarDomain::cross(2, 1.0, 3.0, 0.5)?;
    let mut rng = rng_for(opts.seed, 6);
    let poly = |x: &[f64]| 1.5 * x[0].powi(3) - 0.7 * x[0] * x[1] * x[1] + 2.0 * x[1] - 0.25;
    let poly_grad = |x: &[f64]| vec![4.5 * x[0] * x[0] - 0.7 * x[1] * x[1], -1.4 * x[0] * x[1] + 2.0];
    let mut worst: f64 = 0.0;
    for _ in 0..opts.segment_samples {
        let (x, _) = random_pair(&mut rng, &cross);
        let u = random_unit(&mut rng, 2);
        let s = 0.5 * rng.gen_range(0.0f64..1.0).sqrt();
        let y = vec![s * u[0], s * u[1]];
        worst = worst.max(segment_identity_residual(poly, poly_grad, &x, &y));
    }
    Ok(check(
        "segment-identity",
        opts.segment_samples,
        worst,
        1e-8,
        "cubic polynomial on segments from the cross to its inner ball".into(),
    ))
}

fn w_region_check(opts: &SuiteOptions, n: usize) -> Result<LemmaCheck> {
    let cross = StarDomain::cross(2, 1.0, 3.0, 0.5)?;
    let rule = build_rule(&cross, n, &RuleOptions::default())?;
    let rep = w_region_survey(&cross, &rule, opts.w_region_samples)?;
    let violations: usize = rep.regions.iter().map(|r| r.violations).sum();
    let detail = rep
        .regions
        .iter()
        .map(|r| {
            format!(
                "{:?}: {} pts, min J {:.4e} (> {:.4e})",
                r.region, r.count, r.min_jacobian, r.threshold
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(LemmaCheck {
        name: "w-regions",
        passed: violations == 0,
        samples: rep.sampled,
        worst: violations as f64,
        tolerance: 0.0,
        detail: format!(
            "cross(1,3), n = {n}; max diam U_k {:.5} ({} R/8); {detail}",
            rep.max_diameter,
            if rep.precondition_met { "below" } else { "not below" }
        ),
    })
}

/// Runs every check. Order and names are fixed.
pub fn run_lemma_suite(opts: &SuiteOptions) -> Result<Vec<LemmaCheck>> {
    let mut out = vec![det_check(opts)?, p_map_check(), geometric_check(opts), distance_check(opts)?];
    out.extend(jacobian_checks(opts)?);
    out.push(preimage_check(opts)?);
    out.push(segment_check(opts)?);
    if let Some(n) = opts.w_region_n {
        out.push(w_region_check(opts, n)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let opts = SuiteOptions {
            det_instances: 100,
            fd_configs: 20,
            geometry_configs: 100,
            distance_pairs: 500,
            preimage_configs: 300,
            scan_samples: 20_000,
            segment_samples: 100,
            w_region_n: None,
            ..SuiteOptions::default()
        };
        let checks = run_lemma_suite(&opts).unwrap();
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(checks.len(), 10);
    }
}
