//! Preimages of a point under `ψ(·; r, t)`.
//!
//! Writing `x*' = 2o - x*`, every preimage `x` of `q` satisfies
//! `q - (1-t) o - t x*' = (t + (1-t) r / (2r + |x - x*|₂)) (x - x*')`, so it lies
//! on the line `ℓ` through `x*'` along `w = q - (1-t) o - t x*'`. In a frame
//! whose first axis is `ℓ` and whose origin is the foot of the perpendicular
//! from `o`, we have `o = (0, y*)`, `x* = (x*, 2y*)`, `q = (x_q, (1-t) y*)` and
//! a preimage `(z, 0)` solves
//!
//! ```text
//! g(z) = t z + (1-t) r (z + x*) / (2r + sqrt((z - x*)² + 4y*²)) - x_q = 0.
//! ```
//!
//! Squaring away the root gives a polynomial of degree at most four.

use nalgebra::DMatrix;

use super::{dist2, dot, AuxConfig};
use crate::error::{Error, Result};

const NEWTON_STEPS: usize = 30;

/// Coordinates of the problem in the frame attached to `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarFrame {
    /// Foot of the perpendicular from `o` to `ℓ`.
    pub origin: Vec<f64>,
    /// Unit direction of `ℓ`.
    pub direction: Vec<f64>,
    pub x_star: f64,
    pub y_star: f64,
    pub x_q: f64,
    pub y_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preimages {
    pub count: usize,
    /// Admissible abscissae `z` along `ℓ`, increasing.
    pub abscissae: Vec<f64>,
    /// The preimages in `R^d`.
    pub points: Vec<Vec<f64>>,
    /// `None` when `q = (1-t) o + t x*'`, whose only preimage is `x*'`.
    pub frame: Option<PlanarFrame>,
}

/// Coefficients `c[0] + c[1] z + ... + c[4] z⁴` of
/// `[(1-t) r (z + x*) - 2r (x_q - t z)]² - (x_q - t z)² ((x* - z)² + 4y*²)`.
pub fn quartic_coefficients(r: f64, t: f64, x_star: f64, y_star: f64, x_q: f64) -> [f64; 5] {
    let a = [r * ((1.0 - t) * x_star - 2.0 * x_q), r * (1.0 + t)];
    let b = [x_q, -t];
    let c = [x_star * x_star + 4.0 * y_star * y_star, -2.0 * x_star, 1.0];
    let a2 = mul(&a, &a);
    let b2c = mul(&mul(&b, &b), &c);
    let mut out = [0.0; 5];
    for (i, v) in a2.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b2c.iter().enumerate() {
        out[i] -= v;
    }
    out
}

fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// The unsquared equation `g(z)` and its derivative.
fn residual(r: f64, t: f64, xs: f64, ys: f64, xq: f64, z: f64) -> (f64, f64) {
    let l = ((z - xs).powi(2) + 4.0 * ys * ys).sqrt();
    let den = 2.0 * r + l;
    let g = t * z + (1.0 - t) * r * (z + xs) / den - xq;
    let dl = if l > 0.0 { (z - xs) / l } else { 0.0 };
    let dg = t + (1.0 - t) * r * (den - (z + xs) * dl) / (den * den);
    (g, dg)
}

/// Real roots of `Σ c[k] z^k` from the eigenvalues of the companion matrix.
fn real_roots(c: &[f64], scale: f64) -> Vec<f64> {
    let big = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if big == 0.0 {
        return Vec::new();
    }
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].abs() <= 1e-14 * big {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        _ => {
            let lead = c[deg];
            let mut m = DMatrix::<f64>::zeros(deg, deg);
            for i in 1..deg {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                m[(i, deg - 1)] = -c[i] / lead;
            }
            m.complex_eigenvalues()
                .iter()
                // A double root can come back with a NaN imaginary part;
                // the Newton polish and residual test decide those.
                .filter(|z| z.re.is_finite() && !(z.im.abs() > 1e-5 * scale.max(z.re.abs())))
                .map(|z| z.re)
                .collect()
        }
    }
}

/// Preimage count in planar coordinates. A point with `y_q != (1-t) y*` has
/// no preimage.
pub fn preimage_count_planar(
    r: f64,
    t: f64,
    x_star: f64,
    y_star: f64,
    x_q: f64,
    y_q: f64,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    let scale = [1.0, r, x_star.abs(), y_star.abs(), x_q.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    if (y_q - (1.0 - t) * y_star).abs() > 1e-9 * scale {
        return Ok(Vec::new());
    }
    let coeffs = quartic_coefficients(r, t, x_star, y_star, x_q);
    let mut roots: Vec<f64> = Vec::new();
    for z0 in real_roots(&coeffs, scale) {
        let mut z = z0;
        let (mut g, _) = residual(r, t, x_star, y_star, x_q, z);
        for _ in 0..NEWTON_STEPS {
            let (_, dg) = residual(r, t, x_star, y_star, x_q, z);
            if dg == 0.0 || g == 0.0 {
                break;
            }
            let cand = z - g / dg;
            let (gc, _) = residual(r, t, x_star, y_star, x_q, cand);
            if gc.abs() >= g.abs() {
                break;
            }
            z = cand;
            g = gc;
        }
        if g.abs() <= 1e-8 * scale {
            roots.push(z);
        }
    }
    roots.sort_by(f64::total_cmp);
    // Eigenvalues of a near-double quartic root may both polish onto one
    // simple root of g. Two close candidates count as one unless g takes the
    // same sign on both sides of the pair. The probe keeps clear of the
    // rounding floor of g, which can span several ulps of z near a root.
    let g_at = |z: f64| residual(r, t, x_star, y_star, x_q, z).0;
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for z in roots {
        if let Some(&prev) = merged.last() {
            let gap = z - prev;
            let probe = gap.max(1e-7 * scale);
            if gap <= 1e-12 * scale
                || (gap <= 1e-4 * scale && (g_at(prev - probe) > 0.0) != (g_at(z + probe) > 0.0))
            {
                continue;
            }
        }
        merged.push(z);
    }
    roots = merged;
    Ok(roots)
}

/// All `x` with `ψ(x; r, t) = q`, for the configuration's `o`, `r`, `x*`
/// and `t` (its `x` is ignored).
pub fn preimage_count(cfg: &AuxConfig, q: &[f64]) -> Result<Preimages> {
    let d = cfg.dim();
    if q.len() != d || cfg.node.len() != d {
        return Err(Error::InvalidArgument("configuration dimensions disagree".into()));
    }
    let t = cfg.t;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    let reflected: Vec<f64> = (0..d).map(|i| 2.0 * cfg.o[i] - cfg.node[i]).collect();
    let w: Vec<f64> = (0..d)
        .map(|i| q[i] - (1.0 - t) * cfg.o[i] - t * reflected[i])
        .collect();
    let nw = dot(&w, &w).sqrt();
    let scale = [1.0, cfg.r, dist2(q, &cfg.o), dist2(&cfg.node, &cfg.o)]
        .into_iter()
        .fold(0.0, f64::max);
    if nw <= 1e-14 * scale {
        return Ok(Preimages {
            count: 1,
            abscissae: Vec::new(),
            points: vec![reflected],
            frame: None,
        });
    }
    let dir: Vec<f64> = w.iter().map(|v| v / nw).collect();
    let o_rel: Vec<f64> = (0..d).map(|i| cfg.o[i] - reflected[i]).collect();
    let x_star = dot(&o_rel, &dir);
    let origin: Vec<f64> = (0..d).map(|i| reflected[i] + x_star * dir[i]).collect();
    let y_star = dist2(&cfg.o, &origin);
    let q_rel: Vec<f64> = (0..d).map(|i| q[i] - origin[i]).collect();
    let x_q = dot(&q_rel, &dir);
    let y_q = (0..d)
        .map(|i| (q_rel[i] - x_q * dir[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    let abscissae = preimage_count_planar(cfg.r, t, x_star, y_star, x_q, y_q)?;
    let points = abscissae
        .iter()
        .map(|z| (0..d).map(|i| origin[i] + z * dir[i]).collect())
        .collect();
    Ok(Preimages {
        count: abscissae.len(),
        abscissae,
        points,
        frame: Some(PlanarFrame {
            origin,
            direction: dir,
            x_star,
            y_star,
            x_q,
            y_q,
        }),
    })
}

/// Counts sign changes of the unsquared equation on `samples` equally spaced
/// points of `(-x*, -x* + U]`, where `U` bounds every root: `U = (x_q + t x*)/t`
/// from `g(z) >= t (z + x*) - (x_q + t x*)`. Requires `t > 0`.
pub fn scan_root_count(r: f64, t: f64, x_star: f64, y_star: f64, x_q: f64, samples: usize) -> usize {
    let reach = x_q + t * x_star;
    if reach <= 0.0 || t <= 0.0 {
        return 0;
    }
    let span = reach / t;
    let mut prev = residual(r, t, x_star, y_star, x_q, -x_star).0;
    let mut changes = 0;
    for i in 1..=samples {
        let z = -x_star + span * i as f64 / samples as f64;
        let g = residual(r, t, x_star, y_star, x_q, z).0;
        if (g > 0.0) != (prev > 0.0) && g != 0.0 {
            changes += 1;
        }
        if g != 0.0 {
            prev = g;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemma::maps::{p_map, psi_map};

    fn cfg(t: f64) -> AuxConfig {
        AuxConfig {
            o: vec![0.2, -0.1, 0.3],
            big_r: 0.5,
            r: 0.5,
            node: vec![1.3, 0.4, -0.2],
            x: vec![1.1, 0.9, 0.1],
            t,
        }
    }

    #[test]
    fn identity_at_t_one() {
        let c = cfg(1.0);
        let q = vec![0.7, 0.05, 0.9];
        let pre = preimage_count(&c, &q).unwrap();
        assert_eq!(pre.count, 1);
        assert!(dist2(&pre.points[0], &q) < 1e-12);
    }

    #[test]
    fn forward_image_is_recovered() {
        for t in [0.0, 0.3, 0.8] {
            let c = cfg(t);
            let q = if t == 0.0 { p_map(&c) } else { psi_map(&c) };
            let pre = preimage_count(&c, &q).unwrap();
            assert!(pre.count >= 1 && pre.count <= 4);
            let best = pre
                .points
                .iter()
                .map(|p| dist2(p, &c.x))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "t = {t}: {pre:?}");
            let f = pre.frame.unwrap();
            if t > 0.0 {
                assert_eq!(pre.count, scan_root_count(c.r, t, f.x_star, f.y_star, f.x_q, 100_000));
            }
        }
    }

    #[test]
    fn off_line_point_has_no_preimage() {
        assert!(preimage_count_planar(1.0, 0.5, 0.3, 1.0, 0.2, 0.9).unwrap().is_empty());
        assert!(preimage_count_planar(1.0, 1.5, 0.3, 1.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn exact_double_root_at_t_one() {
        let roots = preimage_count_planar(
            0.135_047_991_184_618_66,
            1.0,
            0.557_671_183_602_914_7,
            1.526_234_877_798_673_8,
            1.012_333_082_893_071_2,
            0.0,
        )
        .unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.012_333_082_893_071_2).abs() < 1e-12);
    }

    #[test]
    fn duplicate_polish_inside_rounding_floor() {
        // g has simple roots near 1.1512, 2.1587 and 2.15892; the last one
        // attracts two eigenvalues that land 2e-11 apart.
        let (r, t, xs, ys, xq) = (
            0.485_976_271_456_144_47,
            0.079_956_301_249_606_07,
            0.983_003_140_265_813_8,
            0.152_234_861_932_133_5,
            0.815_070_875_248_243_1,
        );
        let roots = preimage_count_planar(r, t, xs, ys, xq, (1.0 - t) * ys).unwrap();
        assert_eq!(roots.len(), 3, "{roots:?}");
        assert_eq!(scan_root_count(r, t, xs, ys, xq, 1_000_000), 3);
    }

    #[test]
    fn quartic_vanishes_at_true_roots() {
        let (r, t, xs, ys, xq) = (0.4, 0.6, 0.7, 0.2, 1.1);
        let roots = preimage_count_planar(r, t, xs, ys, xq, (1.0 - t) * ys).unwrap();
        let c = quartic_coefficients(r, t, xs, ys, xq);
        for z in roots {
            let v: f64 = c.iter().enumerate().map(|(k, ck)| ck * z.powi(k as i32)).sum();
            assert!(v.abs() < 1e-9, "{v}");
        }
    }
}
