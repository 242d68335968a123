use super::maps::p_map;
use super::{dist2, dot, AuxConfig};
use crate::error::{Error, Result};
use crate::geometry::StarDomain;
use crate::partition::linf;

/// Smallest angle between `x - o` and `x* - o` accepted by
/// [`geometric_sense_check`].
const MIN_ANGLE: f64 = 1e-5;

/// Slack on the gauge when testing segment points against the closure.
const SEGMENT_TOLERANCE: f64 = 1e-9;

/// Rebuilds `p(x; r)` as the intersection of the diagonals `x o₁` and `x* o₂`
/// of the trapezoid spanned by `x`, `x*` and the diameter `o₁ o₂` of the
/// circle of radius `r` about `o` parallel to `x x*`, working in the plane of
/// `o`, `x`, `x*`. Returns the distance to [`p_map`].
pub fn geometric_sense_check(cfg: &AuxConfig) -> Result<f64> {
    let u: Vec<f64> = cfg.x.iter().zip(&cfg.o).map(|(a, b)| a - b).collect();
    let v: Vec<f64> = cfg.node.iter().zip(&cfg.o).map(|(a, b)| a - b).collect();
    let nu = dot(&u, &u).sqrt();
    let nv = dot(&v, &v).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Degenerate("x or x* coincides with o".into()));
    }
    let e1: Vec<f64> = u.iter().map(|c| c / nu).collect();
    let along = dot(&v, &e1);
    let perp: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a - along * b).collect();
    let np = dot(&perp, &perp).sqrt();
    if np / nv <= MIN_ANGLE.sin() {
        return Err(Error::Degenerate(
            "x - o and x* - o are collinear; use the collinear branch".into(),
        ));
    }
    let e2: Vec<f64> = perp.iter().map(|c| c / np).collect();

    // Planar coordinates with o at the origin.
    let xp = [nu, 0.0];
    let np_ = [along, np];
    let l = ((xp[0] - np_[0]).powi(2) + (xp[1] - np_[1]).powi(2)).sqrt();
    let dir = [(np_[0] - xp[0]) / l, (np_[1] - xp[1]) / l];
    let o1 = [cfg.r * dir[0], cfg.r * dir[1]];
    let o2 = [-cfg.r * dir[0], -cfg.r * dir[1]];

    // x + s (o1 - x) = x* + w (o2 - x*)
    let a = [o1[0] - xp[0], o1[1] - xp[1]];
    let b = [np_[0] - o2[0], np_[1] - o2[1]];
    let rhs = [np_[0] - xp[0], np_[1] - xp[1]];
    let det = a[0] * b[1] - a[1] * b[0];
    if det.abs() <= 1e-14 * (a[0].hypot(a[1]) * b[0].hypot(b[1])) {
        return Err(Error::Degenerate("diagonals are parallel".into()));
    }
    let s = (rhs[0] * b[1] - rhs[1] * b[0]) / det;
    let q = [xp[0] + s * a[0], xp[1] + s * a[1]];
    let point: Vec<f64> = (0..cfg.dim())
        .map(|i| cfg.o[i] + q[0] * e1[i] + q[1] * e2[i])
        .collect();
    Ok(dist2(&point, &p_map(cfg)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    /// `C = diam Q · sqrt(d) / (2r)`.
    pub constant: f64,
    /// `max(|x - p|∞, |x* - p|∞)`.
    pub lhs: f64,
    /// `C |x - x*|∞`.
    pub rhs: f64,
    pub bound_holds: bool,
    pub segments_inside: bool,
    /// First segment point found outside the closure.
    pub witness: Option<Vec<f64>>,
}

impl DistanceReport {
    pub fn passed(&self) -> bool {
        self.bound_holds && self.segments_inside
    }
}

/// Checks `max(|x - p|∞, |x* - p|∞) <= C |x - x*|∞` and that 33 equally
/// spaced points of each of the segments `x p` and `p x*` lie in the closure
/// of the domain.
pub fn distance_bound_check(dom: &StarDomain, cfg: &AuxConfig) -> Result<DistanceReport> {
    if cfg.dim() != dom.dim() {
        return Err(Error::InvalidArgument("configuration and domain dimensions differ".into()));
    }
    if !dom.contains(&cfg.x) || !dom.contains(&cfg.node) {
        return Err(Error::InvalidArgument("x and x* must lie in the domain".into()));
    }
    let d = cfg.dim() as f64;
    let constant = dom.diameter(4096) * d.sqrt() / (2.0 * cfg.r);
    let p = p_map(cfg);
    let lhs = linf(&cfg.x, &p).max(linf(&cfg.node, &p));
    let rhs = constant * linf(&cfg.x, &cfg.node);
    let mut witness = None;
    'outer: for (a, b) in [(&cfg.x, &p), (&p, &cfg.node)] {
        for j in 0..=32 {
            let s = j as f64 / 32.0;
            let y: Vec<f64> = a.iter().zip(b.iter()).map(|(u, v)| u + s * (v - u)).collect();
            if dom.gauge(&y) > 1.0 + SEGMENT_TOLERANCE {
                witness = Some(y);
                break 'outer;
            }
        }
    }
    Ok(DistanceReport {
        constant,
        lhs,
        rhs,
        bound_holds: lhs <= rhs * (1.0 + 1e-12),
        segments_inside: witness.is_none(),
        witness,
    })
}
