use super::maps::jacobian_phi;
use super::{dist2, AuxConfig};
use crate::error::{Error, Result};
use crate::geometry::StarDomain;
use crate::partition::{scan_subcells, CubatureRule};

/// Split of `U_k` by `s = (o - m, Δx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `s < -2R`
    W1,
    /// `-2R <= s <= -R/2`
    W2,
    /// `s > -R/2`
    W3,
}

impl Region {
    pub fn classify(s: f64, big_r: f64) -> Region {
        if s < -2.0 * big_r {
            Region::W1
        } else if s <= -0.5 * big_r {
            Region::W2
        } else {
            Region::W3
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    pub region: Region,
    /// Active radius used for the Jacobian (`R` or `R/8`).
    pub r: f64,
    pub threshold: f64,
    pub count: usize,
    /// Smallest `|J_φ(·; r, 1)|` seen; infinite when the region is empty.
    pub min_jacobian: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WRegionReport {
    /// Probe points of `⋃ U_k` (subcell centers outside `R_n`).
    pub u_probes: usize,
    pub sampled: usize,
    /// Largest `|x - x_k|₂` over all `U_k` probes plus half a subcell diagonal.
    pub max_distance: f64,
    /// Largest diameter of a `U_k`, estimated by the diagonal of the bounding
    /// box of its subcells.
    pub max_diameter: f64,
    /// `R / 8`.
    pub limit: f64,
    /// Whether `max_diameter < limit`.
    pub precondition_met: bool,
    pub regions: [RegionStats; 3],
}

impl WRegionReport {
    pub fn passed(&self) -> bool {
        self.regions.iter().all(|r| r.violations == 0)
    }
}

/// Evaluates `|J_φ(x; R, 1)| > 3^-(d+1)` on `W1 ∪ W3` and
/// `|J_φ(x; R/8, 1)| > 4 · 3^-(d+1)` on `W2` at up to `samples` probe points
/// of `⋃ U_k`, taken with a fixed stride in scan order.
///
/// Fails with a precondition error unless every `U_k` has diameter below
/// `R/8`.
pub fn w_region_bounds(dom: &StarDomain, rule: &CubatureRule, samples: usize) -> Result<WRegionReport> {
    let rep = w_region_survey(dom, rule, samples)?;
    if !rep.precondition_met {
        return Err(Error::Precondition(format!(
            "remainder sets reach diameter {:.6}, not below R/8 = {:.6}; increase n",
            rep.max_diameter, rep.limit
        )));
    }
    Ok(rep)
}

/// Same evaluation as [`w_region_bounds`] without refusing when the
/// diameter precondition fails; the outcome is recorded in the report.
pub fn w_region_survey(dom: &StarDomain, rule: &CubatureRule, samples: usize) -> Result<WRegionReport> {
    let set = &rule.nodes;
    let d = dom.dim();
    let big_r = dom.ball_radius();
    let sub = set.fine_lattice().side() / rule.subgrid as f64;
    let half_diag = 0.5 * sub * (d as f64).sqrt();

    let per_cube = scan_subcells(dom, set, rule.subgrid, Vec::new, |acc: &mut Vec<(Vec<f64>, usize)>, p| {
        if let (Some(k), false) = (p.node, p.covered) {
            acc.push((p.point.to_vec(), k));
        }
    })?;
    let probes: Vec<(Vec<f64>, usize)> = per_cube.into_iter().flatten().collect();
    let max_distance = probes
        .iter()
        .map(|(x, k)| dist2(x, &set.nodes[*k].point))
        .fold(0.0, f64::max)
        + half_diag;
    let mut boxes: Vec<Option<(Vec<f64>, Vec<f64>)>> = vec![None; set.len()];
    for (x, k) in &probes {
        match &mut boxes[*k] {
            Some((lo, hi)) => {
                for i in 0..d {
                    lo[i] = lo[i].min(x[i]);
                    hi[i] = hi[i].max(x[i]);
                }
            }
            slot => *slot = Some((x.clone(), x.clone())),
        }
    }
    let max_diameter = boxes
        .iter()
        .flatten()
        .map(|(lo, hi)| {
            (0..d)
                .map(|i| (hi[i] - lo[i] + sub).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let limit = big_r / 8.0;

    let base = 3f64.powi(-(d as i32 + 1));
    let mut regions = [
        stats(Region::W1, big_r, base),
        stats(Region::W2, big_r / 8.0, 4.0 * base),
        stats(Region::W3, big_r, base),
    ];
    let stride = if samples == 0 {
        usize::MAX
    } else {
        probes.len().div_ceil(samples).max(1)
    };
    let mut sampled = 0;
    for (x, k) in probes.iter().step_by(stride) {
        let node = &set.nodes[*k].point;
        if x == node {
            continue;
        }
        sampled += 1;
        let l = dist2(x, node);
        let s: f64 = (0..d)
            .map(|i| (dom.center()[i] - 0.5 * (x[i] + node[i])) * (x[i] - node[i]) / l)
            .sum();
        let idx = match Region::classify(s, big_r) {
            Region::W1 => 0,
            Region::W2 => 1,
            Region::W3 => 2,
        };
        let st = &mut regions[idx];
        let cfg = AuxConfig {
            o: dom.center().to_vec(),
            big_r,
            r: st.r,
            node: node.clone(),
            x: x.clone(),
            t: 1.0,
        };
        let j = jacobian_phi(&cfg)?.abs();
        st.count += 1;
        st.min_jacobian = st.min_jacobian.min(j);
        if j <= st.threshold {
            st.violations += 1;
        }
    }
    Ok(WRegionReport {
        u_probes: probes.len(),
        sampled,
        max_distance,
        max_diameter,
        limit,
        precondition_met: max_diameter < limit,
        regions,
    })
}

fn stats(region: Region, r: f64, threshold: f64) -> RegionStats {
    RegionStats {
        region,
        r,
        threshold,
        count: 0,
        min_jacobian: f64::INFINITY,
        violations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::{build_rule, RuleOptions};

    #[test]
    fn w3_bound_from_the_formula() {
        // With (mo, Δx) >= 0 and |x - x*| < R/8 the Jacobian exceeds
        // R^d 2R / (2R + R/8)^(d+1) > 3^-(d+1).
        let big_r: f64 = 0.5;
        let d = 2;
        let floor = big_r.powi(d) * 2.0 * big_r / (2.0 * big_r + big_r / 8.0).powi(d + 1);
        assert!(floor > 3f64.powi(-(d + 1)));
        let cfg = AuxConfig {
            o: vec![0.0, 0.0],
            big_r,
            r: big_r,
            node: vec![2.0, 0.0],
            x: vec![1.95, 0.0],
            t: 1.0,
        };
        assert!(jacobian_phi(&cfg).unwrap() >= floor);
    }

    #[test]
    fn small_n_is_refused() {
        let cross = StarDomain::cross(2, 1.0, 3.0, 0.5).unwrap();
        let rule = build_rule(&cross, 256, &RuleOptions::default()).unwrap();
        assert!(matches!(w_region_bounds(&cross, &rule, 1000), Err(Error::Precondition(_))));
    }
}
