//! The ℓ∞-Voronoi partition `V_k` restricted to the owning coarse cubes, the
//! weights `c_k = mes V_k`, and the remainder `⋃ U_k = ⋃ V_k \ R_n`.
//!
//! Everything is measured by midpoint counting on a subgrid of `subgrid`
//! subcells per fine-cube side. Counts are integers, so the weights do not
//! depend on how the work is scheduled.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{JordanBracket, StarDomain};
use crate::lattice::{local_box, CellIndex, LatticeSpec};
use crate::nodes::NodeSet;

/// A cubature rule `Σ c_k f(x_k)` with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    pub nodes: NodeSet,
    pub weights: Vec<f64>,
    /// Subcells per fine-cube side used to measure the cells.
    pub subgrid: usize,
    /// Bracket of `mes Q` that produced `h_n`.
    pub bracket: JordanBracket,
    pub sum_weights: f64,
    /// `mes ⋃ U_k` on the same subgrid.
    pub remainder: f64,
    /// Volume of in-domain subcells lying in coarse cubes without nodes.
    pub unassigned: f64,
    /// Largest `|x - x_k|∞` over assigned subcell centers.
    pub max_assigned_linf: f64,
}

impl CubatureRule {
    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn h_n(&self) -> f64 {
        self.nodes.h_n
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.points()
    }

    /// Number of nodes whose cell has zero measure at this subgrid.
    pub fn zero_weight_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 0.0).count()
    }

    /// `Σ c_k f(x_k)`, summed in node order.
    pub fn apply(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.points()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

/// Index of the node whose cell `V_k` contains `x`: the ℓ∞-nearest node among
/// those owned by a coarse cube containing `x` (closed cubes), ties to the
/// smallest index.
pub fn assign_cell(x: &[f64], set: &NodeSet) -> Option<usize> {
    let coarse = set.coarse_lattice();
    let d = set.dim();
    let base = coarse.cell_of(x);
    let mut best: Option<(f64, usize)> = None;
    for mask in 0..(1usize << d) {
        let cube: CellIndex = (0..d).map(|a| base[a] - ((mask >> a) & 1) as i64).collect();
        if !coarse.closed_cell_contains(&cube, x) {
            continue;
        }
        for &k in set.nodes_in_big_cube(&cube) {
            let dist = linf(x, &set.nodes[k].point);
            match best {
                Some((bd, bk)) if bd < dist || (bd == dist && bk < k) => {}
                _ => best = Some((dist, k)),
            }
        }
    }
    best.map(|(_, k)| k)
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// One subcell center seen by [`scan_subcells`].
#[derive(Debug)]
pub struct Probe<'a> {
    pub point: &'a [f64],
    pub small_cell: &'a [i64],
    /// Owning node, `None` when the coarse cube holds no node.
    pub node: Option<usize>,
    /// Whether the subcell lies in `R_n`, the union of fine inner cubes
    /// centered at nodes.
    pub covered: bool,
    pub linf_distance: f64,
}

/// Visits every subcell center lying in the open domain, coarse cube by
/// coarse cube in lexicographic order, and returns one accumulator per coarse
/// cube in that order.
pub fn scan_subcells<A, I, V>(
    dom: &StarDomain,
    set: &NodeSet,
    subgrid: usize,
    init: I,
    visit: V,
) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Probe<'_>) + Sync,
{
    if subgrid < 2 {
        return Err(Error::InvalidArgument(format!(
            "subgrid must be at least 2, got {subgrid}"
        )));
    }
    if set.dim() != dom.dim() {
        return Err(Error::InvalidArgument("node set and domain dimensions differ".into()));
    }
    let d = set.dim();
    let fine: LatticeSpec = set.fine_lattice();
    let cover = set.coarse_lattice().covering(dom.bbox())?;
    let sub = fine.side() / subgrid as f64;
    let covered_cells: HashSet<&CellIndex> = set
        .nodes
        .iter()
        .filter_map(|n| n.lattice_cell.as_ref())
        .collect();
    let local_small = local_box(d, 3);
    let local_sub = local_box(d, 3 * subgrid);
    let total = cover.count().unwrap_or(0);

    let out = (0..total)
        .into_par_iter()
        .map(|k| {
            let big = cover.nth(k);
            let owners = set.nodes_in_big_cube(&big);
            let covered: Vec<bool> = local_small
                .iter()
                .map(|off| {
                    let c: CellIndex = (0..d).map(|a| 3 * big[a] + off[a]).collect();
                    covered_cells.contains(&c)
                })
                .collect();
            let mut acc = init();
            let mut x = vec![0.0; d];
            let mut small = vec![0i64; d];
            for s in local_sub.iter() {
                let mut flat = 0usize;
                for a in 0..d {
                    let q = s[a] as usize / subgrid;
                    let r = s[a] as usize % subgrid;
                    small[a] = 3 * big[a] + q as i64;
                    x[a] = fine.lower(a, small[a]) + sub * (r as f64 + 0.5);
                    flat = flat * 3 + q;
                }
                if !dom.contains(&x) {
                    continue;
                }
                let mut best: Option<(f64, usize)> = None;
                for &j in owners {
                    let dist = linf(&x, &set.nodes[j].point);
                    if best.map_or(true, |(bd, _)| dist < bd) {
                        best = Some((dist, j));
                    }
                }
                let probe = Probe {
                    point: &x,
                    small_cell: &small,
                    node: best.map(|(_, j)| j),
                    covered: covered[flat],
                    linf_distance: best.map_or(f64::INFINITY, |(bd, _)| bd),
                };
                visit(&mut acc, &probe);
            }
            acc
        })
        .collect();
    Ok(out)
}

#[derive(Default)]
struct CubeTally {
    assigned: Vec<(usize, u64)>,
    uncovered: u64,
    unassigned: u64,
    max_linf: f64,
}

/// Measures the cells `V_k` on the subgrid and returns the rule.
pub fn compute_weights(
    dom: &StarDomain,
    nodes: &NodeSet,
    subgrid: usize,
    bracket: JordanBracket,
) -> Result<CubatureRule> {
    let tallies = scan_subcells(dom, nodes, subgrid, CubeTally::default, |t, p| {
        match p.node {
            None => t.unassigned += 1,
            Some(k) => {
                match t.assigned.iter_mut().find(|(j, _)| *j == k) {
                    Some(e) => e.1 += 1,
                    None => t.assigned.push((k, 1)),
                }
                if !p.covered {
                    t.uncovered += 1;
                }
                t.max_linf = t.max_linf.max(p.linf_distance);
            }
        }
    })?;
    let mut counts = vec![0u64; nodes.len()];
    let (mut uncovered, mut unassigned, mut total) = (0u64, 0u64, 0u64);
    let mut max_linf: f64 = 0.0;
    for t in tallies {
        for (k, c) in t.assigned {
            counts[k] += c;
            total += c;
        }
        uncovered += t.uncovered;
        unassigned += t.unassigned;
        max_linf = max_linf.max(t.max_linf);
    }
    let vol = (nodes.fine_lattice().side() / subgrid as f64).powi(nodes.dim() as i32);
    Ok(CubatureRule {
        weights: counts.iter().map(|&c| c as f64 * vol).collect(),
        nodes: nodes.clone(),
        subgrid,
        bracket,
        sum_weights: total as f64 * vol,
        remainder: uncovered as f64 * vol,
        unassigned: unassigned as f64 * vol,
        max_assigned_linf: max_linf,
    })
}

/// `mes ⋃ U_k` as measured when the rule was built.
pub fn remainder_measure(rule: &CubatureRule) -> f64 {
    rule.remainder
}

/// Constant-time-ish ℓ∞ nearest-node queries backed by a dense grid of fine
/// cells.
#[derive(Debug, Clone)]
pub struct NodeLocator {
    lattice: LatticeSpec,
    lo: Vec<i64>,
    shape: Vec<usize>,
    starts: Vec<usize>,
    entries: Vec<usize>,
    points: Vec<Vec<f64>>,
}

impl NodeLocator {
    pub fn new(points: Vec<Vec<f64>>, h: f64) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidArgument("no nodes to locate".into()))?;
        let d = first.len();
        let lattice = LatticeSpec::at_origin(d, h)?;
        let cells: Vec<CellIndex> = points.iter().map(|p| lattice.cell_of(p)).collect();
        let mut lo = cells[0].clone();
        let mut hi = cells[0].clone();
        for c in &cells {
            for a in 0..d {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
        let shape: Vec<usize> = (0..d).map(|a| (hi[a] - lo[a] + 1) as usize).collect();
        let total = shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .filter(|&t| t <= 1 << 28)
            .ok_or_else(|| Error::Precondition("node spread too large for the locator grid".into()))?;
        let flat = |c: &[i64]| -> usize {
            (0..d).fold(0, |acc, a| acc * shape[a] + (c[a] - lo[a]) as usize)
        };
        let mut starts = vec![0usize; total + 1];
        for c in &cells {
            starts[flat(c) + 1] += 1;
        }
        for i in 0..total {
            starts[i + 1] += starts[i];
        }
        let mut fill = starts.clone();
        let mut entries = vec![0usize; points.len()];
        for (k, c) in cells.iter().enumerate() {
            let f = flat(c);
            entries[fill[f]] = k;
            fill[f] += 1;
        }
        Ok(NodeLocator {
            lattice,
            lo,
            shape,
            starts,
            entries,
            points,
        })
    }

    pub fn from_rule(rule: &CubatureRule) -> Result<Self> {
        Self::new(rule.points().map(|p| p.to_vec()).collect(), rule.h_n())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// `min_k |x - x_k|∞` and the smallest minimizing index.
    pub fn nearest(&self, x: &[f64]) -> (f64, usize) {
        let d = self.lo.len();
        let side = self.lattice.side();
        let c = self.lattice.cell_of(x);
        // Clamp the query cell into the grid; distance to the grid box bounds
        // how far the first ring is.
        let mut centre = vec![0i64; d];
        let mut offset = 0i64;
        for a in 0..d {
            let hi = self.lo[a] + self.shape[a] as i64 - 1;
            centre[a] = c[a].clamp(self.lo[a], hi);
            offset = offset.max((c[a] - centre[a]).abs());
        }
        let max_ring = self.shape.iter().copied().max().unwrap_or(1) as i64;
        let mut best = (f64::INFINITY, usize::MAX);
        let mut ring = 0i64;
        loop {
            self.visit_ring(&centre, ring, x, &mut best);
            // A node in ring r+1 or beyond is at least max(offset, r+1) - 1 whole
            // cells away from x.
            let bound = ((ring + 1).max(offset) - 1) as f64 * side;
            if best.0 <= bound || ring >= max_ring {
                break;
            }
            ring += 1;
        }
        best
    }

    fn visit_ring(&self, centre: &[i64], ring: i64, x: &[f64], best: &mut (f64, usize)) {
        let d = centre.len();
        let width = 2 * ring + 1;
        let count = (width as u64).pow(d as u32);
        let mut c = vec![0i64; d];
        for m in 0..count {
            let mut rem = m;
            let mut on_shell = false;
            let mut inside = true;
            for a in (0..d).rev() {
                let off = (rem % width as u64) as i64 - ring;
                rem /= width as u64;
                on_shell |= off.abs() == ring;
                c[a] = centre[a] + off;
                inside &= c[a] >= self.lo[a] && c[a] < self.lo[a] + self.shape[a] as i64;
            }
            if !on_shell || !inside {
                continue;
            }
            let f = (0..d).fold(0, |acc, a| acc * self.shape[a] + (c[a] - self.lo[a]) as usize);
            for &k in &self.entries[self.starts[f]..self.starts[f + 1]] {
                let dist = linf(x, &self.points[k]);
                if dist < best.0 || (dist == best.0 && k < best.1) {
                    *best = (dist, k);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::build_nodeset;

    fn square_rule(n: usize, subgrid: usize) -> CubatureRule {
        let sq = StarDomain::unit_square();
        let bracket = sq.jordan_measure(24).unwrap();
        let set = build_nodeset(&sq, n, bracket.midpoint(), 4).unwrap();
        compute_weights(&sq, &set, subgrid, bracket).unwrap()
    }

    #[test]
    fn square_n4_quadrants() {
        let rule = square_rule(4, 8);
        assert_eq!(rule.weights, vec![0.25; 4]);
        assert_eq!(rule.sum_weights, 1.0);
        assert_eq!(rule.remainder, 0.0);
        assert_eq!(rule.unassigned, 0.0);
    }

    #[test]
    fn assign_cell_examples() {
        let rule = square_rule(4, 8);
        let set = &rule.nodes;
        let k = assign_cell(&[0.1, 0.1], set).unwrap();
        assert_eq!(set.nodes[k].point, vec![0.25, 0.25]);
        for (k, n) in set.nodes.iter().enumerate() {
            assert_eq!(assign_cell(&n.point, set), Some(k));
        }
        // (0.5, 0.25) is equidistant from (0.25, 0.25) and (0.75, 0.25).
        let a = set.nodes.iter().position(|n| n.point == vec![0.25, 0.25]).unwrap();
        let b = set.nodes.iter().position(|n| n.point == vec![0.75, 0.25]).unwrap();
        assert_eq!(assign_cell(&[0.5, 0.25], set), Some(a.min(b)));
    }

    #[test]
    fn single_node_takes_everything() {
        let rule = square_rule(1, 8);
        assert_eq!(rule.weights, vec![1.0]);
        let ball = StarDomain::ball(2, vec![1.0, 1.0], 1.0, 0.5).unwrap();
        let bracket = ball.jordan_measure(480).unwrap();
        let set = build_nodeset(&ball, 1, bracket.midpoint(), 4).unwrap();
        let rule = compute_weights(&ball, &set, 16, bracket).unwrap();
        assert_eq!(rule.len(), 1);
        assert!((rule.weights[0] - std::f64::consts::PI).abs() < 0.02, "{:?}", rule.weights);
    }

    #[test]
    fn aligned_square_has_no_remainder() {
        for m in [2usize, 4, 8] {
            let rule = square_rule(m * m, 4);
            assert_eq!(rule.remainder, 0.0);
            assert!((rule.sum_weights - 1.0).abs() < 1e-12);
            for w in &rule.weights {
                assert!((w - 1.0 / (m * m) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_weights_sum_to_area() {
        let cross = StarDomain::cross(2, 1.0, 3.0, 0.5).unwrap();
        let bracket = cross.jordan_measure(600).unwrap();
        let set = build_nodeset(&cross, 2000, bracket.midpoint(), 4).unwrap();
        let rule = compute_weights(&cross, &set, 8, bracket).unwrap();
        assert!(rule.sum_weights >= 19.9 && rule.sum_weights <= 20.1, "{}", rule.sum_weights);
        assert!(rule.max_assigned_linf <= 6.0 * rule.h_n());
        assert!(rule.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn locator_matches_brute_force() {
        let star = StarDomain::star_polygon(5, 0.5, 1.0, 0.3).unwrap();
        let set = build_nodeset(&star, 300, 1.17, 4).unwrap();
        let pts: Vec<Vec<f64>> = set.points().map(|p| p.to_vec()).collect();
        let loc = NodeLocator::new(pts.clone(), set.h_n).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let x = [-1.3 + 2.6 * i as f64 / 39.0, -1.3 + 2.6 * j as f64 / 39.0];
                let (bd, bk) = pts
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (linf(&x, p), k))
                    .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
                assert_eq!(loc.nearest(&x), (bd, bk));
            }
        }
    }
}
