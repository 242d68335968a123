//! The informational set `S(n) = S1(n) ∪ S2(n)`.
//!
//! `S1(n)` holds one point per cube of the coarse lattice `B(3 h_n)`: the
//! cube center when it is the center of a fine cube inside the domain,
//! otherwise the smallest fine-cube center inside the coarse cube, otherwise
//! an interior point of the domain found by a subgrid scan. `S2(n)` fills up
//! to `n` points with the remaining fine-cube centers in lexicographic order.
//!
//! Every "arbitrary" choice is resolved lexicographically so the construction
//! is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::StarDomain;
use crate::lattice::{classify_cube, classify_cubes, local_box, CellIndex, CubeClass, LatticeSpec};

/// Number of times the interior-point scan doubles its subgrid.
const INTERIOR_REFINEMENTS: u32 = 3;

/// `h_n = (mes Q / n)^(1/d) / 2`.
pub fn step_size(mes_q: f64, n: usize, d: usize) -> Result<f64> {
    if !(mes_q > 0.0 && mes_q.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "domain measure must be positive, got {mes_q}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let ratio = mes_q / n as f64;
    let root = match d {
        1 => ratio,
        2 => ratio.sqrt(),
        3 => ratio.cbrt(),
        _ => ratio.powf(1.0 / d as f64),
    };
    Ok(0.5 * root)
}

/// How a node was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    /// Center of a coarse cube that is also a fine inner-cube center.
    S1Center,
    /// Smallest fine inner-cube center inside the coarse cube.
    S1LatticePoint,
    /// Interior point of the domain found by scanning the coarse cube.
    S1Interior,
    /// Fill-up fine inner-cube center.
    S2,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::S1Center => "S1-center",
            Provenance::S1LatticePoint => "S1-lattice-point",
            Provenance::S1Interior => "S1-interior",
            Provenance::S2 => "S2",
        }
    }

    /// Whether the node is the center of a fine cube of `A(h_n)`.
    pub fn is_lattice_center(&self) -> bool {
        !matches!(self, Provenance::S1Interior)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1-center" => Ok(Provenance::S1Center),
            "S1-lattice-point" => Ok(Provenance::S1LatticePoint),
            "S1-interior" => Ok(Provenance::S1Interior),
            "S2" => Ok(Provenance::S2),
            other => Err(Error::InvalidArgument(format!("unknown provenance `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    pub provenance: Provenance,
    /// Index of the owning cube of `B(3 h_n)`.
    pub big_cube: CellIndex,
    /// Fine cube of `A(h_n)` centered at this node, when there is one.
    pub lattice_cell: Option<CellIndex>,
}

/// Tuning knobs for the node construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeOptions {
    /// Interior probe points per axis used when classifying cubes.
    pub probe_resolution: usize,
    /// Lattice translation; the origin when `None`.
    pub anchor: Option<Vec<f64>>,
}

impl Default for NodeOptions {
    fn default() -> Self {
        NodeOptions {
            probe_resolution: 4,
            anchor: None,
        }
    }
}

/// The informational set together with its lattice bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub h_n: f64,
    pub anchor: Vec<f64>,
    pub n_requested: usize,
    pub nodes: Vec<Node>,
    /// `|S1(n)|`; the first `s1_count` nodes are the S1 nodes.
    pub s1_count: usize,
    /// `|A(h_n)|`.
    pub inner_cells: usize,
    /// Set when `|S1(n)| >= n`, i.e. `n` is too small for the fill-up step.
    pub oversubscribed: bool,
    by_big_cube: BTreeMap<CellIndex, Vec<usize>>,
}

impl NodeSet {
    /// Assembles a node set from explicit nodes, recomputing the cube
    /// bookkeeping from the coordinates.
    pub fn from_nodes(
        h_n: f64,
        anchor: Vec<f64>,
        n_requested: usize,
        nodes: Vec<(Vec<f64>, Provenance)>,
    ) -> Result<Self> {
        let fine = LatticeSpec::new(h_n, anchor.clone())?;
        let coarse = LatticeSpec::new(3.0 * h_n, anchor.clone())?;
        let nodes: Vec<Node> = nodes
            .into_iter()
            .map(|(point, provenance)| {
                if point.len() != anchor.len() {
                    return Err(Error::InvalidArgument("node dimension mismatch".into()));
                }
                let lattice_cell = provenance
                    .is_lattice_center()
                    .then(|| fine.cell_of(&point));
                let big_cube = match &lattice_cell {
                    Some(c) => c.iter().map(|i| i.div_euclid(3)).collect(),
                    None => coarse.cell_of(&point),
                };
                Ok(Node {
                    point,
                    provenance,
                    big_cube,
                    lattice_cell,
                })
            })
            .collect::<Result<_>>()?;
        let s1_count = nodes.iter().filter(|n| n.provenance != Provenance::S2).count();
        Ok(Self::assemble(h_n, anchor, n_requested, nodes, s1_count, 0))
    }

    fn assemble(
        h_n: f64,
        anchor: Vec<f64>,
        n_requested: usize,
        nodes: Vec<Node>,
        s1_count: usize,
        inner_cells: usize,
    ) -> Self {
        let mut by_big_cube: BTreeMap<CellIndex, Vec<usize>> = BTreeMap::new();
        for (k, node) in nodes.iter().enumerate() {
            by_big_cube.entry(node.big_cube.clone()).or_default().push(k);
        }
        NodeSet {
            h_n,
            anchor,
            n_requested,
            nodes,
            s1_count,
            inner_cells,
            oversubscribed: s1_count >= n_requested,
            by_big_cube,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.iter().map(|n| n.point.as_slice())
    }

    /// The lattice of side `2 h_n`.
    pub fn fine_lattice(&self) -> LatticeSpec {
        LatticeSpec {
            h: self.h_n,
            anchor: self.anchor.clone(),
        }
    }

    /// The lattice of side `6 h_n`.
    pub fn coarse_lattice(&self) -> LatticeSpec {
        LatticeSpec {
            h: 3.0 * self.h_n,
            anchor: self.anchor.clone(),
        }
    }

    /// Node indices owned by a cube of `B(3 h_n)`, in increasing order.
    pub fn nodes_in_big_cube(&self, idx: &[i64]) -> &[usize] {
        self.by_big_cube.get(idx).map_or(&[], |v| v.as_slice())
    }

    pub fn big_cubes(&self) -> impl Iterator<Item = (&CellIndex, &Vec<usize>)> {
        self.by_big_cube.iter()
    }
}

/// Result of the first selection pass.
#[derive(Debug, Clone)]
pub struct S1Selection {
    pub nodes: Vec<Node>,
    /// Fine inner cubes `A(h_n)`, whose centers form `a(h_n)`.
    pub inner: BTreeSet<CellIndex>,
}

/// Builds `S1(n)` for the given step `h_n`.
pub fn build_s1(dom: &StarDomain, h_n: f64, opts: &NodeOptions) -> Result<S1Selection> {
    let d = dom.dim();
    let anchor = opts.anchor.clone().unwrap_or_else(|| vec![0.0; d]);
    if anchor.len() != d {
        return Err(Error::InvalidArgument("anchor dimension mismatch".into()));
    }
    if opts.probe_resolution == 0 {
        return Err(Error::InvalidArgument("probe resolution must be at least 1".into()));
    }
    let fine = LatticeSpec::new(h_n, anchor.clone())?;
    let coarse = LatticeSpec::new(3.0 * h_n, anchor)?;
    let inner = classify_cubes(dom, &fine, opts.probe_resolution)?.inner;

    // B(3h_n): probe hits, plus every coarse cube holding a fine inner cube.
    let mut big: BTreeSet<CellIndex> = classify_cubes(dom, &coarse, opts.probe_resolution)?.meeting;
    for c in &inner {
        big.insert(c.iter().map(|i| i.div_euclid(3)).collect());
    }
    let big: Vec<CellIndex> = big.into_iter().collect();

    let nodes = big
        .par_iter()
        .map(|cube| select_in_big_cube(dom, &fine, &coarse, &inner, cube, opts.probe_resolution))
        .collect::<Result<Vec<Node>>>()?;
    Ok(S1Selection { nodes, inner })
}

fn select_in_big_cube(
    dom: &StarDomain,
    fine: &LatticeSpec,
    coarse: &LatticeSpec,
    inner: &BTreeSet<CellIndex>,
    cube: &[i64],
    probe_resolution: usize,
) -> Result<Node> {
    let d = fine.dim();
    let center_cell: CellIndex = cube.iter().map(|j| 3 * j + 1).collect();
    if inner.contains(&center_cell) {
        return Ok(Node {
            point: fine.center(&center_cell),
            provenance: Provenance::S1Center,
            big_cube: cube.to_vec(),
            lattice_cell: Some(center_cell),
        });
    }
    for off in local_box(d, 3).iter() {
        let cell: CellIndex = cube.iter().zip(&off).map(|(j, o)| 3 * j + o).collect();
        if inner.contains(&cell) {
            return Ok(Node {
                point: fine.center(&cell),
                provenance: Provenance::S1LatticePoint,
                big_cube: cube.to_vec(),
                lattice_cell: Some(cell),
            });
        }
    }
    let point = interior_point(dom, coarse, cube, probe_resolution)?;
    Ok(Node {
        point,
        provenance: Provenance::S1Interior,
        big_cube: cube.to_vec(),
        lattice_cell: None,
    })
}

/// First subgrid center of the cube (lexicographic scan) whose clearance to
/// the complement of the domain exceeds one subcell diagonal, refining the
/// subgrid up to three times.
///
/// Clearance is probed at the `3^d` stencil `x + delta * {-1, 0, 1}^d`. When no
/// point passes, the first subgrid center inside the domain at the finest
/// level is used; when even that fails, cube corners lying in the domain are
/// pulled toward the cube center until an interior point is reached.
pub fn interior_point(
    dom: &StarDomain,
    lat: &LatticeSpec,
    cube: &[i64],
    probe_resolution: usize,
) -> Result<Vec<f64>> {
    let d = lat.dim();
    let side = lat.side();
    let mut fallback = None;
    for level in 0..=INTERIOR_REFINEMENTS {
        let m = probe_resolution << level;
        let sub = side / m as f64;
        let diag = sub * (d as f64).sqrt();
        for j in local_box(d, m).iter() {
            let x: Vec<f64> = (0..d)
                .map(|a| lat.lower(a, cube[a]) + sub * (j[a] as f64 + 0.5))
                .collect();
            if !dom.contains(&x) {
                continue;
            }
            if has_clearance(dom, &x, diag) {
                return Ok(x);
            }
            if level == INTERIOR_REFINEMENTS && fallback.is_none() {
                fallback = Some(x);
            }
        }
    }
    if let Some(x) = fallback {
        return Ok(x);
    }
    let center = lat.center(cube);
    for mask in 0..(1usize << d) {
        let corner: Vec<f64> = (0..d)
            .map(|a| lat.lower(a, cube[a] + ((mask >> a) & 1) as i64))
            .collect();
        if !dom.contains(&corner) {
            continue;
        }
        let mut step = 0.5;
        for _ in 0..52 {
            let x: Vec<f64> = corner
                .iter()
                .zip(&center)
                .map(|(c, m)| c + step * (m - c))
                .collect();
            if dom.contains(&x) {
                return Ok(x);
            }
            step *= 0.5;
        }
    }
    Err(Error::NoInteriorPoint {
        cube: cube.to_vec(),
    })
}

fn has_clearance(dom: &StarDomain, x: &[f64], delta: f64) -> bool {
    let d = x.len();
    let mut p = x.to_vec();
    local_box(d, 3).iter().all(|off| {
        for a in 0..d {
            p[a] = x[a] + delta * (off[a] - 1) as f64;
        }
        dom.contains(&p)
    })
}

/// Builds `S(n)` on the lattice anchored at the origin with default probes.
pub fn build_nodeset(
    dom: &StarDomain,
    n: usize,
    mes_q: f64,
    probe_resolution: usize,
) -> Result<NodeSet> {
    build_nodeset_with(
        dom,
        n,
        mes_q,
        &NodeOptions {
            probe_resolution,
            ..NodeOptions::default()
        },
    )
}

pub fn build_nodeset_with(
    dom: &StarDomain,
    n: usize,
    mes_q: f64,
    opts: &NodeOptions,
) -> Result<NodeSet> {
    let d = dom.dim();
    let h_n = step_size(mes_q, n, d)?;
    let S1Selection { mut nodes, inner } = build_s1(dom, h_n, opts)?;
    let s1_count = nodes.len();
    let used: BTreeSet<&CellIndex> = nodes.iter().filter_map(|n| n.lattice_cell.as_ref()).collect();
    let fine = LatticeSpec::new(h_n, opts.anchor.clone().unwrap_or_else(|| vec![0.0; d]))?;
    let fill: Vec<Node> = inner
        .iter()
        .filter(|c| !used.contains(c))
        .take(n.saturating_sub(s1_count))
        .map(|c| Node {
            point: fine.center(c),
            provenance: Provenance::S2,
            big_cube: c.iter().map(|i| i.div_euclid(3)).collect(),
            lattice_cell: Some(c.clone()),
        })
        .collect();
    nodes.extend(fill);
    Ok(NodeSet::assemble(
        h_n,
        fine.anchor,
        n,
        nodes,
        s1_count,
        inner.len(),
    ))
}

/// Checks of the structural properties of an informational set.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationalSetReport {
    pub node_count: usize,
    pub n_requested: usize,
    /// Every node lies in the open domain.
    pub all_in_domain: bool,
    /// Largest number of nodes in one closed fine cube.
    pub max_nodes_per_fine_cube: usize,
    /// Coarse cubes of `B(3 h_n)` without an S1 node.
    pub big_cubes_without_s1: usize,
}

impl InformationalSetReport {
    pub fn holds(&self) -> bool {
        self.node_count <= self.n_requested
            && self.all_in_domain
            && self.max_nodes_per_fine_cube <= 1
            && self.big_cubes_without_s1 == 0
    }
}

/// Verifies `|S(n)| <= n`, `S(n) ⊂ Q`, at most one node per cube of `B(h_n)`
/// and one S1 node per probe-detected cube of `B(3 h_n)`.
pub fn check_informational_set(
    dom: &StarDomain,
    set: &NodeSet,
    probe_resolution: usize,
) -> Result<InformationalSetReport> {
    let fine = set.fine_lattice();
    let d = set.dim();
    let mut per_cell: BTreeMap<CellIndex, usize> = BTreeMap::new();
    for node in &set.nodes {
        let base = fine.cell_of(&node.point);
        // A node on a face belongs to every closed cell sharing it.
        for mask in 0..(1usize << d) {
            let cell: CellIndex = (0..d).map(|a| base[a] - ((mask >> a) & 1) as i64).collect();
            if fine.closed_cell_contains(&cell, &node.point) {
                *per_cell.entry(cell).or_default() += 1;
            }
        }
    }
    let coarse = set.coarse_lattice();
    let s1_cubes: BTreeSet<&CellIndex> = set.nodes[..set.s1_count]
        .iter()
        .map(|n| &n.big_cube)
        .collect();
    let cover = coarse.covering(dom.bbox())?;
    let missing = cover
        .iter()
        .filter(|c| {
            !s1_cubes.contains(c)
                && classify_cube(dom, &coarse, c, probe_resolution) != CubeClass::Outside
        })
        .count();
    Ok(InformationalSetReport {
        node_count: set.len(),
        n_requested: set.n_requested,
        all_in_domain: set.points().all(|p| dom.contains(p)),
        max_nodes_per_fine_cube: per_cell.values().copied().max().unwrap_or(0),
        big_cubes_without_s1: missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_size_examples() {
        assert_eq!(step_size(1.0, 100, 2).unwrap(), 0.05);
        assert_eq!(step_size(1.0, 4, 2).unwrap(), 0.25);
        assert!((step_size(20.0, 2000, 2).unwrap() - 0.05).abs() < 1e-17);
        assert!((step_size(8.0, 1, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!(step_size(0.0, 4, 2).is_err());
        assert!(step_size(-1.0, 4, 2).is_err());
    }

    #[test]
    fn s1_unit_square_n4() {
        let sq = StarDomain::unit_square();
        let s1 = build_s1(&sq, 0.25, &NodeOptions::default()).unwrap();
        assert_eq!(s1.nodes.len(), 1);
        assert_eq!(s1.nodes[0].point, vec![0.75, 0.75]);
        assert_eq!(s1.nodes[0].provenance, Provenance::S1Center);
    }

    #[test]
    fn s1_unit_square_n16() {
        // h = 1/8: coarse cubes have side 6h = 0.75, four of them meet (0,1)^2.
        let sq = StarDomain::unit_square();
        let s1 = build_s1(&sq, 0.125, &NodeOptions::default()).unwrap();
        let pts: Vec<_> = s1.nodes.iter().map(|n| n.point.clone()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.375, 0.375],
                vec![0.125, 0.875],
                vec![0.875, 0.125],
                vec![0.875, 0.875]
            ]
        );
        assert_eq!(s1.nodes[0].provenance, Provenance::S1Center);
        assert_eq!(s1.nodes[3].provenance, Provenance::S1LatticePoint);
    }

    #[test]
    fn s1_without_inner_cubes_uses_interior_points() {
        let ball = StarDomain::ball(2, vec![1.0, 1.0], 1.0, 0.5).unwrap();
        let s1 = build_s1(&ball, 1.2, &NodeOptions::default()).unwrap();
        assert!(s1.inner.is_empty());
        assert!(!s1.nodes.is_empty());
        for n in &s1.nodes {
            assert_eq!(n.provenance, Provenance::S1Interior);
            assert!(ball.contains(&n.point));
        }
    }

    #[test]
    fn nodeset_unit_square_n4() {
        let sq = StarDomain::unit_square();
        let set = build_nodeset(&sq, 4, 1.0, 4).unwrap();
        let mut pts: Vec<_> = set.points().map(|p| p.to_vec()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            pts,
            vec![
                vec![0.25, 0.25],
                vec![0.25, 0.75],
                vec![0.75, 0.25],
                vec![0.75, 0.75]
            ]
        );
        assert_eq!(set.s1_count, 1);
        assert!(!set.oversubscribed);
        assert!(check_informational_set(&sq, &set, 4).unwrap().holds());
    }

    #[test]
    fn nodeset_single_point() {
        let sq = StarDomain::unit_square();
        let set = build_nodeset(&sq, 1, 1.0, 4).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.nodes[0].point, vec![0.5, 0.5]);
        assert!(set.oversubscribed);
    }

    #[test]
    fn nodeset_cross_2000() {
        let cross = StarDomain::cross(2, 1.0, 3.0, 0.5).unwrap();
        let set = build_nodeset(&cross, 2000, 20.0, 4).unwrap();
        let rep = check_informational_set(&cross, &set, 4).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert!(set.len() <= 2000);
    }

    #[test]
    fn nodeset_is_deterministic() {
        let star = StarDomain::star_polygon(5, 0.5, 1.0, 0.3).unwrap();
        let a = build_nodeset(&star, 500, 1.2, 4).unwrap();
        let b = build_nodeset(&star, 500, 1.2, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn from_nodes_recovers_bookkeeping() {
        let sq = StarDomain::unit_square();
        let set = build_nodeset(&sq, 64, 1.0, 4).unwrap();
        let rebuilt = NodeSet::from_nodes(
            set.h_n,
            set.anchor.clone(),
            set.n_requested,
            set.nodes.iter().map(|n| (n.point.clone(), n.provenance)).collect(),
        )
        .unwrap();
        assert_eq!(rebuilt.nodes, set.nodes);
    }

    #[test]
    fn provenance_round_trip() {
        for p in [
            Provenance::S1Center,
            Provenance::S1LatticePoint,
            Provenance::S1Interior,
            Provenance::S2,
        ] {
            assert_eq!(p.as_str().parse::<Provenance>().unwrap(), p);
        }
        assert!("S3".parse::<Provenance>().is_err());
    }
}
