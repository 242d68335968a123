//! Cubic lattices of side `2h` and the classification of their cells against
//! a domain.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, StarDomain, CLOSURE_TOLERANCE};

/// Integer coordinates of a lattice cell.
pub type CellIndex = Vec<i64>;

/// Largest number of cells a single lattice sweep may visit.
const MAX_LATTICE_CELLS: u64 = 1 << 36;

/// Lattice generated by `2h e_1, ..., 2h e_d`, translated by `anchor`.
/// Cell `i` is `anchor + [2h i, 2h (i + 1)]` along every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub h: f64,
    pub anchor: Vec<f64>,
}

impl LatticeSpec {
    pub fn new(h: f64, anchor: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("lattice half-side must be positive, got {h}")));
        }
        if anchor.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("lattice anchor must be finite".into()));
        }
        Ok(LatticeSpec { h, anchor })
    }

    pub fn at_origin(dim: usize, h: f64) -> Result<Self> {
        Self::new(h, vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn side(&self) -> f64 {
        2.0 * self.h
    }

    pub fn cell_volume(&self) -> f64 {
        self.side().powi(self.dim() as i32)
    }

    /// Coordinate of the lower face of cell `i` along `axis`.
    pub fn lower(&self, axis: usize, i: i64) -> f64 {
        self.anchor[axis] + self.side() * i as f64
    }

    pub fn center(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.anchor[a] + self.h * (2 * i + 1) as f64)
            .collect()
    }

    /// Index of the cell whose half-open box `[lower, upper)` contains `x`.
    pub fn cell_of(&self, x: &[f64]) -> CellIndex {
        x.iter()
            .enumerate()
            .map(|(a, &v)| ((v - self.anchor[a]) / self.side()).floor() as i64)
            .collect()
    }

    /// Whether `x` lies in the closed cell `idx` (with a relative slack).
    pub fn closed_cell_contains(&self, idx: &[i64], x: &[f64]) -> bool {
        let eps = 1e-12 * self.side();
        idx.iter().enumerate().all(|(a, &i)| {
            let lo = self.lower(a, i);
            x[a] >= lo - eps && x[a] <= lo + self.side() + eps
        })
    }

    /// All cells that may meet `bbox`, padded by one cell on each side.
    pub fn covering(&self, bbox: &BoundingBox) -> Result<IndexBox> {
        let d = self.dim();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for a in 0..d {
            let l = ((bbox.min[a] - self.anchor[a]) / self.side()).floor() - 1.0;
            let u = ((bbox.max[a] - self.anchor[a]) / self.side()).floor() + 2.0;
            if !(l.is_finite() && u.is_finite()) || u - l > 1e9 {
                return Err(Error::Precondition(format!(
                    "lattice with h = {} is too fine for the bounding box",
                    self.h
                )));
            }
            lo.push(l as i64);
            hi.push(u as i64);
        }
        let b = IndexBox { lo, hi };
        if b.count().map_or(true, |c| c > MAX_LATTICE_CELLS) {
            return Err(Error::Precondition(format!(
                "lattice with h = {} has too many cells over the bounding box",
                self.h
            )));
        }
        Ok(b)
    }
}

/// Half-open box of cell indices `lo <= i < hi`, iterated lexicographically
/// with the first axis most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IndexBox {
    pub fn count(&self) -> Option<u64> {
        self.lo.iter().zip(&self.hi).try_fold(1u64, |acc, (l, h)| {
            acc.checked_mul((h - l).max(0) as u64)
        })
    }

    /// The `k`-th index in lexicographic order.
    pub fn nth(&self, mut k: u64) -> CellIndex {
        let d = self.lo.len();
        let mut idx = vec![0; d];
        for a in (0..d).rev() {
            let w = (self.hi[a] - self.lo[a]) as u64;
            idx[a] = self.lo[a] + (k % w) as i64;
            k /= w;
        }
        idx
    }

    pub fn iter(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.count().unwrap_or(0)).map(move |k| self.nth(k))
    }
}

/// `{0, ..., m-1}^d` in lexicographic order.
pub(crate) fn local_box(d: usize, m: usize) -> IndexBox {
    IndexBox {
        lo: vec![0; d],
        hi: vec![m as i64; d],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeClass {
    /// No probe point lies in the domain.
    Outside,
    /// Some probe point lies in the open domain.
    Meeting,
    /// Every probe point lies in the closure of the domain.
    Inner,
}

/// Classifies one cell using as probe points its `2^d` corners, the point
/// nearest to the domain center and the centers of a `probe_resolution^d`
/// subdivision.
pub fn classify_cube(
    dom: &StarDomain,
    lat: &LatticeSpec,
    idx: &[i64],
    probe_resolution: usize,
) -> CubeClass {
    let d = lat.dim();
    let pr = probe_resolution.max(1);
    let side = lat.side();
    let mut p = vec![0.0; d];
    let mut all_in = true;
    let mut any_in = false;
    let mut probe = |p: &[f64]| {
        let g = dom.gauge(p);
        all_in &= g <= 1.0 + CLOSURE_TOLERANCE;
        any_in |= g < 1.0;
    };
    for mask in 0..(1usize << d) {
        for a in 0..d {
            p[a] = lat.lower(a, idx[a] + ((mask >> a) & 1) as i64);
        }
        probe(&p);
    }
    // Point of the cell nearest the center; catches cells much larger than Q.
    for a in 0..d {
        let lo = lat.lower(a, idx[a]);
        p[a] = dom.center()[a].clamp(lo, lo + side);
    }
    probe(&p);
    let sub = side / pr as f64;
    for j in local_box(d, pr).iter() {
        for a in 0..d {
            p[a] = lat.lower(a, idx[a]) + sub * (j[a] as f64 + 0.5);
        }
        probe(&p);
    }
    if all_in {
        CubeClass::Inner
    } else if any_in {
        CubeClass::Meeting
    } else {
        CubeClass::Outside
    }
}

/// The sets `A(h)` (cells inside the domain) and `B(h)` (cells meeting it).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CubeClassification {
    pub inner: BTreeSet<CellIndex>,
    pub meeting: BTreeSet<CellIndex>,
}

/// Classifies every lattice cell near the domain. `inner` is a subset of
/// `meeting`.
pub fn classify_cubes(
    dom: &StarDomain,
    lat: &LatticeSpec,
    probe_resolution: usize,
) -> Result<CubeClassification> {
    if lat.dim() != dom.dim() {
        return Err(Error::InvalidArgument("lattice and domain dimensions differ".into()));
    }
    let cover = lat.covering(dom.bbox())?;
    let total = cover.count().unwrap_or(0);
    let classes: Vec<(u64, CubeClass)> = (0..total)
        .into_par_iter()
        .filter_map(|k| {
            let idx = cover.nth(k);
            match classify_cube(dom, lat, &idx, probe_resolution) {
                CubeClass::Outside => None,
                c => Some((k, c)),
            }
        })
        .collect();
    let mut out = CubeClassification::default();
    for (k, c) in classes {
        let idx = cover.nth(k);
        if c == CubeClass::Inner {
            out.inner.insert(idx.clone());
        }
        out.meeting.insert(idx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_aligned_cells() {
        let sq = StarDomain::unit_square();
        let c = classify_cubes(&sq, &LatticeSpec::at_origin(2, 0.25).unwrap(), 4).unwrap();
        assert_eq!((c.inner.len(), c.meeting.len()), (4, 4));
    }

    #[test]
    fn unit_square_coarse_cells() {
        // Cells of side 0.75 anchored at the origin: only [0, 0.75]^2 fits.
        let sq = StarDomain::unit_square();
        let c = classify_cubes(&sq, &LatticeSpec::at_origin(2, 0.375).unwrap(), 4).unwrap();
        assert_eq!(c.inner.iter().cloned().collect::<Vec<_>>(), vec![vec![0, 0]]);
        assert_eq!(c.meeting.len(), 4);
    }

    #[test]
    fn one_huge_cell() {
        let ball = StarDomain::ball(2, vec![0.0, 0.0], 1.0, 0.5).unwrap();
        let lat = LatticeSpec::new(10.0, vec![-10.0, -10.0]).unwrap();
        let c = classify_cubes(&ball, &lat, 4).unwrap();
        assert_eq!((c.inner.len(), c.meeting.len()), (0, 1));
        // Anchored at the origin the ball center is a shared corner of four cells.
        let c = classify_cubes(&ball, &LatticeSpec::at_origin(2, 10.0).unwrap(), 4).unwrap();
        assert_eq!((c.inner.len(), c.meeting.len()), (0, 4));
    }

    #[test]
    fn index_box_is_lexicographic() {
        let b = IndexBox {
            lo: vec![0, -1],
            hi: vec![2, 1],
        };
        let all: Vec<_> = b.iter().collect();
        assert_eq!(all, vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn cell_of_and_center_agree() {
        let lat = LatticeSpec::new(0.3, vec![0.1, -0.2]).unwrap();
        let idx = vec![3, -4];
        let c = lat.center(&idx);
        assert_eq!(lat.cell_of(&c), idx);
        assert!(lat.closed_cell_contains(&idx, &c));
    }
}
