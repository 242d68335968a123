//! Numerical checks of the auxiliary maps used in the error analysis.
//!
//! For a node `x*` outside the inner ball `S_R(o)` and a radius `r <= R`, the
//! map
//!
//! ```text
//! p(x; r) = (r (x + x*) + |x - x*|₂ o) / (|x - x*|₂ + 2r)
//! ```
//!
//! pulls `x` toward the ball so that the broken path `x -> p(x) -> x*` stays in
//! the domain. The homotopies `φ(x) = (1-t) x* + t p(x)` and
//! `ψ(x) = t x + (1-t) p(x)` have closed-form Jacobians, and `ψ(·; r, t)` is at
//! most four-to-one. This module evaluates the closed forms and compares them
//! with independent numerical constructions.

mod maps;
mod planar;
mod preimage;
mod regions;
mod suite;

pub use maps::{
    det_identity, determinant, fd_jacobian, jacobian_p, jacobian_phi, jacobian_psi, p_map,
    phi_map, psi_map,
};
pub use planar::{distance_bound_check, geometric_sense_check, DistanceReport};
pub use preimage::{
    preimage_count, preimage_count_planar, quartic_coefficients, scan_root_count, PlanarFrame,
    Preimages,
};
pub use regions::{w_region_bounds, w_region_survey, Region, RegionStats, WRegionReport};
pub use suite::{
    random_config, run_lemma_suite, segment_identity_residual, LemmaCheck, SuiteOptions,
};

use crate::error::{Error, Result};

/// Inputs shared by the auxiliary maps.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxConfig {
    /// Center `o` of the inner ball.
    pub o: Vec<f64>,
    /// Radius `R` of the inner ball.
    pub big_r: f64,
    /// Active radius `r` in `(0, R]`.
    pub r: f64,
    /// Node `x*`.
    pub node: Vec<f64>,
    /// Probe point `x`.
    pub x: Vec<f64>,
    /// Homotopy parameter in `[0, 1]`.
    pub t: f64,
}

impl AuxConfig {
    pub fn dim(&self) -> usize {
        self.o.len()
    }

    /// Checks dimensions, `0 < r <= R`, `t in [0, 1]` and that `x` and `x*` lie
    /// outside the ball.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d < 2 || self.node.len() != d || self.x.len() != d {
            return Err(Error::InvalidArgument("configuration dimensions disagree".into()));
        }
        if !(self.r > 0.0 && self.r <= self.big_r) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r <= R, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::InvalidArgument(format!("t = {} outside [0, 1]", self.t)));
        }
        if dist2(&self.x, &self.o) <= self.big_r || dist2(&self.node, &self.o) <= self.big_r {
            return Err(Error::InvalidArgument("x and x* must lie outside the ball".into()));
        }
        Ok(())
    }

    /// The same configuration with another probe point.
    pub fn with_x(&self, x: Vec<f64>) -> Self {
        AuxConfig { x, ..self.clone() }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
