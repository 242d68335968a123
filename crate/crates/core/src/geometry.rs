//! Bounded star domains described radially around a center point.
//!
//! Every shape is encoded through its gauge (Minkowski distance function)
//! with respect to the center `o`: a point `x` belongs to the open domain iff
//! `gauge(x) < 1`, and the radial extent in a unit direction `u` is
//! `rho(u) = 1 / gauge(o + u)`. Star-shapedness with respect to `o` is thereby
//! automatic; star-shapedness with respect to the inner ball is checked by
//! [`StarDomain::validate_star_ball`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Slack on the gauge when testing membership in the closure of a domain.
pub const CLOSURE_TOLERANCE: f64 = 1e-12;

/// Largest number of grid cells a single measure computation may visit.
const MAX_GRID_CELLS: u64 = 1 << 40;

/// Boundary model of a domain, expressed relative to the domain center.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned cube of the given side, centered at `o`.
    Cube { side: f64 },
    /// Euclidean ball.
    Ball { radius: f64 },
    /// Union of `d` axis-aligned boxes: arm `i` has half-length
    /// `arm_halflength` along axis `i` and `arm_halfwidth` along the others.
    Cross { arm_halfwidth: f64, arm_halflength: f64 },
    /// Regular star polygon (`d = 2`) with `spikes` outer vertices at radius
    /// `r_out`, alternating with inner vertices at radius `r_in`. The first
    /// outer vertex points along the positive second axis.
    StarPolygon { spikes: usize, r_in: f64, r_out: f64 },
    /// `rho(theta) = base + sum_k cos[k] cos((k+1) theta) + sin[k] sin((k+1) theta)` (`d = 2`).
    FourierRadial { base: f64, cos: Vec<f64>, sin: Vec<f64> },
    /// Radial extents at equally spaced angles `2 pi j / m`, linearly
    /// interpolated in the angle (`d = 2`).
    Tabulated { rho: Vec<f64> },
}

impl Shape {
    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Cube { .. } => "cube",
            Shape::Ball { .. } => "ball",
            Shape::Cross { .. } => "cross",
            Shape::StarPolygon { .. } => "star-polygon",
            Shape::FourierRadial { .. } => "fourier-radial",
            Shape::Tabulated { .. } => "tabulated",
        }
    }

    fn planar_only(&self) -> bool {
        matches!(
            self,
            Shape::StarPolygon { .. } | Shape::FourierRadial { .. } | Shape::Tabulated { .. }
        )
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Cube { side } => write!(f, "cube({side})"),
            Shape::Ball { radius } => write!(f, "ball({radius})"),
            Shape::Cross {
                arm_halfwidth,
                arm_halflength,
            } => write!(f, "cross({arm_halfwidth},{arm_halflength})"),
            Shape::StarPolygon { spikes, r_in, r_out } => {
                write!(f, "star-polygon({spikes},{r_in},{r_out})")
            }
            Shape::FourierRadial { base, cos, .. } => {
                write!(f, "fourier-radial({base};{} modes)", cos.len())
            }
            Shape::Tabulated { rho } => write!(f, "tabulated({} samples)", rho.len()),
        }
    }
}

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn max_extent(&self) -> f64 {
        (0..self.min.len())
            .map(|i| self.extent(i))
            .fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        (0..self.min.len()).map(|i| self.extent(i)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }
}

/// Inner and outer grid volumes squeezing the Jordan measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBracket {
    pub inner: f64,
    pub outer: f64,
    pub resolution: usize,
}

impl JordanBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }

    pub fn width(&self) -> f64 {
        self.outer - self.inner
    }
}

/// A segment from near the boundary into the inner ball that leaves the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentWitness {
    pub boundary_point: Vec<f64>,
    pub ball_point: Vec<f64>,
    pub exit_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarBallReport {
    pub passed: bool,
    pub trials_run: usize,
    pub counterexample: Option<SegmentWitness>,
}

/// A bounded star domain `Q` in `R^d` with center `o` and inner ball radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDomain {
    dim: usize,
    center: Vec<f64>,
    ball_radius: f64,
    shape: Shape,
    bbox: BoundingBox,
    // Star polygon vertices relative to the center (empty for other shapes).
    vertices: Vec<[f64; 2]>,
}

impl StarDomain {
    pub fn new(dim: usize, center: Vec<f64>, ball_radius: f64, shape: Shape) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
        }
        if center.len() != dim || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!(
                "center must have {dim} finite coordinates"
            )));
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        if shape.planar_only() && dim != 2 {
            return Err(Error::Domain(format!(
                "shape {} is only available in dimension 2",
                shape.kind()
            )));
        }
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive")))
            }
        };
        let mut vertices = Vec::new();
        match &shape {
            Shape::Cube { side } => positive(*side, "side")?,
            Shape::Ball { radius } => positive(*radius, "radius")?,
            Shape::Cross {
                arm_halfwidth,
                arm_halflength,
            } => {
                positive(*arm_halfwidth, "arm_halfwidth")?;
                positive(*arm_halflength, "arm_halflength")?;
                if arm_halflength < arm_halfwidth {
                    return Err(Error::Domain(
                        "arm_halflength must not be smaller than arm_halfwidth".into(),
                    ));
                }
            }
            Shape::StarPolygon { spikes, r_in, r_out } => {
                positive(*r_in, "r_in")?;
                positive(*r_out, "r_out")?;
                if *spikes < 3 {
                    return Err(Error::Domain("star polygon needs at least 3 spikes".into()));
                }
                if r_in > r_out {
                    return Err(Error::Domain("r_in must not exceed r_out".into()));
                }
                vertices = star_polygon_vertices(*spikes, *r_in, *r_out);
            }
            Shape::FourierRadial { base, cos, sin } => {
                positive(*base, "radius")?;
                if cos.len() != sin.len() {
                    return Err(Error::Domain(
                        "fourier_cos and fourier_sin must have equal length".into(),
                    ));
                }
                let min = (0..4096)
                    .map(|j| fourier_rho(*base, cos, sin, TAU * j as f64 / 4096.0))
                    .fold(f64::INFINITY, f64::min);
                if !(min > 0.0) {
                    return Err(Error::Domain("fourier radial function must stay positive".into()));
                }
            }
            Shape::Tabulated { rho } => {
                if rho.len() < 3 {
                    return Err(Error::Domain("rho_samples needs at least 3 values".into()));
                }
                if rho.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                    return Err(Error::Domain("rho_samples must be positive".into()));
                }
            }
        }
        let mut dom = StarDomain {
            dim,
            bbox: BoundingBox {
                min: center.clone(),
                max: center.clone(),
            },
            center,
            ball_radius,
            shape,
            vertices,
        };
        dom.bbox = dom.compute_bbox();
        Ok(dom)
    }

    /// Axis-aligned cube `[lo, hi]^d` with center at its midpoint.
    pub fn cube(dim: usize, lo: f64, hi: f64, ball_radius: f64) -> Result<Self> {
        let c = 0.5 * (lo + hi);
        Self::new(dim, vec![c; dim], ball_radius, Shape::Cube { side: hi - lo })
    }

    /// The unit square `[0, 1]^2` centered at `(1/2, 1/2)` with inner ball radius `1/4`.
    pub fn unit_square() -> Self {
        Self::cube(2, 0.0, 1.0, 0.25).expect("valid unit square")
    }

    pub fn ball(dim: usize, center: Vec<f64>, radius: f64, ball_radius: f64) -> Result<Self> {
        Self::new(dim, center, ball_radius, Shape::Ball { radius })
    }

    pub fn cross(
        dim: usize,
        arm_halfwidth: f64,
        arm_halflength: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        Self::new(
            dim,
            vec![0.0; dim],
            ball_radius,
            Shape::Cross {
                arm_halfwidth,
                arm_halflength,
            },
        )
    }

    pub fn star_polygon(spikes: usize, r_in: f64, r_out: f64, ball_radius: f64) -> Result<Self> {
        Self::new(
            2,
            vec![0.0; 2],
            ball_radius,
            Shape::StarPolygon { spikes, r_in, r_out },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Human-readable identifier used in reports.
    pub fn label(&self) -> String {
        format!("{}@d{}", self.shape, self.dim)
    }

    /// Minkowski gauge of `x - o`: `< 1` inside, `= 1` on the boundary.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let o = &self.center;
        match &self.shape {
            Shape::Cube { side } => {
                let m = x
                    .iter()
                    .zip(o)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                m / (0.5 * side)
            }
            Shape::Ball { radius } => {
                let s: f64 = x.iter().zip(o).map(|(a, b)| (a - b) * (a - b)).sum();
                s.sqrt() / radius
            }
            Shape::Cross {
                arm_halfwidth,
                arm_halflength,
            } => {
                let mut best = f64::INFINITY;
                for arm in 0..self.dim {
                    let mut g: f64 = 0.0;
                    for j in 0..self.dim {
                        let half = if j == arm { *arm_halflength } else { *arm_halfwidth };
                        g = g.max((x[j] - o[j]).abs() / half);
                    }
                    best = best.min(g);
                }
                best
            }
            _ => {
                let vx = x[0] - o[0];
                let vy = x[1] - o[1];
                let r = vx.hypot(vy);
                if r == 0.0 {
                    return 0.0;
                }
                r / self.planar_rho(vy.atan2(vx))
            }
        }
    }

    /// Radial extent `rho(theta)` of a planar shape.
    fn planar_rho(&self, theta: f64) -> f64 {
        match &self.shape {
            Shape::StarPolygon { spikes, .. } => {
                let sector = PI / *spikes as f64;
                let rel = (theta - FRAC_PI_2).rem_euclid(TAU);
                let j = ((rel / sector) as usize).min(2 * spikes - 1);
                let a = self.vertices[j];
                let b = self.vertices[(j + 1) % (2 * spikes)];
                let (ux, uy) = (theta.cos(), theta.sin());
                let ex = b[0] - a[0];
                let ey = b[1] - a[1];
                (a[0] * ey - a[1] * ex) / (ux * ey - uy * ex)
            }
            Shape::FourierRadial { base, cos, sin } => fourier_rho(*base, cos, sin, theta),
            Shape::Tabulated { rho } => {
                let m = rho.len();
                let pos = theta.rem_euclid(TAU) / TAU * m as f64;
                let j = (pos.floor() as usize).min(m - 1);
                let frac = pos - j as f64;
                rho[j] * (1.0 - frac) + rho[(j + 1) % m] * frac
            }
            _ => {
                let u = [theta.cos(), theta.sin()];
                self.radial_extent(&u)
            }
        }
    }

    /// `rho(u)` for a unit direction `u`.
    pub fn radial_extent(&self, u: &[f64]) -> f64 {
        let p: Vec<f64> = self.center.iter().zip(u).map(|(c, v)| c + v).collect();
        1.0 / self.gauge(&p)
    }

    /// Membership in the open domain. Boundary points are outside.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) < 1.0
    }

    /// Membership in the closure, with [`CLOSURE_TOLERANCE`] slack.
    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0 + CLOSURE_TOLERANCE
    }

    fn compute_bbox(&self) -> BoundingBox {
        let o = &self.center;
        let half: Vec<f64> = match &self.shape {
            Shape::Cube { side } => vec![0.5 * side; self.dim],
            Shape::Ball { radius } => vec![*radius; self.dim],
            Shape::Cross { arm_halflength, .. } => vec![*arm_halflength; self.dim],
            Shape::StarPolygon { .. } => {
                let mut lo = [0.0f64; 2];
                let mut hi = [0.0f64; 2];
                for v in &self.vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                return BoundingBox {
                    min: vec![o[0] + lo[0], o[1] + lo[1]],
                    max: vec![o[0] + hi[0], o[1] + hi[1]],
                };
            }
            Shape::FourierRadial { .. } | Shape::Tabulated { .. } => {
                let m = match &self.shape {
                    Shape::Tabulated { rho } => (16 * rho.len()).max(4096),
                    _ => 8192,
                };
                let mut lo = [0.0f64; 2];
                let mut hi = [0.0f64; 2];
                let mut rmax: f64 = 0.0;
                for j in 0..m {
                    let th = TAU * j as f64 / m as f64;
                    let r = self.planar_rho(th);
                    rmax = rmax.max(r);
                    let p = [r * th.cos(), r * th.sin()];
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                // Sampling can miss extremes between samples.
                let pad = 0.01 * rmax;
                return BoundingBox {
                    min: vec![o[0] + lo[0] - pad, o[1] + lo[1] - pad],
                    max: vec![o[0] + hi[0] + pad, o[1] + hi[1] + pad],
                };
            }
        };
        BoundingBox {
            min: o.iter().zip(&half).map(|(c, h)| c - h).collect(),
            max: o.iter().zip(&half).map(|(c, h)| c + h).collect(),
        }
    }

    /// Grid-counting bracket for the Jordan measure.
    ///
    /// The bounding box is cut into `resolution^d` equal cells. A cell counts
    /// as inner when its `2^d` corners and its center all lie in the closure,
    /// and as meeting the domain when any of those probes lies in the open set.
    pub fn jordan_measure(&self, resolution: usize) -> Result<JordanBracket> {
        if resolution < 2 {
            return Err(Error::InvalidArgument("resolution must be at least 2".into()));
        }
        let d = self.dim;
        let total = (resolution as u64).checked_pow(d as u32);
        if total.map_or(true, |t| t > MAX_GRID_CELLS) {
            return Err(Error::ResolutionOverflow { resolution, dim: d });
        }
        let coord = |axis: usize, k: usize| -> f64 {
            self.bbox.min[axis] + self.bbox.extent(axis) * k as f64 / resolution as f64
        };
        let rest = resolution.pow(d as u32 - 1);
        let (inner, outer) = (0..resolution)
            .into_par_iter()
            .map(|i0| {
                let mut inner = 0u64;
                let mut outer = 0u64;
                let mut idx = vec![0usize; d];
                let mut p = vec![0.0; d];
                idx[0] = i0;
                for r in 0..rest {
                    let mut rem = r;
                    for a in (1..d).rev() {
                        idx[a] = rem % resolution;
                        rem /= resolution;
                    }
                    for a in 0..d {
                        p[a] = 0.5 * (coord(a, idx[a]) + coord(a, idx[a] + 1));
                    }
                    let g = self.gauge(&p);
                    let mut all_in = g <= 1.0 + CLOSURE_TOLERANCE;
                    let mut any_in = g < 1.0;
                    for mask in 0..(1usize << d) {
                        for a in 0..d {
                            p[a] = coord(a, idx[a] + ((mask >> a) & 1));
                        }
                        let g = self.gauge(&p);
                        all_in &= g <= 1.0 + CLOSURE_TOLERANCE;
                        any_in |= g < 1.0;
                        if !all_in && any_in {
                            break;
                        }
                    }
                    inner += all_in as u64;
                    outer += (all_in || any_in) as u64;
                }
                (inner, outer)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        // Scale counts by the box volume last so a fully covered box is exact.
        let total = (resolution as f64).powi(d as i32);
        let volume = self.bbox.volume();
        Ok(JordanBracket {
            inner: inner as f64 * volume / total,
            outer: outer as f64 * volume / total,
            resolution,
        })
    }

    /// Default grid resolution for [`jordan_measure`](Self::jordan_measure):
    /// roughly four million cells, rounded to a multiple of 24 per axis.
    pub fn default_measure_resolution(&self) -> usize {
        let per_axis = (4.0e6f64).powf(1.0 / self.dim as f64);
        ((per_axis / 24.0).floor() as usize).max(1) * 24
    }

    /// Diameter of the domain.
    ///
    /// Closed forms are used for the cube (`side * sqrt(d)`), the ball
    /// (`2 r`), the cross (`2 sqrt(L^2 + (d-1) w^2)`, opposite arm corners) and
    /// the star polygon (largest vertex distance). Fourier and tabulated
    /// shapes return the largest distance between `samples` boundary points,
    /// a lower estimate.
    pub fn diameter(&self, samples: usize) -> f64 {
        let d = self.dim as f64;
        match &self.shape {
            Shape::Cube { side } => side * d.sqrt(),
            Shape::Ball { radius } => 2.0 * radius,
            Shape::Cross {
                arm_halfwidth: w,
                arm_halflength: l,
            } => 2.0 * (l * l + (d - 1.0) * w * w).sqrt(),
            Shape::StarPolygon { .. } => max_pairwise(&self.vertices),
            _ => {
                let m = samples.max(2);
                let pts: Vec<[f64; 2]> = (0..m)
                    .map(|j| {
                        let th = TAU * j as f64 / m as f64;
                        let r = self.planar_rho(th);
                        [r * th.cos(), r * th.sin()]
                    })
                    .collect();
                max_pairwise(&pts)
            }
        }
    }

    /// Closed-form measure of the domain.
    ///
    /// The cross uses inclusion-exclusion (all arms share the central cube),
    /// the Fourier shape `∫ rho^2 / 2` and the tabulated shape the exact
    /// integral of the squared linear interpolant.
    pub fn exact_measure(&self) -> f64 {
        let d = self.dim;
        match &self.shape {
            Shape::Cube { side } => side.powi(d as i32),
            Shape::Ball { radius } => unit_ball_volume(d) * radius.powi(d as i32),
            Shape::Cross {
                arm_halfwidth: w,
                arm_halflength: l,
            } => {
                let core = (2.0 * w).powi(d as i32);
                d as f64 * 2.0 * l * (2.0 * w).powi(d as i32 - 1) - (d as f64 - 1.0) * core
            }
            Shape::StarPolygon { spikes, r_in, r_out } => {
                let m = *spikes as f64;
                m * r_in * r_out * (PI / m).sin()
            }
            Shape::FourierRadial { base, cos, sin } => {
                let pi = PI;
                let modes: f64 = cos.iter().chain(sin).map(|c| c * c).sum();
                pi * base * base + 0.5 * pi * modes
            }
            Shape::Tabulated { rho } => {
                let m = rho.len();
                let step = TAU / m as f64;
                (0..m)
                    .map(|j| {
                        let (a, b) = (rho[j], rho[(j + 1) % m]);
                        step * (a * a + a * b + b * b) / 6.0
                    })
                    .sum()
            }
        }
    }

    /// Randomized check that `Q` is star-shaped with respect to the closed
    /// ball `S_R(o)`.
    ///
    /// Each trial draws a point `x = o + (1 - 1e-6) rho(u) u` just inside the
    /// boundary and a point `y` uniformly in the ball, then tests membership
    /// at the 65 dyadic points `x + (y - x) j / 64`. The first failing probe is
    /// reported.
    pub fn validate_star_ball(&self, seed: u64, trials: usize) -> StarBallReport {
        let d = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        const LEVELS: usize = 64;
        for trial in 0..trials.max(1) {
            let u = random_unit(&mut rng, d);
            let rho = self.radial_extent(&u);
            let x: Vec<f64> = (0..d)
                .map(|i| self.center[i] + (1.0 - 1e-6) * rho * u[i])
                .collect();
            let v = random_unit(&mut rng, d);
            let s = self.ball_radius * rng.gen::<f64>().powf(1.0 / d as f64);
            let y: Vec<f64> = (0..d).map(|i| self.center[i] + s * v[i]).collect();
            for j in 0..=LEVELS {
                let t = j as f64 / LEVELS as f64;
                let p: Vec<f64> = (0..d).map(|i| x[i] + t * (y[i] - x[i])).collect();
                if !self.contains(&p) {
                    return StarBallReport {
                        passed: false,
                        trials_run: trial + 1,
                        counterexample: Some(SegmentWitness {
                            boundary_point: x,
                            ball_point: y,
                            exit_point: p,
                        }),
                    };
                }
            }
        }
        StarBallReport {
            passed: true,
            trials_run: trials.max(1),
            counterexample: None,
        }
    }
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn fourier_rho(base: f64, cos: &[f64], sin: &[f64], theta: f64) -> f64 {
    let mut r = base;
    for (k, (a, b)) in cos.iter().zip(sin).enumerate() {
        let f = (k + 1) as f64 * theta;
        r += a * f.cos() + b * f.sin();
    }
    r
}

fn star_polygon_vertices(spikes: usize, r_in: f64, r_out: f64) -> Vec<[f64; 2]> {
    (0..2 * spikes)
        .map(|j| {
            let th = FRAC_PI_2 + PI * j as f64 / spikes as f64;
            let r = if j % 2 == 0 { r_out } else { r_in };
            [r * th.cos(), r * th.sin()]
        })
        .collect()
}

/// Largest radius of a disk centered at the star polygon center that fits in
/// its kernel: the smallest distance from the center to an edge line.
pub fn star_polygon_kernel_radius(spikes: usize, r_in: f64, r_out: f64) -> f64 {
    let v = star_polygon_vertices(spikes, r_in, r_out);
    let n = v.len();
    (0..n)
        .map(|j| {
            let a = v[j];
            let b = v[(j + 1) % n];
            let ex = b[0] - a[0];
            let ey = b[1] - a[1];
            (a[0] * ey - a[1] * ex).abs() / ex.hypot(ey)
        })
        .fold(f64::INFINITY, f64::min)
}

fn max_pairwise(pts: &[[f64; 2]]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

/// Volume of the Euclidean unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * TAU / d as f64,
    }
}
