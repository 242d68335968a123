//! Asymptotically optimal cubature formulas on star domains.
//!
//! The pipeline is: describe a [`StarDomain`], bracket its measure, build the
//! informational set with [`build_nodeset`], measure the ℓ∞-Voronoi cells with
//! [`compute_weights`] and apply the resulting [`CubatureRule`].

pub mod config;
pub mod convergence;
pub mod cubature;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod lattice;
pub mod lemma;
pub mod nodes;
pub mod partition;
pub mod quadrature;
pub mod rule_io;

pub use convergence::{
    fit_slope, parse_report, run_convergence, write_report, ConvergenceOptions, ConvergenceReport,
    ConvergenceRow,
};
pub use config::{format_domain, load_domain, parse_domain};
pub use cubature::{
    build_rule, build_rule_with_bracket, cdp_constant, default_reference_resolution,
    empirical_error, evaluate, reference_integral, reference_integral_with, theorem_bound,
    Exponent, RuleOptions,
};
pub use error::{Error, Result};
pub use functions::{named_function, Constant, Fooling, LinearX1, SinSum, TestFunction};
pub use geometry::{BoundingBox, JordanBracket, Shape, StarBallReport, StarDomain};
pub use lattice::{classify_cubes, CellIndex, CubeClassification, LatticeSpec};
pub use nodes::{
    build_nodeset, build_nodeset_with, build_s1, check_informational_set, step_size, Node,
    NodeOptions, NodeSet, Provenance,
};
pub use partition::{assign_cell, compute_weights, remainder_measure, CubatureRule, NodeLocator};
pub use rule_io::{load_rule, parse_rule, save_rule, write_rule};
