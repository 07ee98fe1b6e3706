//! Influence propagation on the enhanced configuration model.
//!
//! Every vertex carries two kinds of half-edges: *transmitter* half-edges, through
//! which it pushes influence to the matched neighbour, and *receiver* half-edges,
//! through which it only listens. Half-edges are matched uniformly regardless of
//! kind. This crate provides
//!
//! * [`degree`]: the limiting joint degree law and the generating functions built on it,
//! * [`theory`]: the fixed points that predict the influenced and pioneer fractions,
//! * [`graph`]: degree-sequence sampling, uniform half-edge matching and the influence digraph,
//! * [`propagation`]: forward/backward reachability, bow-tie structure, classification
//!   of sources into small and large, and duality statistics,
//! * [`exploration`]: the continuous-time forward and reverse exploration processes,
//! * [`oracle`]: exhaustive matching enumeration and Galton–Watson simulation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod degree;
pub mod digraph;
pub mod exploration;
pub mod graph;
pub mod oracle;
pub mod propagation;
pub mod rng;
pub mod theory;

pub use degree::{Criticality, DegreeCell, DegreeError, JointDegreeDistribution, MomentSummary};
pub use digraph::Digraph;
pub use exploration::{
    big_window, fluid_deviation, run_forward, run_reverse, BigWindow, Direction, ExplorationError,
    ExplorationOptions, ExplorationTrace, FluidDeviation, Observable,
};
pub use graph::{DegreeSequence, EnhancedMultigraph, GraphError, HalfEdge, HalfEdgeKind, MultigraphStats};
pub use oracle::{enumerate, gw_survival, ExactSummary, GwOptions, OracleError};
pub use propagation::{
    backward_set, bow_tie, classify, duality_stats, forward_set, tautology_check, BowTie,
    ComponentReport, DualityReport,
};
pub use theory::{branching_extinction, predict, solve_xi, solve_xi_bar, TheoryError, TheoryPrediction};
